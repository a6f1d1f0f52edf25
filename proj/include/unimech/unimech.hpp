#ifndef UNIMECH_UNIMECH_HPP
#define UNIMECH_UNIMECH_HPP

#include "unimech/errors.hpp"
#include "unimech/dual.hpp"
#include "unimech/lie_group.hpp"
#include "unimech/bundle_state.hpp"
#include "unimech/calculus.hpp"
#include "unimech/unified_dynamics.hpp"
#include "unimech/projection.hpp"
#include "unimech/residuals.hpp"
#include "unimech/integrator.hpp"
#include "unimech/gnh.hpp"
#include "unimech/optimal_control.hpp"
#include "unimech/examples.hpp"

#endif  // UNIMECH_UNIMECH_HPP
