#pragma once

#include "didacks/errors.hpp"
#include "didacks/constants.hpp"
#include "didacks/halfspace.hpp"
#include "didacks/field.hpp"
#include "didacks/spd_solve.hpp"
#include "didacks/normal_equations.hpp"
#include "didacks/dirichlet_fit.hpp"
#include "didacks/surface_fit.hpp"
#include "didacks/complex_fit.hpp"
#include "didacks/rbf_bridge.hpp"
#include "didacks/downward_continuation.hpp"
#include "didacks/quadrature.hpp"
