#pragma once

// Umbrella header for the transient heat-transmission CQ-BEM library.

#include "heatcq/bessel.hpp"
#include "heatcq/config.hpp"
#include "heatcq/cq.hpp"
#include "heatcq/errors.hpp"
#include "heatcq/geometry.hpp"
#include "heatcq/kernel.hpp"
#include "heatcq/operators.hpp"
#include "heatcq/parallel.hpp"
#include "heatcq/quadrature.hpp"
#include "heatcq/solver.hpp"
#include "heatcq/trace_space.hpp"
#include "heatcq/verification.hpp"
