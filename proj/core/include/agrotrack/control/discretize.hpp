#pragma once

#include "agrotrack/dynamics/linear_models.hpp"

namespace agrotrack::control {

/// Zero-order-hold discretization through the exponential of the augmented
/// matrix [[A, B], [0, 0]] Ts. C and D are copied unchanged.
dynamics::StateSpace discretize(const dynamics::StateSpace& continuous, double Ts);

/// Steady-state gain C (I - A)^-1 B + D of a discrete SISO model.
double discrete_dc_gain(const dynamics::StateSpace& discrete);

}  // namespace agrotrack::control
