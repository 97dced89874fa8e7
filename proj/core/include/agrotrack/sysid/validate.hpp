#pragma once

#include <cstddef>
#include <vector>

#include "agrotrack/dynamics/linear_models.hpp"

namespace agrotrack::sysid {

/// Zero-order-hold simulation of tf from rest. Throws ErrorKind::simulation_unstable
/// when a pole has a non-negative real part.
std::vector<double> simulate_tf(const dynamics::RationalTF& tf, const std::vector<double>& u, double fs);

/// RMS of (y_sim - y) over the samples after the first `discard`.
double validate_time_domain(const dynamics::RationalTF& tf, const std::vector<double>& u, const std::vector<double>& y,
                            double fs, std::size_t discard = 0);

}  // namespace agrotrack::sysid
