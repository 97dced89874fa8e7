#pragma once

#include <optional>
#include <string>

#include "agrotrack/harness/sim_log.hpp"

namespace agrotrack::harness {

struct ErrorStats {
  double max = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

struct MetricsReport {
  ErrorStats straight;  // Euclidean position error on straight segments
  ErrorStats curved;
  ErrorStats overall;
  std::optional<ErrorStats> yaw_rate;  // |gamma_d - gamma|; absent for logs without the demand
  double speed_steady_state_error = 0.0;  // mean (speed_ref - v_x) over the second half of the run
  int constraint_violations = 0;          // steering commands beyond the angle or rate bound
};

/// Tracking limits for the default figure-eight scenario [m].
inline constexpr double kStraightErrorLimit = 0.40;
inline constexpr double kCurvedErrorLimit = 0.60;

struct ConstraintBounds {
  double max_angle = 0.0;  // [rad]
  double max_rate = 0.0;   // [rad/s]
};

ConstraintBounds default_steering_bounds();

/// Per-segment Euclidean tracking errors and the steering constraint audit.
/// Uses each record's segment tag. Throws ErrorKind::domain for an empty log.
MetricsReport metrics(const SimLog& log, const ConstraintBounds& bounds = default_steering_bounds());

/// Re-tags segments from the curvature of the reference path (for logs read
/// back from CSV), recovers the reference speed from the reference positions
/// and drops the yaw demand, which the CSV does not carry.
void infer_segments(SimLog& log, double curvature_threshold = 0.02);

/// Max errors below the straight/curved limits and no constraint violation.
bool within_tracking_limits(const MetricsReport& report);

/// Text block followed by key=value lines.
std::string format_report(const MetricsReport& report);

/// Writes format_report to path. Throws ErrorKind::io naming the path.
void export_report(const MetricsReport& report, const std::string& path);

}  // namespace agrotrack::harness
