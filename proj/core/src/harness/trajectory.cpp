#include "agrotrack/harness/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "agrotrack/errors.hpp"

namespace agrotrack::harness {

const char* to_string(Segment s) { return s == Segment::straight ? "straight" : "curved"; }

FigureEight::FigureEight(double speed, double straight_len, double turn_radius)
    : speed_(speed), straight_(straight_len), radius_(turn_radius) {
  if (!(speed > 0.0) || !(straight_len > 0.0) || !(turn_radius > 0.0))
    fail(ErrorKind::domain, "figure-eight: speed, straight length and radius must be positive");
  theta_ = std::atan(2.0 * radius_ / straight_);
  arc_ = radius_ * (std::numbers::pi + 2.0 * theta_);
}

TrajectoryPoint FigureEight::at(double t) const {
  const double c = std::cos(theta_), s = std::sin(theta_);
  const double half = 0.5 * straight_;
  const double centre = half * c + radius_ * s;

  double d = std::fmod(speed_ * t, lap_length());
  if (d < 0.0) d += lap_length();

  TrajectoryPoint p;
  p.t = t;
  if (d < straight_) {
    // Lower-left to upper-right through the crossing.
    p.x_r = (-half + d) * c;
    p.y_r = (-half + d) * s;
    p.xdot_r = speed_ * c;
    p.ydot_r = speed_ * s;
    return p;
  }
  d -= straight_;
  if (d < arc_) {
    // Clockwise around (centre, 0), starting at the top tangent point.
    const double phi0 = std::numbers::pi / 2.0 + theta_;
    const double phi = phi0 - d / radius_;
    p.x_r = centre + radius_ * std::cos(phi);
    p.y_r = radius_ * std::sin(phi);
    p.xdot_r = speed_ * std::sin(phi);
    p.ydot_r = -speed_ * std::cos(phi);
    p.segment = Segment::curved;
    return p;
  }
  d -= arc_;
  if (d < straight_) {
    // Lower-right to upper-left through the crossing.
    p.x_r = (half - d) * c;
    p.y_r = (-half + d) * s;
    p.xdot_r = -speed_ * c;
    p.ydot_r = speed_ * s;
    return p;
  }
  d -= straight_;
  // Counter-clockwise around (-centre, 0), starting at the top tangent point.
  const double phi0 = std::numbers::pi / 2.0 - theta_;
  const double phi = phi0 + d / radius_;
  p.x_r = -centre + radius_ * std::cos(phi);
  p.y_r = radius_ * std::sin(phi);
  p.xdot_r = -speed_ * std::sin(phi);
  p.ydot_r = speed_ * std::cos(phi);
  p.segment = Segment::curved;
  return p;
}

std::vector<TrajectoryPoint> make_eight_trajectory(double speed, double straight_len, double turn_radius, double Ts,
                                                   int laps) {
  if (!(Ts > 0.0)) fail(ErrorKind::domain, "make_eight_trajectory: Ts must be positive");
  if (laps < 1) fail(ErrorKind::domain, "make_eight_trajectory: at least one lap");
  const FigureEight eight(speed, straight_len, turn_radius);
  const double duration = laps * eight.lap_time();
  const auto steps = static_cast<long>(std::floor(duration / Ts + 1e-9));
  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 2);
  for (long k = 0; k <= steps; ++k) out.push_back(eight.at(k * Ts));
  if (duration - steps * Ts > 1e-9) {
    TrajectoryPoint last = eight.at(duration);
    last.t = duration;
    out.push_back(last);
  }
  return out;
}

}  // namespace agrotrack::harness
