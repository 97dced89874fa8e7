#pragma once

#include <vector>

namespace agrotrack::harness {

enum class Segment { straight, curved };

const char* to_string(Segment s);

struct TrajectoryPoint {
  double t = 0.0;
  double x_r = 0.0;
  double y_r = 0.0;
  double xdot_r = 0.0;
  double ydot_r = 0.0;
  Segment segment = Segment::straight;
};

/// Figure-eight made of two crossing straights of length straight_len joined
/// by two arcs of radius turn_radius, driven at constant speed. The crossing
/// sits at the origin; the lap starts at the lower-left end of the first
/// straight heading up and to the right, and the right loop is driven clockwise.
class FigureEight {
 public:
  /// Throws ErrorKind::domain for non-positive inputs. The loop centres sit at
  /// +-sqrt(S^2/4 + R^2) on the x axis, so the loops never overlap.
  FigureEight(double speed, double straight_len, double turn_radius);

  TrajectoryPoint at(double t) const;  // periodic in lap_time()
  double lap_length() const { return 2.0 * straight_ + 2.0 * arc_; }
  double lap_time() const { return lap_length() / speed_; }
  double crossing_angle() const { return theta_; }  // heading of the first straight [rad]
  double speed() const { return speed_; }
  double turn_radius() const { return radius_; }

 private:
  double speed_, straight_, radius_;
  double theta_;  // atan(2 R / S)
  double arc_;    // R (pi + 2 theta)
};

/// Samples t = 0, Ts, ... up to and including `laps` full laps.
std::vector<TrajectoryPoint> make_eight_trajectory(double speed, double straight_len, double turn_radius, double Ts,
                                                   int laps = 1);

}  // namespace agrotrack::harness
