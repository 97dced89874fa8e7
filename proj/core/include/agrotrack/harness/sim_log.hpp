#pragma once

#include <vector>

#include "agrotrack/harness/trajectory.hpp"

namespace agrotrack::harness {

/// One control step. The first sixteen fields are the CSV columns, in order.
/// Positions are CG positions; hatted values are estimates.
struct SimRecord {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
  double gamma = 0.0;
  double x_hat = 0.0;
  double y_hat = 0.0;
  double psi_hat = 0.0;
  double x_r = 0.0;
  double y_r = 0.0;
  double delta_cmd = 0.0;  // steering angle requested by the yaw controller
  double delta_act = 0.0;  // steering angle of the front wheels
  double e_x = 0.0;
  double e_y = 0.0;

  // Not exported.
  double v_x_d = 0.0;
  double gamma_d = 0.0;
  double speed_ref = 0.0;
  Segment segment = Segment::straight;
};

struct SimLog {
  double Ts = 0.05;
  std::vector<SimRecord> records;

  bool empty() const { return records.empty(); }
  std::size_t size() const { return records.size(); }
};

}  // namespace agrotrack::harness
