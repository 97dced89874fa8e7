#include "agrotrack/harness/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "agrotrack/errors.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::harness {
namespace {

void add(ErrorStats& s, double e) {
  s.max = std::max(s.max, e);
  s.rms += e * e;
  ++s.samples;
}

void finish(ErrorStats& s) { s.rms = s.samples ? std::sqrt(s.rms / static_cast<double>(s.samples)) : 0.0; }

}  // namespace

ConstraintBounds default_steering_bounds() { return {deg2rad(45.0), deg2rad(55.0)}; }

MetricsReport metrics(const SimLog& log, const ConstraintBounds& bounds) {
  if (log.empty()) fail(ErrorKind::domain, "metrics: empty log");
  MetricsReport rep;
  ErrorStats yaw;
  bool have_yaw = false;
  double speed_err = 0.0;
  std::size_t speed_n = 0;
  const std::size_t half = log.size() / 2;
  const double rate_step = bounds.max_rate * log.Ts * (1.0 + 1e-12);

  for (std::size_t i = 0; i < log.size(); ++i) {
    const SimRecord& r = log.records[i];
    const double e = std::hypot(r.e_x, r.e_y);
    add(r.segment == Segment::straight ? rep.straight : rep.curved, e);
    add(rep.overall, e);
    if (std::isfinite(r.gamma_d)) {
      add(yaw, std::abs(r.gamma_d - r.gamma));
      have_yaw = true;
    }
    if (i >= half && std::isfinite(r.speed_ref)) {
      speed_err += r.speed_ref - r.v_x;
      ++speed_n;
    }
    if (std::abs(r.delta_cmd) > bounds.max_angle * (1.0 + 1e-12)) ++rep.constraint_violations;
    if (i > 0 && std::abs(r.delta_cmd - log.records[i - 1].delta_cmd) > rate_step) ++rep.constraint_violations;
  }
  finish(rep.straight);
  finish(rep.curved);
  finish(rep.overall);
  if (have_yaw) {
    finish(yaw);
    rep.yaw_rate = yaw;
  }
  rep.speed_steady_state_error = speed_n ? speed_err / static_cast<double>(speed_n) : 0.0;
  return rep;
}

void infer_segments(SimLog& log, double threshold) {
  auto& rs = log.records;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].gamma_d = std::nan("");
    rs[i].speed_ref = std::nan("");
    if (rs.size() < 3) {
      rs[i].segment = Segment::straight;
      continue;
    }
    const std::size_t a = i == 0 ? 0 : (i + 1 == rs.size() ? i - 2 : i - 1);
    const auto& p0 = rs[a];
    const auto& p1 = rs[a + 1];
    const auto& p2 = rs[a + 2];
    // Menger curvature through three consecutive reference points.
    const double ax = p1.x_r - p0.x_r, ay = p1.y_r - p0.y_r;
    const double bx = p2.x_r - p1.x_r, by = p2.y_r - p1.y_r;
    const double cx = p2.x_r - p0.x_r, cy = p2.y_r - p0.y_r;
    const double denom = std::hypot(ax, ay) * std::hypot(bx, by) * std::hypot(cx, cy);
    const double kappa = denom > 0.0 ? 2.0 * std::abs(ax * by - ay * bx) / denom : 0.0;
    rs[i].segment = kappa > threshold ? Segment::curved : Segment::straight;
    if (p2.t > p0.t) rs[i].speed_ref = std::hypot(cx, cy) / (p2.t - p0.t);
  }
}

bool within_tracking_limits(const MetricsReport& report) {
  return report.straight.max < kStraightErrorLimit && report.curved.max < kCurvedErrorLimit &&
         report.constraint_violations == 0;
}

std::string format_report(const MetricsReport& r) {
  std::string out;
  out += "Tracking report\n";
  out += fmt::format("  straight: max {:.4f} m, rms {:.4f} m over {} samples\n", r.straight.max, r.straight.rms,
                     r.straight.samples);
  out += fmt::format("  curved:   max {:.4f} m, rms {:.4f} m over {} samples\n", r.curved.max, r.curved.rms,
                     r.curved.samples);
  if (r.yaw_rate)
    out += fmt::format("  yaw rate: max {:.4f} rad/s, rms {:.4f} rad/s\n", r.yaw_rate->max, r.yaw_rate->rms);
  out += fmt::format("  speed steady-state error: {:.4f} m/s\n", r.speed_steady_state_error);
  out += fmt::format("  steering constraint violations: {}\n", r.constraint_violations);
  out += "\n";
  out += fmt::format("straight_max={:.17g}\nstraight_rms={:.17g}\n", r.straight.max, r.straight.rms);
  out += fmt::format("curved_max={:.17g}\ncurved_rms={:.17g}\n", r.curved.max, r.curved.rms);
  out += fmt::format("overall_max={:.17g}\noverall_rms={:.17g}\n", r.overall.max, r.overall.rms);
  if (r.yaw_rate) out += fmt::format("yaw_rate_max={:.17g}\nyaw_rate_rms={:.17g}\n", r.yaw_rate->max, r.yaw_rate->rms);
  out += fmt::format("speed_steady_state_error={:.17g}\n", r.speed_steady_state_error);
  out += fmt::format("constraint_violations={}\n", r.constraint_violations);
  return out;
}

void export_report(const MetricsReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  f << format_report(report);
  if (!f) fail(ErrorKind::io, "write to '" + path + "' failed");
}

}  // namespace agrotrack::harness
