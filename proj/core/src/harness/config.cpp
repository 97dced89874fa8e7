#include "agrotrack/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <functional>
#include <set>
#include <sstream>

#include "agrotrack/errors.hpp"
#include "agrotrack/harness/csv.hpp"
#include "agrotrack/units.hpp"

namespace agrotrack::harness {
namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& section, const std::string& key, const std::string& raw) {
  double v = 0.0;
  const char* b = raw.data();
  const char* e = raw.data() + raw.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    fail(ErrorKind::config, "[" + section + "] " + key + ": '" + raw + "' is not a number");
  return v;
}

int to_int(const std::string& section, const std::string& key, const std::string& raw) {
  int v = 0;
  const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
    fail(ErrorKind::config, "[" + section + "] " + key + ": '" + raw + "' is not an integer");
  return v;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  fail(ErrorKind::config, "[" + section + "] " + key + ": '" + raw + "' is not a boolean");
}

dynamics::YawModel to_model(const std::string& section, const std::string& key, const std::string& raw) {
  if (raw == "tb") return dynamics::YawModel::TB;
  if (raw == "rlf") return dynamics::YawModel::RLF;
  if (raw == "rlfr") return dynamics::YawModel::RLFR;
  if (raw == "emp2") return dynamics::YawModel::EMP2;
  fail(ErrorKind::config, "[" + section + "] " + key + ": unknown model '" + raw + "' (tb, rlf, rlfr, emp2)");
}

PlantKind to_plant(const std::string& section, const std::string& key, const std::string& raw) {
  if (raw == "nonlinear") return PlantKind::nonlinear;
  if (raw == "linear") return PlantKind::linear;
  fail(ErrorKind::config, "[" + section + "] " + key + ": unknown plant '" + raw + "' (nonlinear, linear)");
}

using Setter = std::function<void(const std::string& section, const std::string& key, const std::string& raw)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

auto real(double& target) {
  return [&target](const std::string& s, const std::string& k, const std::string& v) { target = to_double(s, k, v); };
}
auto integer(int& target) {
  return [&target](const std::string& s, const std::string& k, const std::string& v) { target = to_int(s, k, v); };
}
auto boolean(bool& target) {
  return [&target](const std::string& s, const std::string& k, const std::string& v) { target = to_bool(s, k, v); };
}
auto degrees(double& target) {
  return [&target](const std::string& s, const std::string& k, const std::string& v) {
    target = deg2rad(to_double(s, k, v));
  };
}

void apply(const pt::ptree& section_tree, const std::string& section, const SectionTable& table) {
  for (const auto& [key, child] : section_tree) {
    if (!child.empty()) fail(ErrorKind::config, "[" + section + "] " + key + ": nested keys are not supported");
    const auto it = table.find(key);
    if (it == table.end()) fail(ErrorKind::config, "[" + section + "] unknown key '" + key + "'");
    it->second(section, key, child.data());
  }
}

}  // namespace

dynamics::VehicleParams vehicle_from_keys(const std::map<std::string, double>& keys) {
  static const std::set<std::string> known{"mass",      "inertia",   "l_f",     "l_r",     "wheelbase",
                                           "c_alpha_f", "c_alpha_r", "sigma_f", "sigma_r", "tire_radius"};
  for (const auto& [k, v] : keys)
    if (!known.count(k)) fail(ErrorKind::config, "[vehicle] unknown key '" + k + "'");

  const auto ref = dynamics::VehicleParams::reference_tractor();
  auto get = [&](const char* k, double fallback) {
    const auto it = keys.find(k);
    return it == keys.end() ? fallback : it->second;
  };
  try {
    const double mass = get("mass", ref.mass());
    const double l_f = get("l_f", ref.l_f());
    const double l_r = get("l_r", ref.l_r());
    const double radius = get("tire_radius", 0.4);
    const double inertia = keys.count("inertia") ? keys.at("inertia") : dynamics::inertia_from_geometry(mass, l_f, l_r);
    const double sigma_rule = keys.count("sigma_f") && keys.count("sigma_r") ? 0.0 : dynamics::relaxation_length_from_radius(radius);
    std::optional<double> wheelbase;
    if (keys.count("wheelbase")) wheelbase = keys.at("wheelbase");
    return dynamics::VehicleParams({.mass = mass,
                                    .inertia = inertia,
                                    .l_f = l_f,
                                    .l_r = l_r,
                                    .wheelbase = wheelbase,
                                    .c_alpha_f = get("c_alpha_f", ref.c_alpha_f()),
                                    .c_alpha_r = get("c_alpha_r", ref.c_alpha_r()),
                                    .sigma_f = get("sigma_f", sigma_rule),
                                    .sigma_r = get("sigma_r", sigma_rule)});
  } catch (const Error& e) {
    fail(ErrorKind::config, std::string("[vehicle] ") + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }

  RunConfig cfg;
  auto& ex = cfg.experiment;
  auto& act = ex.plant.steering;
  std::map<std::string, double> vehicle_keys;
  bool vehicle_given = false;

  std::string actuator_mode;
  const std::map<std::string, SectionTable, std::less<>> sections = {
      {"actuator",
       {{"mode", [&](const std::string&, const std::string&, const std::string& v) { actuator_mode = v; }},
        {"tau", real(act.tau)},
        {"dead_band_deg", degrees(act.dead_band)},
        {"rate_limit_deg_s", degrees(act.rate_limit)},
        {"max_angle_deg", degrees(act.max_angle)},
        {"resolution_deg", degrees(act.resolution)},
        {"valve_neutral", real(act.valve_neutral)},
        {"valve_span", real(act.valve_span)},
        {"valve_dead_band", real(act.valve_dead_band)},
        {"tau_speed", real(ex.plant.tau_speed)}}},
      {"mpc",
       {{"np", integer(ex.mpc.np)},
        {"nc", integer(ex.mpc.nc)},
        {"q", real(ex.mpc.q)},
        {"r", real(ex.mpc.r)},
        {"u_max_deg", real(ex.mpc.u_max_deg)},
        {"du_max_deg_s", real(ex.mpc.du_max_deg_s)},
        {"model", [&](const std::string& s, const std::string& k, const std::string& v) { ex.mpc.model = to_model(s, k, v); }},
        {"penalty",
         [&](const std::string& s, const std::string& k, const std::string& v) {
           if (v == "steady_state_deviation")
             ex.mpc.penalty = control::InputPenalty::steady_state_deviation;
           else if (v == "absolute")
             ex.mpc.penalty = control::InputPenalty::absolute;
           else
             fail(ErrorKind::config, "[" + s + "] " + k + ": unknown penalty '" + v + "'");
         }}}},
      {"pid_speed",
       {{"kp", real(ex.speed_pid.kp)},
        {"ki", real(ex.speed_pid.ki)},
        {"kd", real(ex.speed_pid.kd)},
        {"out_min", real(ex.speed_pid.out_min)},
        {"out_max", real(ex.speed_pid.out_max)},
        {"anti_windup", real(ex.speed_pid.anti_windup)}}},
      {"pi_steer",
       {{"kp", real(ex.steering_pi.kp)},
        {"ki", real(ex.steering_pi.ki)},
        {"anti_windup", real(ex.steering_pi.anti_windup)},
        {"out_min", real(ex.steering_pi.out_min)},
        {"out_max", real(ex.steering_pi.out_max)},
        {"neutral", real(ex.steering_pi.bias)}}},
      {"kinematic", {{"k_c", real(ex.kinematic.k_c)}, {"k_s", real(ex.kinematic.k_s)}}},
      {"trajectory",
       {{"speed", real(ex.trajectory.speed)},
        {"straight_len", real(ex.trajectory.straight_len)},
        {"turn_radius", real(ex.trajectory.turn_radius)},
        {"laps", integer(ex.trajectory.laps)}}},
      {"noise",
       {{"enabled", boolean(ex.noise.enabled)},
        {"gps_pos_sigma", real(ex.noise.gps_pos_sigma)},
        {"gps_vel_sigma", real(ex.noise.gps_vel_sigma)},
        {"gyro_sigma", real(ex.noise.gyro_sigma)},
        {"drift_sigma", real(ex.noise.drift_sigma)},
        {"drift_tau", real(ex.noise.drift_tau)},
        {"seed",
         [&](const std::string& s, const std::string& k, const std::string& v) {
           ex.noise.seed = static_cast<std::uint64_t>(to_double(s, k, v));
         }}}},
      {"estimation",
       {{"kf_q", real(ex.estimation.kf_q)},
        {"ekf_q_pos", real(ex.estimation.ekf_q_pos)},
        {"ekf_q_psi", real(ex.estimation.ekf_q_psi)},
        {"gps_pos_var", real(ex.estimation.gps_pos_var)},
        {"gps_vel_var", real(ex.estimation.gps_vel_var)},
        {"heading_var", real(ex.estimation.heading_var)},
        {"speed_gate", real(ex.estimation.speed_gate)}}},
      {"sim",
       {{"ts", real(ex.sim.Ts)},
        {"duration", [&](const std::string& s, const std::string& k, const std::string& v) { ex.sim.duration = to_double(s, k, v); }},
        {"plant", [&](const std::string& s, const std::string& k, const std::string& v) { ex.sim.plant = to_plant(s, k, v); }},
        {"linear_model",
         [&](const std::string& s, const std::string& k, const std::string& v) { ex.sim.linear_model = to_model(s, k, v); }},
        {"rolling_start", boolean(ex.sim.rolling_start)}}},
      {"frf",
       {{"f0", real(cfg.frf.spec.f0)},
        {"f_min", real(cfg.frf.spec.f_min)},
        {"f_max", real(cfg.frf.spec.f_max)},
        {"fs", real(cfg.frf.spec.fs)},
        {"n_periods", integer(cfg.frf.spec.n_periods)},
        {"amplitude_deg", degrees(cfg.frf.spec.amplitude)},
        {"grid",
         [&](const std::string& s, const std::string& k, const std::string& v) {
           if (v == "full")
             cfg.frf.spec.grid = signals::MultisineGrid::full;
           else if (v == "odd")
             cfg.frf.spec.grid = signals::MultisineGrid::odd;
           else if (v == "odd_odd_random")
             cfg.frf.spec.grid = signals::MultisineGrid::odd_odd_random;
           else
             fail(ErrorKind::config, "[" + s + "] " + k + ": unknown grid '" + v + "'");
         }},
        {"seed",
         [&](const std::string& s, const std::string& k, const std::string& v) {
           cfg.frf.spec.seed = static_cast<std::uint64_t>(to_double(s, k, v));
         }},
        {"speed", real(cfg.frf.speed)},
        {"plant", [&](const std::string& s, const std::string& k, const std::string& v) { cfg.frf.plant = to_plant(s, k, v); }},
        {"model", [&](const std::string& s, const std::string& k, const std::string& v) { cfg.frf.model = to_model(s, k, v); }},
        {"output_noise", real(cfg.frf.output_noise)},
        {"discard_first_period", boolean(cfg.frf.discard_first_period)},
        {"through_actuator", boolean(cfg.frf.through_actuator)}}},
      {"sysid",
       {{"n_num", integer(cfg.sysid.order.n_num)},
        {"n_den", integer(cfg.sysid.order.n_den)},
        {"weighting",
         [&](const std::string& s, const std::string& k, const std::string& v) {
           if (v == "uniform")
             cfg.sysid.weighting = sysid::Weighting::uniform;
           else if (v == "inverse_variance")
             cfg.sysid.weighting = sysid::Weighting::inverse_variance;
           else
             fail(ErrorKind::config, "[" + s + "] " + k + ": unknown weighting '" + v + "'");
         }},
        {"max_iter", integer(cfg.sysid.max_iter)},
        {"tol", real(cfg.sysid.tol)},
        {"screen_structures", boolean(cfg.sysid.screen_structures)},
        {"extract_physical", boolean(cfg.sysid.extract_physical)}}},
  };

  for (const auto& [name, child] : tree) {
    if (child.empty() && !child.data().empty()) fail(ErrorKind::config, "config: key '" + name + "' outside any section");
    if (name == "vehicle") {
      vehicle_given = true;
      for (const auto& [key, value] : child) vehicle_keys[key] = to_double("vehicle", key, value.data());
      continue;
    }
    const auto it = sections.find(name);
    if (it == sections.end()) fail(ErrorKind::config, "config: unknown section [" + name + "]");
    apply(child, name, it->second);
  }

  if (vehicle_given) ex.plant.vehicle = vehicle_from_keys(vehicle_keys);
  if (!actuator_mode.empty()) {
    if (actuator_mode == "ideal")
      act.input = dynamics::SteeringInput::ideal;
    else if (actuator_mode == "position")
      act.input = dynamics::SteeringInput::position;
    else if (actuator_mode == "valve")
      act.input = dynamics::SteeringInput::valve;
    else
      fail(ErrorKind::config, "[actuator] mode: unknown mode '" + actuator_mode + "' (ideal, position, valve)");
  }

  try {
    if (!(ex.sim.Ts > 0.0)) fail(ErrorKind::config, "[sim] ts must be positive");
    ex.speed_pid.validate();
    ex.steering_pi.validate();
    ex.kinematic.validate();
    cfg.frf.spec.validate();
    sysid::FitConfig fit;
    fit.order = cfg.sysid.order;
    fit.max_iter = cfg.sysid.max_iter;
    fit.tol = cfg.sysid.tol;
    fit.validate();
    FigureEight(ex.trajectory.speed, ex.trajectory.straight_len, ex.trajectory.turn_radius);
    if (ex.trajectory.laps < 1) fail(ErrorKind::config, "[trajectory] laps must be at least 1");
    control::MpcConfig probe{mpc_model(ex)};
    probe.np = ex.mpc.np;
    probe.nc = ex.mpc.nc;
    probe.q = ex.mpc.q;
    probe.r = ex.mpc.r;
    probe.u_max = deg2rad(ex.mpc.u_max_deg);
    probe.u_min = -probe.u_max;
    probe.du_max = deg2rad(ex.mpc.du_max_deg_s);
    probe.du_min = -probe.du_max;
    probe.Ts = ex.sim.Ts;
    probe.validate();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    fail(ErrorKind::config, std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_text(path));
}

}  // namespace agrotrack::harness
