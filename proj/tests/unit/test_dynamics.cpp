#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "agrotrack/control/discretize.hpp"
#include "agrotrack/dynamics/closed_form.hpp"
#include "agrotrack/dynamics/linear_models.hpp"
#include "agrotrack/dynamics/plant.hpp"
#include "agrotrack/dynamics/vehicle.hpp"
#include "agrotrack/errors.hpp"
#include "agrotrack/units.hpp"
#include "support.hpp"

using namespace agrotrack;
using namespace agrotrack::dynamics;
using agrotrack::testing::rel_err;

namespace {

VehicleParams reference() { return VehicleParams::reference_tractor(); }

PlantConfig ideal_plant() {
  PlantConfig cfg;
  cfg.steering.input = SteeringInput::ideal;
  return cfg;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an agrotrack::Error";
  return ErrorKind::io;
}

}  // namespace

TEST(VehicleParams, ReferenceTractorValues) {
  const auto p = reference();
  EXPECT_EQ(p.mass(), 700.0);
  EXPECT_EQ(p.inertia(), 280.0);
  EXPECT_EQ(p.l_f(), 1.0);
  EXPECT_EQ(p.l_r(), 0.4);
  EXPECT_EQ(p.c_alpha_f(), 8000.0);
  EXPECT_EQ(p.c_alpha_r(), 90000.0);
  EXPECT_EQ(p.sigma_f(), 0.1942);
  EXPECT_EQ(p.sigma_r(), 1.6657);
  EXPECT_DOUBLE_EQ(p.wheelbase(), 1.4);
}

TEST(VehicleParams, RejectsNonPositiveAndInconsistentWheelbase) {
  VehicleParams::Init init{.mass = 700, .inertia = 280, .l_f = 1, .l_r = 0.4, .wheelbase = std::nullopt,
                           .c_alpha_f = 8000, .c_alpha_r = 90000, .sigma_f = 0.2, .sigma_r = 1.6};
  EXPECT_NO_THROW(VehicleParams{init});
  auto bad = init;
  bad.mass = 0.0;
  EXPECT_EQ(kind_of([&] { VehicleParams{bad}; }), ErrorKind::domain);
  bad = init;
  bad.sigma_r = -1.0;
  EXPECT_EQ(kind_of([&] { VehicleParams{bad}; }), ErrorKind::domain);
  bad = init;
  bad.wheelbase = 1.5;
  EXPECT_EQ(kind_of([&] { VehicleParams{bad}; }), ErrorKind::domain);
  bad.wheelbase = 1.4;
  EXPECT_NO_THROW(VehicleParams{bad});
}

TEST(InertiaFromGeometry, Examples) {
  EXPECT_DOUBLE_EQ(inertia_from_geometry(700, 1.0, 0.4), 280.0);
  EXPECT_DOUBLE_EQ(inertia_from_geometry(1, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(inertia_from_geometry(1200, 1.2, 0.9), 1296.0);
  EXPECT_EQ(kind_of([] { inertia_from_geometry(0, 1, 1); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { inertia_from_geometry(1, -1, 1); }), ErrorKind::domain);
}

TEST(RelaxationLength, OneAndAHalfTireRadii) { EXPECT_DOUBLE_EQ(relaxation_length_from_radius(0.4), 0.6); }

TEST(AlgebraicSlip, Examples) {
  const auto p = reference();
  TractorState s;
  s.v_x = 1.0;
  s.delta = 0.1;
  auto [af, ar] = algebraic_slip_angles(s, p);
  EXPECT_DOUBLE_EQ(af, -0.1);
  EXPECT_DOUBLE_EQ(ar, 0.0);

  s = {};
  s.v_y = 0.2;
  s.gamma = 0.5;
  s.v_x = 2.0;
  EXPECT_DOUBLE_EQ(algebraic_slip_angles(s, p).second, 0.0);

  s = {};
  s.v_y = 0.1;
  s.gamma = 0.2;
  s.v_x = 2.0;
  s.delta = 0.05;
  EXPECT_NEAR(algebraic_slip_angles(s, p).first, 0.1, 1e-15);
}

TEST(AlgebraicSlip, SingularSpeed) {
  TractorState s;
  s.v_x = 0.01;
  EXPECT_EQ(kind_of([&] { algebraic_slip_angles(s, reference()); }), ErrorKind::singular_speed);
  s.v_x = -0.049;
  EXPECT_EQ(kind_of([&] { algebraic_slip_angles(s, reference()); }), ErrorKind::singular_speed);
}

TEST(PlantDerivative, EquilibriumIsZero) {
  const auto d = plant_derivative(TractorState{}, {}, PlantConfig{});
  EXPECT_EQ(d, TractorState{});
}

TEST(PlantDerivative, FrontSlipResponseToSteering) {
  const PlantConfig cfg;
  TractorState s;
  s.v_x = 1.0;
  s.delta = 0.1;
  const auto d = plant_derivative(s, {0.1, 1.0}, cfg);
  EXPECT_NEAR(d.alpha_f, -0.1 / cfg.vehicle.sigma_f(), 1e-12);
  EXPECT_EQ(d.alpha_r, 0.0);
}

TEST(PlantDerivative, NoSingularityAtStandstill) {
  TractorState s;
  s.alpha_f = 0.3;
  s.alpha_r = -0.2;
  s.delta = 0.4;
  const auto d = plant_derivative(s, {}, PlantConfig{});
  EXPECT_EQ(d.alpha_f, 0.0);
  EXPECT_EQ(d.alpha_r, 0.0);
}

TEST(PlantDerivative, MirrorSymmetry) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const PlantConfig cfg;
  for (int i = 0; i < 50; ++i) {
    TractorState s;
    s.x = 10 * u(rng);
    s.y = 10 * u(rng);
    s.psi = 2 * u(rng);
    s.v_x = 1.0 + u(rng);
    s.v_y = u(rng);
    s.gamma = u(rng);
    s.alpha_f = 0.2 * u(rng);
    s.alpha_r = 0.2 * u(rng);
    s.delta = u(rng);
    TractorState m = s;
    m.y = -s.y;
    m.psi = -s.psi;
    m.v_y = -s.v_y;
    m.gamma = -s.gamma;
    m.alpha_f = -s.alpha_f;
    m.alpha_r = -s.alpha_r;
    m.delta = -s.delta;
    const auto d = plant_derivative(s, {s.delta, 1.0}, cfg);
    const auto dm = plant_derivative(m, {m.delta, 1.0}, cfg);
    EXPECT_EQ(dm.x, d.x);
    EXPECT_EQ(dm.y, -d.y);
    EXPECT_EQ(dm.psi, -d.psi);
    EXPECT_EQ(dm.v_x, d.v_x);
    EXPECT_EQ(dm.v_y, -d.v_y);
    EXPECT_EQ(dm.gamma, -d.gamma);
    EXPECT_EQ(dm.alpha_f, -d.alpha_f);
    EXPECT_EQ(dm.alpha_r, -d.alpha_r);
  }
}

TEST(IntegratePlant, ZeroStaysZero) {
  EXPECT_EQ(integrate_plant(TractorState{}, {}, PlantConfig{}, 0.37), TractorState{});
  EXPECT_EQ(kind_of([] { integrate_plant(TractorState{}, {}, PlantConfig{}, 0.0); }), ErrorKind::domain);
}

TEST(IntegratePlant, StraightRun) {
  TractorState s;
  s.v_x = 1.0;
  const auto cfg = ideal_plant();
  for (int k = 0; k < 200; ++k) s = integrate_plant(s, {0.0, 1.0}, cfg, 0.05);
  EXPECT_NEAR(s.x, 10.0, 1e-9);
  EXPECT_LT(std::abs(s.y), 1e-9);
}

TEST(IntegratePlant, BlowupNamesTheField) {
  TractorState s;
  s.v_x = std::numeric_limits<double>::infinity();
  try {
    integrate_plant(s, {0.0, 1.0}, ideal_plant(), 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::integration_blowup);
    EXPECT_NE(std::string(e.what()).find("'"), std::string::npos);
  }
}

namespace {

double held_steering_gap(const VehicleParams& p) {
  PlantConfig cfg = ideal_plant();
  cfg.vehicle = p;
  TractorState s;
  s.v_x = 1.0;
  for (int k = 0; k < 200; ++k) s = integrate_plant(s, {0.05, 1.0}, cfg, 0.05);
  const double dc = tf_from_ss(linearize_yaw(p, 1.0, YawModel::RLFR)).dc_gain();
  return rel_err(s.gamma, 0.05 * dc);
}

}  // namespace

TEST(IntegratePlant, HeldSteeringReachesLinearSteadyStateStableTires) {
  EXPECT_LT(held_steering_gap(reference().with_tires(6000, 28600, 0.0964, 0.6526)), 0.02);
}

// The reference tractor's RLFR linearization has a lightly unstable tire mode,
// so the held-steering transient grows instead of settling.
TEST(IntegratePlant, HeldSteeringReachesLinearSteadyStateReferenceTractor) {
  EXPECT_LT(held_steering_gap(reference()), 0.02);
}

TEST(SteeringActuator, PositionServoRespectsLimits) {
  SteeringActuatorParams a;  // position servo defaults
  TractorState s;
  double prev = 0.0;
  for (int k = 0; k < 400; ++k) {
    s = steering_actuator_step(s, deg2rad(80.0), a, 0.01);
    EXPECT_LE(std::abs(s.delta - prev), a.rate_limit * 0.01 + 1e-15);
    EXPECT_LE(std::abs(s.delta), a.max_angle + 1e-15);
    prev = s.delta;
  }
  EXPECT_GE(s.delta, a.max_angle - a.dead_band - 1e-9);
}

TEST(SteeringActuator, DeadBandHoldsSmallErrors) {
  SteeringActuatorParams a;
  TractorState s;
  s = steering_actuator_step(s, deg2rad(0.4), a, 0.01);
  EXPECT_EQ(s.delta, 0.0);
}

TEST(SteeringActuator, MeasurementQuantizedToOneDegree) {
  SteeringActuatorParams a;
  EXPECT_DOUBLE_EQ(measure_steering(deg2rad(10.4), a), deg2rad(10.0));
  EXPECT_DOUBLE_EQ(measure_steering(deg2rad(-2.6), a), deg2rad(-3.0));
}

TEST(LinearizeYaw, StateDimensions) {
  const auto p = reference();
  EXPECT_EQ(linearize_yaw(p, 1.0, YawModel::TB).states(), 2);
  EXPECT_EQ(linearize_yaw(p, 1.0, YawModel::RLF).states(), 3);
  const auto rlfr = linearize_yaw(p, 1.0, YawModel::RLFR);
  EXPECT_EQ(rlfr.states(), 4);
  EXPECT_EQ(rlfr.outputs(), 1);
  EXPECT_EQ(rlfr.C(0, 1), 1.0);  // output is gamma
  EXPECT_EQ(tf_from_ss(linearize_yaw(p, 1.0, YawModel::RLF)).order(), 3);
  EXPECT_EQ(kind_of([&] { linearize_yaw(p, 0.0, YawModel::RLF); }), ErrorKind::domain);
}

TEST(LinearizeYaw, TraditionalBicycleDcGainConsistent) {
  const auto ss = linearize_yaw(reference(), 1.0, YawModel::TB);
  const auto tf = tf_from_ss(ss);
  const double from_coeffs = tf.num().back() / tf.den().back();
  const double direct = (-ss.C * ss.A.inverse() * ss.B)(0, 0);
  EXPECT_LT(rel_err(from_coeffs, direct), 1e-12);
}

// Steady-state bicycle gain v / (L + K v^2), with the understeer gradient
// K = m (l_r C_r - l_f C_f) / (L C_f C_r). Independent closed form.
TEST(LinearizeYaw, AllPhysicalVariantsShareTheBicycleDcGain) {
  const auto p = reference();
  for (double v : {0.5, 1.0, 2.0}) {
    const double L = p.wheelbase();
    const double K = p.mass() * (p.l_r() * p.c_alpha_r() - p.l_f() * p.c_alpha_f()) / (L * p.c_alpha_f() * p.c_alpha_r());
    const double expected = v / (L + K * v * v);
    for (auto m : {YawModel::TB, YawModel::RLF, YawModel::RLFR})
      EXPECT_LT(rel_err(tf_from_ss(linearize_yaw(p, v, m)).dc_gain(), expected), 1e-9) << to_string(m) << " v=" << v;
  }
}

TEST(TfFromSs, Integrator) {
  const StateSpace ss(Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                      Eigen::MatrixXd::Zero(1, 1));
  const auto tf = tf_from_ss(ss);
  EXPECT_EQ(tf.num(), std::vector<double>{1.0});
  EXPECT_EQ(tf.den(), (std::vector<double>{1.0, 0.0}));
}

TEST(TfFromSs, EmpiricalModelRoundTrip) {
  const auto tf = tf_from_ss(ss_from_tf(empirical_second_order()));
  ASSERT_EQ(tf.den().size(), 3u);
  EXPECT_NEAR(tf.den()[1], 10.9, 1e-12);
  EXPECT_NEAR(tf.den()[2], 242.0, 1e-12);
  ASSERT_EQ(tf.num().size(), 1u);
  EXPECT_NEAR(tf.num()[0], 291.0, 1e-12);
}

TEST(TfFromSs, RejectsMimo) {
  const StateSpace ss(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(1, 2),
                      Eigen::MatrixXd::Zero(1, 2));
  EXPECT_EQ(kind_of([&] { tf_from_ss(ss); }), ErrorKind::dimension);
}

TEST(TfFromSs, MatchesResolventOnRandomSystems) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::MatrixXd A(n, n), B(n, 1), C(1, n);
    for (int i = 0; i < n; ++i) {
      B(i, 0) = g(rng);
      C(0, i) = g(rng);
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
    }
    const StateSpace ss(A, B, C, Eigen::MatrixXd::Zero(1, 1));
    const auto tf = tf_from_ss(ss);
    EXPECT_EQ(tf.den().front(), 1.0);
    for (double w : {0.3, 1.7, 9.0}) {
      const std::complex<double> s(0.1, w);
      const auto a = tf(s), b = agrotrack::testing::ss_response(ss, s);
      EXPECT_LT(std::abs(a - b), 1e-9 * std::max(1.0, std::abs(b)));
    }
  }
}

TEST(RationalTf, CanonicalForm) {
  const RationalTF tf({2.0, 4.0}, {2.0, 6.0, 8.0});
  EXPECT_EQ(tf.den(), (std::vector<double>{1.0, 3.0, 4.0}));
  EXPECT_EQ(tf.num(), (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(kind_of([] { RationalTF({1.0, 0.0}, {1.0, 1.0}); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { RationalTF({1.0}, {0.0}); }), ErrorKind::domain);
}

TEST(VariantsProperty, MonicAndStrictlyProperForRandomParameters) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  const auto p = reference();
  for (int i = 0; i < 40; ++i) {
    const auto q = p.with_tires(p.c_alpha_f() * scale(rng), p.c_alpha_r() * scale(rng), p.sigma_f() * scale(rng),
                                p.sigma_r() * scale(rng));
    const double v = 0.3 + 2.0 * scale(rng);
    for (auto m : {YawModel::TB, YawModel::RLF, YawModel::RLFR, YawModel::EMP2}) {
      const auto tf = tf_from_ss(linearize_yaw(q, v, m));
      EXPECT_EQ(tf.den().front(), 1.0);
      EXPECT_LT(tf.num_degree(), tf.order());
    }
  }
}

TEST(ClosedForm, StarredNumeratorLeadingCoefficient) {
  const auto tf = closed_form_coefficients(reference(), 1.0, YawModel::RLFR);
  // C_af l_f v_x / (I sigma_f)
  EXPECT_NEAR(tf.num().front(), 8000.0 * 1.0 * 1.0 / (280.0 * 0.1942), 1e-9);
  EXPECT_NEAR(tf.num().front(), 147.13, 1e-2);
}

TEST(ClosedForm, MonicDenominators) {
  EXPECT_EQ(closed_form_coefficients(reference(), 1.3, YawModel::RLF).den().front(), 1.0);
  EXPECT_EQ(closed_form_coefficients(reference(), 1.3, YawModel::RLFR).den().front(), 1.0);
  EXPECT_EQ(closed_form_coefficients(reference(), 1.3, YawModel::RLF).order(), 3);
  EXPECT_EQ(closed_form_coefficients(reference(), 1.3, YawModel::RLFR).order(), 4);
}

TEST(ClosedForm, DiamondConstantVanishesForLongRelaxation) {
  const auto p = reference();
  const double b0_small = closed_form_coefficients(p, 1.0, YawModel::RLF).num().back();
  const double b0_large = closed_form_coefficients(p.with_tires(8000, 90000, 1e9, 1.6657), 1.0, YawModel::RLF).num().back();
  EXPECT_LT(std::abs(b0_large), 1e-6 * std::abs(b0_small));
}

TEST(ClosedForm, DomainErrors) {
  EXPECT_EQ(kind_of([] { closed_form_coefficients(reference(), 0.0, YawModel::RLF); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { closed_form_coefficients(reference(), 1.0, YawModel::TB); }), ErrorKind::domain);
}

TEST(ClosedForm, CrossCheckAgainstStateSpace) {
  for (double v : {0.5, 1.0, 1.7}) {
    for (auto m : {YawModel::RLF, YawModel::RLFR}) {
      const auto check = closed_form_cross_check(reference(), v, m);
      EXPECT_TRUE(check.consistent(1e-9)) << to_string(m) << " v=" << v;
      int typos = 0;
      for (const auto& c : check.coefficients) {
        if (c.known_typo) {
          ++typos;
          EXPECT_LT(c.reconstructed_rel_error, 1e-9) << c.name;
        } else {
          EXPECT_LT(c.rel_error, 1e-9) << c.name;
        }
      }
      EXPECT_EQ(typos, m == YawModel::RLF ? 1 : 2);
    }
  }
}

TEST(PoleZero, FirstOrderLag) {
  const auto pz = pole_zero_analysis(RationalTF({1.0}, {1.0, 1.0}));
  ASSERT_EQ(pz.poles.size(), 1u);
  EXPECT_NEAR(pz.poles[0].real(), -1.0, 1e-14);
  EXPECT_TRUE(pz.zeros.empty());
}

TEST(PoleZero, EmpiricalModelPoles) {
  const auto pz = pole_zero_analysis(empirical_second_order());
  ASSERT_EQ(pz.poles.size(), 2u);
  const double im = std::sqrt(242.0 - 10.9 * 10.9 / 4.0);
  EXPECT_NEAR(pz.poles[0].real(), -5.45, 1e-12);
  EXPECT_NEAR(pz.poles[0].imag(), -im, 1e-12);
  EXPECT_NEAR(pz.poles[1].imag(), im, 1e-12);
  EXPECT_NEAR(im, 14.58, 1e-2);
}

TEST(PoleZero, CancellationFlagged) {
  const auto pz = pole_zero_analysis(RationalTF({1.0, 2.0004}, {1.0, 5.0, 6.0}));
  ASSERT_EQ(pz.cancellations.size(), 1u);
  EXPECT_NEAR(pz.cancellations[0].pole.real(), -2.0, 1e-12);
}

// Poles of the reference-tractor RLFR model at 1 and 2 m/s.
TEST(PoleZero, RlfrMaxPoleRealDecreasesFromOneToTwoMetresPerSecond) {
  const auto at = [](double v) {
    return pole_zero_analysis(tf_from_ss(linearize_yaw(reference(), v, YawModel::RLFR))).max_pole_real();
  };
  EXPECT_LT(at(2.0), at(1.0));
}

TEST(SpeedTrend, MaxPoleRealNonIncreasingPerVariant) {
  for (auto m : {YawModel::TB, YawModel::RLF, YawModel::RLFR, YawModel::EMP2}) {
    double prev = INFINITY;
    for (double v : {1.0, 1.25, 1.5, 1.75, 2.0}) {
      const double r = pole_zero_analysis(tf_from_ss(linearize_yaw(reference(), v, m))).max_pole_real();
      EXPECT_LE(r, prev + 1e-12) << to_string(m) << " at v=" << v;
      prev = r;
    }
  }
}

TEST(SmallSignal, NonlinearPlantMatchesRlfrLinearization) {
  const auto p = reference();
  PlantConfig cfg = ideal_plant();
  const auto d = control::discretize(linearize_yaw(p, 1.0, YawModel::RLFR), 0.05);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(4);
  TractorState s;
  s.v_x = 1.0;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double delta = deg2rad(2.0) * std::sin(2.0 * std::numbers::pi * 0.3 * k * 0.05);
    const double y_lin = (d.C * z)(0, 0);
    num += (s.gamma - y_lin) * (s.gamma - y_lin);
    den += y_lin * y_lin;
    s = integrate_plant(s, {delta, 1.0}, cfg, 0.05);
    z = d.A * z + d.B.col(0) * delta;
  }
  EXPECT_LT(std::sqrt(num / den), 0.05);
}

TEST(IdentifiedModels, PublishedCoefficients) {
  const auto rlfr = identified_yaw_model(YawModel::RLFR);
  EXPECT_EQ(rlfr.num(), (std::vector<double>{279, 335, 27860}));
  EXPECT_EQ(rlfr.den(), (std::vector<double>{1, 11.5, 347, 1311, 23340}));
  EXPECT_EQ(identified_yaw_model(YawModel::RLF).order(), 3);
  EXPECT_EQ(identified_yaw_model(YawModel::EMP2).den(), empirical_second_order().den());
  EXPECT_EQ(kind_of([] { identified_yaw_model(YawModel::TB); }), ErrorKind::domain);
}
