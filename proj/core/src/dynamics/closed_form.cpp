#include "agrotrack/dynamics/closed_form.hpp"

#include <cmath>

#include "agrotrack/errors.hpp"

namespace agrotrack::dynamics {
namespace {

struct Line {
  const char* name;
  double published;
  double reconstructed;
  bool typo;
};

// Ascending order: b_0, b_1, (b_2), a_0, a_1, ..., a_n.
std::vector<Line> lines(const VehicleParams& p, double v, YawModel variant) {
  const double m = p.mass(), I = p.inertia(), lf = p.l_f(), lr = p.l_r(), L = lf + lr;
  const double cf = p.c_alpha_f(), cr = p.c_alpha_r(), sf = p.sigma_f(), sr = p.sigma_r();

  if (variant == YawModel::RLF) {
    const double b0 = cf * cr * L / (I * m * sf);
    const double b1 = cf * lf * v / (I * sf);
    const double a0 = (m * v * v * (-cf * lf + cr * lr) + cf * cr * L * L) / (I * m * v * sf);
    const double a1 = (I * (cf + cr) + m * (cf * lf * lf + cr * lr * lr) + cr * lr * m * sf) / (I * m * sf);
    // Printed without a denominator.
    const double a2_printed = I * m * v * v + cr * lr * lr * m * sf + I * cr * sf;
    const double a2 = a2_printed / (I * m * v * sf);
    return {{"b0<>", b0, b0, false}, {"b1<>", b1, b1, false}, {"a0<>", a0, a0, false},
            {"a1<>", a1, a1, false}, {"a2<>", a2_printed, a2, true}, {"a3<>", 1.0, 1.0, false}};
  }
  if (variant == YawModel::RLFR) {
    const double den = I * m * sf * sr;
    const double b0 = cf * cr * L * v / den;
    const double b1 = cf * lf * v * v / (I * sf * sr);
    const double b2 = cf * lf * v / (I * sf);
    // Printed without the m v^2 (C_r l_r - C_f l_f) term present in a0<>.
    const double a0_printed = cf * cr * L * L / den;
    const double a0 = (cf * cr * L * L + m * v * v * (cr * lr - cf * lf)) / den;
    // Printed with v_x multiplying only the m(...) group.
    const double a1_printed =
        (I * (cf + cr) + m * v * (cf * lf * lf + cr * lr * lr - cf * lf * sr + cr * lr * sf)) / den;
    const double a1 = v * (I * (cf + cr) + m * (cf * lf * lf + cr * lr * lr - cf * lf * sr + cr * lr * sf)) / den;
    const double a2 = (I * (m * v * v + cf * sr + cr * sf) + m * (cf * lf * lf * sr + cr * lr * lr * sf)) / den;
    const double a3 = (sf + sr) * v / (sf * sr);
    return {{"b0*", b0, b0, false},          {"b1*", b1, b1, false},          {"b2*", b2, b2, false},
            {"a0*", a0_printed, a0, true},   {"a1*", a1_printed, a1, true},   {"a2*", a2, a2, false},
            {"a3*", a3, a3, false},          {"a4*", 1.0, 1.0, false}};
  }
  fail(ErrorKind::domain, "closed-form coefficients exist only for RLF and RLFR");
}

double rel_err(double a, double ref) {
  const double scale = std::abs(ref) > 0.0 ? std::abs(ref) : 1.0;
  return std::abs(a - ref) / scale;
}

}  // namespace

RationalTF closed_form_coefficients(const VehicleParams& params, double v_x, YawModel variant) {
  if (!(v_x > 0.0)) fail(ErrorKind::domain, "closed_form_coefficients: v_x must be positive");
  const auto ls = lines(params, v_x, variant);
  const std::size_t n_num = variant == YawModel::RLF ? 2 : 3;
  std::vector<double> num, den;
  for (std::size_t i = n_num; i-- > 0;) num.push_back(ls[i].published);
  for (std::size_t i = ls.size(); i-- > n_num;) den.push_back(ls[i].published);
  return RationalTF(std::move(num), std::move(den));
}

ClosedFormCheck closed_form_cross_check(const VehicleParams& params, double v_x, YawModel variant) {
  if (!(v_x > 0.0)) fail(ErrorKind::domain, "closed_form_cross_check: v_x must be positive");
  const auto ls = lines(params, v_x, variant);
  const RationalTF derived = tf_from_ss(linearize_yaw(params, v_x, variant));
  const std::size_t n_num = variant == YawModel::RLF ? 2 : 3;

  ClosedFormCheck check{variant, {}};
  for (std::size_t i = 0; i < ls.size(); ++i) {
    double d = 0.0;
    if (i < n_num) {
      const auto& num = derived.num();
      if (i < num.size()) d = num[num.size() - 1 - i];
    } else {
      const auto& den = derived.den();
      const std::size_t k = i - n_num;
      d = den[den.size() - 1 - k];
    }
    check.coefficients.push_back({ls[i].name, d, ls[i].published, ls[i].reconstructed, rel_err(ls[i].published, d),
                                  rel_err(ls[i].reconstructed, d), ls[i].typo});
  }
  return check;
}

bool ClosedFormCheck::consistent(double tol) const {
  for (const auto& c : coefficients) {
    if (c.reconstructed_rel_error > tol) return false;
    if (!c.known_typo && c.rel_error > tol) return false;
  }
  return true;
}

}  // namespace agrotrack::dynamics
