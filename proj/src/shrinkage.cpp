#include "steindom/shrinkage.hpp"

#include "steindom/quadrature.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace steindom {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dimension(int p) {
  if (p < 3) {
    throw std::invalid_argument("shrinkage: dimension p must be >= 3");
  }
}

// E0 = int_0^1 s^{a-1} e^{-ws/2} ds and E1 = int_0^1 (1-s)/2 s^{a-1} e^{-ws/2} ds
// with a = p/2 - 1, after s = r^2. Then D(w) = e^{w/2} E0 and D'(w) = e^{w/2} E1.
Eigen::Array2d kubokawa_integrals(int p, double w) {
  const double a = 0.5 * p - 1.0;
  auto integrand = [&](double r) -> Eigen::Array2d {
    const double r2 = r * r;
    const double base = 2.0 * std::pow(r, 2.0 * a - 1.0) * std::exp(-0.5 * w * r2);
    return {base, 0.5 * (1.0 - r2) * base};
  };
  std::vector<double> breaks{0.0};
  if (w > 1.0) {
    const double scale = 1.0 / std::sqrt(w);
    for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      if (k * scale < 1.0) {
        breaks.push_back(k * scale);
      }
    }
  }
  breaks.push_back(1.0);
  const auto est = quad::adaptive_gk15(integrand, breaks, 1e-300, 1e-13, 500);
  if (!est.converged) {
    throw NumericError("phi_stein_kubokawa: quadrature did not converge", est.value[0],
                       est.error[0]);
  }
  return est.value;
}

// a = 0 is the constant factor b.
double stein_class_phi(const SteinClass& s, double w) {
  return s.a == 0.0 ? s.b : s.b * w / (s.a + w);
}

double kubokawa_shortfall(int p, double w) {
  const Eigen::Array2d e = kubokawa_integrals(p, w);
  return 2.0 * std::exp(-0.5 * w - std::log(e[0]));
}

}  // namespace

ShrinkageSpec ShrinkageSpec::james_stein(int p) {
  require_dimension(p);
  return {JamesStein{}, p};
}

ShrinkageSpec ShrinkageSpec::positive_part(int p) {
  require_dimension(p);
  return {JamesSteinPositivePart{}, p};
}

ShrinkageSpec ShrinkageSpec::stein_class(double a, double b, int p) {
  require_dimension(p);
  if (!(a >= 0.0) || !(b >= 0.0)) {
    throw std::invalid_argument("stein_class: a and b must be non-negative");
  }
  return {SteinClass{a, b}, p};
}

ShrinkageSpec ShrinkageSpec::induced(GeneratorSpec gen, double C, int p, bool unchecked) {
  require_dimension(p);
  if (!(C > 0.0)) {
    throw std::invalid_argument("induced: C must be positive");
  }
  if (!unchecked) {
    if (C < min_integration_constant(p) * (1.0 - 1e-12)) {
      throw std::invalid_argument("induced: C must be >= 1/(p-2)");
    }
    if (!is_admissible(gen)) {
      throw std::invalid_argument("induced: generator must be positive and non-decreasing");
    }
  }
  return {Induced{std::move(gen), C}, p};
}

ShrinkageSpec ShrinkageSpec::kubokawa(int p) {
  require_dimension(p);
  return {KubokawaStein{}, p};
}

std::string ShrinkageSpec::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const JamesStein&) { os << "james-stein"; },
                 [&](const JamesSteinPositivePart&) { os << "james-stein-positive-part"; },
                 [&](const SteinClass& s) { os << "stein-class(a=" << s.a << ",b=" << s.b << ")"; },
                 [&](const Induced& s) { os << "induced(" << s.gen.describe() << ",C=" << s.C << ")"; },
                 [&](const KubokawaStein&) { os << "kubokawa-stein"; },
             },
             kind_);
  os << " p=" << p_;
  return os.str();
}

double shortfall(const ShrinkageSpec& spec, double w) {
  const double m = spec.p() - 2.0;
  return std::visit(Overloaded{
                        [](const JamesStein&) { return 0.0; },
                        [&](const JamesSteinPositivePart&) { return std::max(m - w, 0.0); },
                        [&](const SteinClass& s) { return m - stein_class_phi(s, w); },
                        [&](const Induced& s) { return 1.0 / (cumulative(s.gen, w) + s.C); },
                        [&](const KubokawaStein&) { return kubokawa_shortfall(spec.p(), w); },
                    },
                    spec.kind());
}

double phi_value(const ShrinkageSpec& spec, double w) {
  if (!(w >= 0.0)) {
    throw std::domain_error("phi_value: w must be >= 0");
  }
  const double m = spec.p() - 2.0;
  return std::visit(Overloaded{
                        [&](const JamesStein&) { return m; },
                        [&](const JamesSteinPositivePart&) { return std::min(m, w); },
                        [&](const SteinClass& s) { return stein_class_phi(s, w); },
                        [&](const auto&) { return m - shortfall(spec, w); },
                    },
                    spec.kind());
}

double phi_deriv(const ShrinkageSpec& spec, double w) {
  if (!(w > 0.0)) {
    throw std::domain_error("phi_deriv: w must be > 0");
  }
  const double m = spec.p() - 2.0;
  return std::visit(Overloaded{
                        [](const JamesStein&) { return 0.0; },
                        [&](const JamesSteinPositivePart&) { return w < m ? 1.0 : 0.0; },
                        [&](const SteinClass& s) {
                          const double d = s.a + w;
                          return s.a * s.b / (d * d);
                        },
                        [&](const Induced& s) {
                          // Separable ODE: d/dw 1/(p-2-phi) = Phi(w)/w.
                          const double sf = 1.0 / (cumulative(s.gen, w) + s.C);
                          return eval_generator(s.gen, w) / w * sf * sf;
                        },
                        [&](const KubokawaStein&) { return phi_stein_kubokawa_deriv(spec.p(), w); },
                    },
                    spec.kind());
}

double sure(const ShrinkageSpec& spec, double w) {
  if (!(w > 0.0)) {
    throw std::domain_error("sure: w must be > 0");
  }
  // phi (phi - 2(p-2)) = s^2 - (p-2)^2 with s = p - 2 - phi.
  const double m = spec.p() - 2.0;
  const double s = shortfall(spec, w);
  return spec.p() + (s * s - m * m) / w - 4.0 * phi_deriv(spec, w);
}

double sure_gap_js(const ShrinkageSpec& spec, double w) {
  if (!(w > 0.0)) {
    throw std::domain_error("sure_gap_js: w must be > 0");
  }
  if (std::holds_alternative<JamesStein>(spec.kind())) {
    return 0.0;
  }
  const double s = shortfall(spec, w);
  return 4.0 * phi_deriv(spec, w) - s * s / w;
}

double phi_stein_kubokawa(int p, double w) {
  require_dimension(p);
  if (!(w >= 0.0)) {
    throw std::domain_error("phi_stein_kubokawa: w must be >= 0");
  }
  return (p - 2.0) - kubokawa_shortfall(p, w);
}

double phi_stein_kubokawa_deriv(int p, double w) {
  require_dimension(p);
  if (!(w >= 0.0)) {
    throw std::domain_error("phi_stein_kubokawa_deriv: w must be >= 0");
  }
  // phi_S' = 2 D'/D^2 = 2 E1 e^{-w/2} / E0^2.
  const Eigen::Array2d e = kubokawa_integrals(p, w);
  return 2.0 * e[1] * std::exp(-0.5 * w - 2.0 * std::log(e[0]));
}

double shrink_multiplier(const ShrinkageSpec& spec, double w) {
  if (!(w >= 0.0)) {
    throw std::domain_error("shrink_multiplier: w must be >= 0");
  }
  if (w == 0.0) {
    const double phi0 = phi_value(spec, 0.0);
    if (std::abs(phi0) > 1e-12 * (spec.p() - 2.0)) {
      throw SingularInputError("apply_estimator: x = 0 with phi(0) != 0");
    }
    return 1.0;
  }
  const double mult = 1.0 - phi_value(spec, w) / w;
  if (std::holds_alternative<JamesSteinPositivePart>(spec.kind())) {
    return std::max(0.0, mult);
  }
  return mult;
}

Eigen::MatrixXd apply_estimator_rows(const ShrinkageSpec& spec, const Eigen::MatrixXd& rows) {
  if (rows.cols() != spec.p()) {
    throw std::invalid_argument("apply_estimator_rows: column count must equal p");
  }
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out.row(i) = rows.row(i) * shrink_multiplier(spec, rows.row(i).squaredNorm());
  }
  return out;
}

}  // namespace steindom
