#pragma once

// Shrinkage factors phi(w) for estimators (1 - phi(|x|^2)/|x|^2) x, their
// derivatives, Stein's unbiased risk estimate and its gap to James-Stein.

#include "steindom/error.hpp"
#include "steindom/generators.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <string>
#include <variant>

namespace steindom {

struct JamesStein {};
struct JamesSteinPositivePart {};
/// phi(w) = b w / (a + w).
struct SteinClass {
  double a;
  double b;
};
/// phi(w) = p - 2 - 1 / (J(w) + C).
struct Induced {
  GeneratorSpec gen;
  double C;
};
/// Generalized Bayes shrinkage under the prior |theta|^{2-p}.
struct KubokawaStein {};

class ShrinkageSpec {
 public:
  using Kind = std::variant<JamesStein, JamesSteinPositivePart, SteinClass, Induced, KubokawaStein>;

  static ShrinkageSpec james_stein(int p);
  static ShrinkageSpec positive_part(int p);
  static ShrinkageSpec stein_class(double a, double b, int p);
  /// Rejects C < 1/(p-2) and non-monotone generators unless `unchecked`.
  static ShrinkageSpec induced(GeneratorSpec gen, double C, int p, bool unchecked = false);
  static ShrinkageSpec kubokawa(int p);

  int p() const noexcept { return p_; }
  const Kind& kind() const noexcept { return kind_; }
  std::string describe() const;

 private:
  ShrinkageSpec(Kind k, int p) : kind_(std::move(k)), p_(p) {}
  Kind kind_;
  int p_;
};

/// Smallest constant of integration allowed for an induced factor.
inline double min_integration_constant(int p) { return 1.0 / (p - 2); }

double phi_value(const ShrinkageSpec& spec, double w);
double phi_deriv(const ShrinkageSpec& spec, double w);
/// p - 2 - phi(w), computed without cancellation for induced factors.
double shortfall(const ShrinkageSpec& spec, double w);

/// Unbiased risk estimate p + (phi/w)(phi - 2(p-2)) - 4 phi'.
double sure(const ShrinkageSpec& spec, double w);
/// sure(JS) - sure(spec) = 4 phi' - (p - 2 - phi)^2 / w.
double sure_gap_js(const ShrinkageSpec& spec, double w);

/// Kubokawa's phi_S(w) = p - 2 - 2 / int_0^1 (1-t)^{p/2-2} e^{wt/2} dt.
double phi_stein_kubokawa(int p, double w);
double phi_stein_kubokawa_deriv(int p, double w);

/// Scalar multiplier 1 - phi(w)/w (clamped at 0 for the positive part).
double shrink_multiplier(const ShrinkageSpec& spec, double w);

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> apply_estimator(
    const ShrinkageSpec& spec, const Eigen::MatrixBase<Derived>& x) {
  if (x.size() != spec.p()) {
    throw std::invalid_argument("apply_estimator: vector length must equal p");
  }
  const double w = static_cast<double>(x.squaredNorm());
  return x * static_cast<typename Derived::Scalar>(shrink_multiplier(spec, w));
}

/// Row-wise application to an n x p matrix of observations.
Eigen::MatrixXd apply_estimator_rows(const ShrinkageSpec& spec, const Eigen::MatrixXd& rows);

}  // namespace steindom
