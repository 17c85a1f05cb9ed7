#pragma once

#include "steindom/error.hpp"
#include "steindom/parallel.hpp"
#include "steindom/quadrature.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace steindom {

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  double poisson_tail_mass = 1e-12;
  double split_point = 1.0;
  int max_subdivisions = 2000;

  void validate() const;
};

struct RiskReport {
  double value = 0.0;
  double err_estimate = 0.0;
  int terms_used = 1;
  int subdivisions = 0;
};

struct PoissonTerm {
  int k;
  double weight;
};

/// Density of the central chi-squared distribution with `df` degrees of
/// freedom, evaluated through its logarithm.
double chisq_pdf(double w, int df);
double log_chisq_pdf(double w, int df);

/// Poisson(mean) masses on a contiguous range around the mode. The excluded
/// mass on both sides together is below `tail_mass`.
std::vector<PoissonTerm> poisson_weights(double mean, double tail_mass);

namespace detail {

// Panel boundaries in the transformed variables used by integrate_chisq.
std::vector<double> lower_breaks();
std::vector<double> upper_breaks(int df, double split);

}  // namespace detail

/// Integral of f(w) g_df(w) over (0, inf), Value = double or Eigen array.
///
/// (0, split] is handled in u = log w (compactified by u = t/(1-t)) so that
/// integrands behaving like 1/w at the origin become smooth; [split, inf) is
/// mapped through v = 1/(1+w). The upper panels are seeded around the bulk
/// of the chi-squared mass so large df is resolved from the first pass.
template <typename F>
auto integrate_chisq(F&& f, int df, const QuadConfig& cfg) {
  using Value = std::decay_t<decltype(f(1.0))>;
  if (df < 1) {
    throw std::domain_error("integrate_chisq: df must be >= 1");
  }
  const double half_df = 0.5 * df;
  const double log_norm = -half_df * std::numbers::ln2 - std::lgamma(half_df);
  const double split = cfg.split_point;
  const double log_split = std::log(split);
  const Value zero = quad::detail::zero_like(f(split));

  // (0, split]: w = split * exp(-t/(1-t)), dw = -w/(1-t)^2 dt.
  auto lower = [&](double t) -> Value {
    const double one_minus = 1.0 - t;
    const double u = t / one_minus;
    const double log_w = log_split - u;
    const double log_weight =
        log_norm + (half_df - 1.0) * log_w - 0.5 * std::exp(log_w) + log_w -
        2.0 * std::log(one_minus);
    const double weight = std::exp(log_weight);
    if (weight == 0.0) {
      return zero;
    }
    const double w = std::exp(log_w);
    if (w == 0.0) {
      return zero;
    }
    return Value(f(w) * weight);
  };

  // [split, inf): w = 1/v - 1, dw = -dv/v^2.
  auto upper = [&](double v) -> Value {
    const double log_w = std::log1p(-v) - std::log(v);
    const double w = (1.0 - v) / v;
    const double log_weight =
        log_norm + (half_df - 1.0) * log_w - 0.5 * w - 2.0 * std::log(v);
    const double weight = std::exp(log_weight);
    if (weight == 0.0 || !std::isfinite(w)) {
      return zero;
    }
    return Value(f(w) * weight);
  };

  const auto lb = detail::lower_breaks();
  const auto ub = detail::upper_breaks(df, split);
  // Each half gets half the absolute budget.
  auto lo = quad::adaptive_gk15(lower, lb, 0.5 * cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);
  auto hi = quad::adaptive_gk15(upper, ub, 0.5 * cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions);

  quad::Estimate<Value> out;
  out.value = lo.value + hi.value;
  out.error = lo.error + hi.error;
  out.subdivisions = lo.subdivisions + hi.subdivisions;
  const Value tol = quad::detail::tolerance(out.value, cfg.abs_tol, cfg.rel_tol);
  out.converged = quad::detail::max_coeff(Value(out.error / tol)) <= 1.0 ||
                  (lo.converged && hi.converged);
  return out;
}

/// Scalar front end over integrate_chisq; throws NumericError when the
/// tolerance is not met within cfg.max_subdivisions panels.
RiskReport integrate_weighted(const std::function<double(double)>& f, int df,
                              const QuadConfig& cfg);

/// E f(W) for W ~ noncentral chi-squared(p, lambda), expanded as a
/// Poisson(lambda/2) mixture of central chi-squared(p + 2k) laws. Per-term
/// integrals may run on `jobs` threads; the sum is always taken in ascending
/// k so the result does not depend on scheduling.
RiskReport mixture_expectation(const std::function<double(double)>& f, int p, double lambda,
                               const QuadConfig& cfg, int jobs = 1);

}  // namespace steindom
