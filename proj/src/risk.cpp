#include "steindom/risk.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace steindom {

namespace {

// sure(spec, w) - p without the cancellation of adding and removing p.
double sure_excess(const ShrinkageSpec& spec, double w) {
  const double m = spec.p() - 2.0;
  const double s = shortfall(spec, w);
  return (s * s - m * m) / w - 4.0 * phi_deriv(spec, w);
}

void require_p(int p) {
  if (p < 3) {
    throw std::domain_error("risk: p must be >= 3");
  }
}

// Integrals of {Phi h, h} against g_df on a shared mesh.
quad::Estimate<Eigen::Array2d> phi_h_moments(const GeneratorSpec& gen, double C, int df,
                                             const QuadConfig& cfg) {
  if (!(C > 0.0)) {
    throw std::domain_error("C must be positive");
  }
  auto integrand = [&](double w) -> Eigen::Array2d {
    const double denom = cumulative(gen, w) + C;
    const double h = 1.0 / (w * denom * denom);
    return {eval_generator(gen, w) * h, h};
  };
  auto est = integrate_chisq(integrand, df, cfg);
  if (!est.converged || !est.value.allFinite()) {
    throw NumericError("phi_h_moments: no convergence", est.value[0], est.error[0]);
  }
  return est;
}

}  // namespace

RiskReport risk(const ShrinkageSpec& spec, double lambda, const QuadConfig& cfg, int jobs) {
  require_p(spec.p());
  RiskReport r = mixture_expectation([&](double w) { return sure_excess(spec, w); }, spec.p(),
                                     lambda, cfg, jobs);
  r.value += spec.p();
  return r;
}

RiskReport risk_gap_js(const ShrinkageSpec& spec, double lambda, const QuadConfig& cfg, int jobs) {
  require_p(spec.p());
  return mixture_expectation([&](double w) { return sure_gap_js(spec, w); }, spec.p(), lambda,
                             cfg, jobs);
}

RiskReport h_weighted_mean(const GeneratorSpec& gen, double C, int df, const QuadConfig& cfg) {
  const auto est = phi_h_moments(gen, C, df, cfg);
  const double num = est.value[0];
  const double den = est.value[1];
  const double ratio = num / den;
  const double err = (est.error[0] + std::abs(ratio) * est.error[1]) / den;
  return {ratio, err, 1, est.subdivisions};
}

RiskReport i_ratio(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg) {
  require_p(p);
  return h_weighted_mean(gen, C, p, cfg);
}

RiskReport rdiff0(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg) {
  require_p(p);
  // (4 N/D - 1) D with N = int Phi h g_p and D = int h g_p.
  const auto est = phi_h_moments(gen, C, p, cfg);
  return {4.0 * est.value[0] - est.value[1], 4.0 * est.error[0] + est.error[1], 1,
          est.subdivisions};
}

double i_lower_bound_phi3(double a, int p) {
  if (p < 7) {
    throw std::domain_error("i_lower_bound_phi3: bound established only for p >= 7");
  }
  if (!(a > 0.0)) {
    throw std::domain_error("i_lower_bound_phi3: a must be positive");
  }
  return (p - 6.0) / (a * (p - 2.0));
}

double phi3_bound_threshold(double a) {
  if (!(a > 0.0) || !(a < 4.0)) {
    throw std::domain_error("phi3_bound_threshold: requires 0 < a < 4");
  }
  return 2.0 * (12.0 - a) / (4.0 - a);
}

bool phi3_bound_reaches_quarter(double a, int p) {
  if (p < 7 || !(a > 0.0) || !(a < 4.0)) {
    return false;
  }
  return p >= phi3_bound_threshold(a);
}

std::vector<double> geometric_lambda_grid(double start, double stop) {
  if (!(start > 0.0) || stop < start) {
    throw std::invalid_argument("geometric_lambda_grid: need 0 < start <= stop");
  }
  std::vector<double> out{0.0};
  for (double l = start; l <= stop * (1.0 + 1e-12); l *= 2.0) {
    out.push_back(l);
  }
  return out;
}

RiskCurve risk_curve(const ShrinkageSpec& spec, const std::vector<double>& lambdas,
                     const QuadConfig& cfg, int jobs) {
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) {
      throw std::invalid_argument("risk_curve: lambdas must be strictly increasing");
    }
  }
  RiskCurve curve{spec.p(), spec, lambdas, std::vector<RiskReport>(lambdas.size())};
  parallel_for(lambdas.size(), jobs,
               [&](std::size_t i) { curve.values[i] = risk(spec, lambdas[i], cfg, 1); });
  return curve;
}

void write_risk_curve_csv(std::ostream& os, const RiskCurve& curve) {
  os << "lambda,risk,err,terms\n";
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (std::size_t i = 0; i < curve.lambdas.size(); ++i) {
    const auto& r = curve.values[i];
    os << curve.lambdas[i] << ',' << r.value << ',' << r.err_estimate << ',' << r.terms_used
       << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace steindom
