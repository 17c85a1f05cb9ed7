#pragma once

// Exact risks under quadratic loss for X ~ N_p(theta, I). Risks depend on
// theta only through lambda = |theta|^2 and are evaluated as noncentral
// chi-squared expectations of the unbiased risk estimate.

#include "steindom/generators.hpp"
#include "steindom/numerics.hpp"
#include "steindom/shrinkage.hpp"

#include <iosfwd>
#include <vector>

namespace steindom {

struct RiskCurve {
  int p;
  ShrinkageSpec spec;
  std::vector<double> lambdas;
  std::vector<RiskReport> values;
};

RiskReport risk(const ShrinkageSpec& spec, double lambda, const QuadConfig& cfg = {},
                int jobs = 1);

/// R(theta, JS) - R(theta, spec), integrating the SURE gap directly.
RiskReport risk_gap_js(const ShrinkageSpec& spec, double lambda, const QuadConfig& cfg = {},
                       int jobs = 1);

/// Mean of Phi under the density proportional to h(w) w^{df/2-1} e^{-w/2},
/// h(w) = 1/(w (J(w) + C)^2). With df = p this is I(Phi, C; p).
RiskReport h_weighted_mean(const GeneratorSpec& gen, double C, int df, const QuadConfig& cfg = {});

RiskReport i_ratio(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg = {});

/// Risk difference at theta = 0: (4 I - 1) int h g_p.
RiskReport rdiff0(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg = {});

/// (p - 6)/(a (p - 2)), a lower bound on I for the linear generator with
/// C = 1/(p-2); valid for p >= 7.
double i_lower_bound_phi3(double a, int p);
/// 2(12 - a)/(4 - a): the bound reaches 1/4 exactly when p is at least this.
double phi3_bound_threshold(double a);
/// i_lower_bound_phi3(a, p) >= 1/4, evaluated through the threshold form.
bool phi3_bound_reaches_quarter(double a, int p);

/// Geometric grid {0, start, 2 start, ..., <= stop}.
std::vector<double> geometric_lambda_grid(double start, double stop);

RiskCurve risk_curve(const ShrinkageSpec& spec, const std::vector<double>& lambdas,
                     const QuadConfig& cfg = {}, int jobs = 1);
/// Columns lambda,risk,err,terms.
void write_risk_curve_csv(std::ostream& os, const RiskCurve& curve);

}  // namespace steindom
