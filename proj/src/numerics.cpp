#include "steindom/numerics.hpp"

#include <cstdlib>
#include <limits>
#include <string>

namespace steindom {

void QuadConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(poisson_tail_mass > 0.0)) {
    throw std::invalid_argument("QuadConfig: tolerances must be positive");
  }
  if (!(poisson_tail_mass < 1e-6)) {
    throw std::invalid_argument("QuadConfig: poisson_tail_mass must be < 1e-6");
  }
  if (!(split_point > 0.0) || max_subdivisions < 1) {
    throw std::invalid_argument("QuadConfig: split_point > 0 and max_subdivisions >= 1 required");
  }
}

int default_jobs() {
  if (const char* env = std::getenv("STEIN_DOM_JOBS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) {
        return n;
      }
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

double log_chisq_pdf(double w, int df) {
  const double k = 0.5 * df;
  return (k - 1.0) * std::log(w) - 0.5 * w - k * std::numbers::ln2 - std::lgamma(k);
}

double chisq_pdf(double w, int df) {
  if (df < 1) {
    throw std::domain_error("chisq_pdf: df must be >= 1");
  }
  if (w <= 0.0) {
    if (df == 2) {
      return 0.5;
    }
    return df > 2 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(log_chisq_pdf(w, df));
}

std::vector<PoissonTerm> poisson_weights(double mean, double tail_mass) {
  if (!(mean >= 0.0)) {
    throw std::domain_error("poisson_weights: mean must be >= 0");
  }
  if (mean == 0.0) {
    return {{0, 1.0}};
  }

  const int mode = static_cast<int>(std::floor(mean));
  const double log_mean = std::log(mean);
  const double log_mode = -mean + mode * log_mean - std::lgamma(mode + 1.0);
  const double budget = 0.5 * tail_mass;

  // Downward: P(k-1) = P(k) k / mean, the left tail below k is bounded by a
  // geometric series with ratio (k-1)/mean.
  std::vector<PoissonTerm> below;
  {
    double log_pk = log_mode;
    int k = mode;
    while (k > 0) {
      const double log_prev = log_pk + std::log(static_cast<double>(k)) - log_mean;
      const double ratio = (k - 1) / mean;
      const double bound = std::exp(log_prev) / (1.0 - ratio);
      if (bound < budget) {
        break;
      }
      --k;
      log_pk = log_prev;
      below.push_back({k, std::exp(log_pk)});
    }
  }

  std::vector<PoissonTerm> terms(below.rbegin(), below.rend());
  terms.push_back({mode, std::exp(log_mode)});

  // Upward: P(k+1) = P(k) mean / (k+1); tail above k bounded with ratio
  // mean/(k+2).
  {
    double log_pk = log_mode;
    int k = mode;
    while (true) {
      const double log_next = log_pk + log_mean - std::log(k + 1.0);
      const double ratio = mean / (k + 2.0);
      const double bound = ratio < 1.0 ? std::exp(log_next) / (1.0 - ratio)
                                       : std::numeric_limits<double>::infinity();
      if (bound < budget) {
        break;
      }
      ++k;
      log_pk = log_next;
      terms.push_back({k, std::exp(log_pk)});
    }
  }
  return terms;
}

namespace detail {

std::vector<double> lower_breaks() { return {0.0, 0.3, 0.5, 0.7, 0.85, 0.95, 1.0}; }

std::vector<double> upper_breaks(int df, double split) {
  const double mode = std::max(df - 2.0, 0.0);
  const double sd = std::sqrt(2.0 * df);
  const double v_split = 1.0 / (1.0 + split);
  std::vector<double> vs{0.0, v_split};
  for (double k : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double w = mode + k * sd;
    if (w > split * 1.0001) {
      vs.push_back(1.0 / (1.0 + w));
    }
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

}  // namespace detail

RiskReport integrate_weighted(const std::function<double(double)>& f, int df,
                              const QuadConfig& cfg) {
  const auto est = integrate_chisq(f, df, cfg);
  if (!est.converged || !std::isfinite(est.value)) {
    throw NumericError("integrate_weighted: no convergence for df=" + std::to_string(df),
                       est.value, est.error);
  }
  return {est.value, est.error, 1, est.subdivisions};
}

RiskReport mixture_expectation(const std::function<double(double)>& f, int p, double lambda,
                               const QuadConfig& cfg, int jobs) {
  if (p < 3) {
    throw std::domain_error("mixture_expectation: p must be >= 3");
  }
  if (!(lambda >= 0.0)) {
    throw std::domain_error("mixture_expectation: lambda must be >= 0");
  }
  const auto terms = poisson_weights(0.5 * lambda, cfg.poisson_tail_mass);
  std::vector<RiskReport> parts(terms.size());
  parallel_for(terms.size(), jobs,
               [&](std::size_t i) { parts[i] = integrate_weighted(f, p + 2 * terms[i].k, cfg); });

  RiskReport out;
  out.terms_used = static_cast<int>(terms.size());
  out.subdivisions = 0;
  double sup_abs = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out.value += terms[i].weight * parts[i].value;
    out.err_estimate += terms[i].weight * parts[i].err_estimate;
    out.subdivisions += parts[i].subdivisions;
    sup_abs = std::max(sup_abs, std::abs(parts[i].value));
  }
  out.err_estimate += cfg.poisson_tail_mass * sup_abs;
  return out;
}

}  // namespace steindom
