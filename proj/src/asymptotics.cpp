#include "steindom/asymptotics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace steindom {

namespace {

void check_params(GeneratorFamily family, const FamilyParams& prm, int p) {
  if (p < 3) {
    throw std::domain_error("asymptotics: p must be >= 3");
  }
  // The factories validate the parameters.
  (void)make_generator(family, prm, p);
}

// w^g / (w^g / (g b^g) + C)^2 * (4 (w/b)^g - 1), kept finite for large w^g.
double power_gap(double b, double g, double C, double w) {
  const double lw = std::log(w);
  const double lj = g * (lw - std::log(b)) - std::log(g);  // log J
  const double j = std::exp(lj);
  const double t = std::exp(g * (lw - std::log(b)));  // Phi
  return std::exp(g * lw - 2.0 * std::log(j + C)) * (4.0 * t - 1.0);
}

// Value at x = 0 of the interpolating polynomial through (xs, ys).
double neville_at_zero(std::vector<double> xs, std::vector<double> ys) {
  const std::size_t n = xs.size();
  for (std::size_t k = 1; k < n; ++k) {
    for (std::size_t i = 0; i + k < n; ++i) {
      ys[i] = (xs[i + k] * ys[i] - xs[i] * ys[i + 1]) / (xs[i + k] - xs[i]);
    }
  }
  return ys[0];
}

}  // namespace

PredictedLimit predicted_limit(GeneratorFamily family, const FamilyParams& params, int p) {
  check_params(family, params, p);
  switch (family) {
    case GeneratorFamily::phi1: {
      const double b = params.b;
      return {-b * b + 4.0 * b, 0.0, 4.0, 2.0, 4.0};
    }
    case GeneratorFamily::phi2:
      return {4.0 * params.gamma * params.gamma * std::pow(params.b, params.gamma), {}, {}, {}, {}};
    case GeneratorFamily::phi3:
      return {4.0 * params.a * (p - 2.0), {}, {}, {}, {}};
  }
  throw std::logic_error("predicted_limit: unknown family");
}

AsymptoteSpec make_asymptote_spec(GeneratorFamily family, const FamilyParams& params, int p) {
  const Scaling s = family == GeneratorFamily::phi1   ? Scaling::w_log_sq
                    : family == GeneratorFamily::phi2 ? Scaling::w_pow_1_plus_gamma
                                                      : Scaling::w_pow_2;
  return {family, params, p, s, predicted_limit(family, params, p).value};
}

double scaled_gap(const ShrinkageSpec& spec, double w) {
  if (!(w > 0.0)) {
    throw std::domain_error("scaled_gap: w must be > 0");
  }
  const auto* ind = std::get_if<Induced>(&spec.kind());
  if (ind == nullptr) {
    throw std::invalid_argument("scaled_gap: spec must be an induced factor");
  }
  const double C = ind->C;
  const auto& fam = ind->gen.family();
  if (const auto* g = std::get_if<Phi1>(&fam)) {
    // w (log w)^2 h(w) (4 Phi - 1) with h = 1/(w (J + C)^2).
    const double b = g->b;
    const double r = std::log(w) / (std::log1p(w) / b + C);
    return r * r * (((4.0 - b) * w - b) / (b * (w + 1.0)));
  }
  if (const auto* g = std::get_if<Phi2>(&fam)) {
    return power_gap(g->b, g->gamma, C, w);
  }
  if (const auto* g = std::get_if<Phi3>(&fam)) {
    // Phi3 is Phi2 with gamma = 1 and b = a (p - 2).
    return power_gap(g->a * (g->p - 2), 1.0, C, w);
  }
  throw std::invalid_argument("scaled_gap: tabulated generators have no closed-form scaling");
}

std::vector<double> default_w_sequence(GeneratorFamily family) {
  if (family == GeneratorFamily::phi1) {
    return {1e6, 1e8, 1e10, 1e12};
  }
  return {1e3, 1e4, 1e5};
}

ConvergenceReport verify_limit(GeneratorFamily family, const FamilyParams& params, double C, int p,
                               const std::vector<double>& w_sequence) {
  if (w_sequence.size() < 3) {
    throw std::invalid_argument("verify_limit: need at least 3 points");
  }
  for (std::size_t i = 0; i < w_sequence.size(); ++i) {
    if (!(w_sequence[i] > 1.0) || (i > 0 && !(w_sequence[i] > w_sequence[i - 1]))) {
      throw std::invalid_argument("verify_limit: w must be increasing and > 1");
    }
  }
  if (w_sequence.back() < 100.0 * w_sequence.front()) {
    throw std::invalid_argument("verify_limit: w sequence must span at least two decades");
  }

  const AsymptoteSpec aspec = make_asymptote_spec(family, params, p);
  const ShrinkageSpec spec =
      ShrinkageSpec::induced(make_generator(family, params, p), C, p, /*unchecked=*/true);
  const double limit = aspec.predicted_limit;
  auto rel = [&](double v) { return limit == 0.0 ? std::abs(v) : std::abs(v - limit) / std::abs(limit); };

  ConvergenceReport rep{aspec, C, {}, 0.0, 0.0, true};
  std::vector<double> xs, ys;
  for (double w : w_sequence) {
    const double v = scaled_gap(spec, w);
    rep.points.push_back({w, v, rel(v)});
    switch (family) {
      case GeneratorFamily::phi1:
        xs.push_back(1.0 / std::log(w));
        break;
      case GeneratorFamily::phi2:
        xs.push_back(std::pow(w, -params.gamma));
        break;
      case GeneratorFamily::phi3:
        xs.push_back(1.0 / w);
        break;
    }
    ys.push_back(v);
  }
  for (std::size_t i = 1; i < rep.points.size(); ++i) {
    if (std::abs(rep.points[i].scaled_gap - limit) >
        std::abs(rep.points[i - 1].scaled_gap - limit) * (1.0 + 1e-12)) {
      rep.monotone = false;
    }
  }
  rep.extrapolated = neville_at_zero(xs, ys);
  rep.rel_dev = rel(rep.extrapolated);
  return rep;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << "w,scaled_gap,predicted,rel_dev\n" << std::setprecision(17);
  for (const auto& pt : report.points) {
    os << pt.w << ',' << pt.scaled_gap << ',' << report.spec.predicted_limit << ',' << pt.rel_dev
       << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace steindom
