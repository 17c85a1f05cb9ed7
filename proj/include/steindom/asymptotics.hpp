#pragma once

// Large-w behaviour of the unbiased-risk gap for the built-in generator
// families. With the right scaling s(w) the gap s(w) (R_JS - R_phi) tends to
// a constant that does not depend on C.

#include "steindom/dominance.hpp"
#include "steindom/shrinkage.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace steindom {

enum class Scaling { w_log_sq, w_pow_1_plus_gamma, w_pow_2 };

struct AsymptoteSpec {
  GeneratorFamily family;
  FamilyParams params;
  int p;
  Scaling scaling;
  double predicted_limit;
};

struct PredictedLimit {
  double value;
  // Phi1 only: limit is positive on (lo, hi) and maximal at `argmax`.
  std::optional<double> band_lo, band_hi, argmax, max_value;
};

PredictedLimit predicted_limit(GeneratorFamily family, const FamilyParams& params, int p);
AsymptoteSpec make_asymptote_spec(GeneratorFamily family, const FamilyParams& params, int p);

/// s(w) * sure_gap_js(spec, w) for an induced factor from Phi1, Phi2 or Phi3.
double scaled_gap(const ShrinkageSpec& spec, double w);

struct ConvergencePoint {
  double w;
  double scaled_gap;
  double rel_dev;
};

struct ConvergenceReport {
  AsymptoteSpec spec;
  double C;
  std::vector<ConvergencePoint> points;
  double extrapolated;
  double rel_dev;  // of the extrapolated value
  bool monotone;   // |scaled_gap - limit| non-increasing along w
};

/// Defaults: {1e6, 1e8, 1e10, 1e12} for Phi1, {1e3, 1e4, 1e5} otherwise.
std::vector<double> default_w_sequence(GeneratorFamily family);

/// Polynomial extrapolation to w = infinity in x = 1/log w (Phi1), w^-gamma
/// (Phi2) or 1/w (Phi3).
ConvergenceReport verify_limit(GeneratorFamily family, const FamilyParams& params, double C, int p,
                               const std::vector<double>& w_sequence);

/// Columns w,scaled_gap,predicted,rel_dev.
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

}  // namespace steindom
