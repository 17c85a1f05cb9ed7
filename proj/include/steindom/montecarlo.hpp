#pragma once

// Seeded Monte Carlo risk estimates for X ~ N_p(theta, I) with
// theta = (sqrt(lambda), 0, ..., 0). Replications are split into fixed-size
// streams, each with its own engine, so results do not depend on the number
// of worker threads.

#include "steindom/shrinkage.hpp"

#include <cstdint>
#include <string>

namespace steindom {

enum class McMode { loss_sampling, sure_averaging };

struct McConfig {
  std::uint64_t n_reps = 100000;
  std::uint64_t seed = 1;
  int p = 3;
  double lambda = 0.0;
  ShrinkageSpec estimator = ShrinkageSpec::james_stein(3);
  McMode mode = McMode::loss_sampling;

  /// n_reps >= 100, lambda >= 0, estimator.p() == p.
  void validate() const;
};

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
};

/// Replications per stream.
inline constexpr std::uint64_t kMcStreamSize = 65536;

McResult mc_risk(const McConfig& cfg, int jobs = 1);

/// R(theta, JS) - R(theta, estimator) from paired draws.
McResult mc_gap_js(const McConfig& cfg, int jobs = 1);

/// {"mean":..,"stderr":..,"n":..,"seed":..}
std::string to_json(const McResult& r);

McMode parse_mc_mode(const std::string& text);

}  // namespace steindom
