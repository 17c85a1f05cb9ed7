#include "steindom/montecarlo.hpp"

#include "steindom/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace steindom {

namespace {

// Own uniform and normal transforms: the standard distributions are not
// specified bit-for-bit across library implementations.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Welford& o) {
    if (o.n == 0) {
      return;
    }
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    const double tot = na + nb;
    mean += d * nb / tot;
    m2 += o.m2 + d * d * na * nb / tot;
    n += o.n;
  }
};

double loss(const ShrinkageSpec& spec, const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
  const double c = shrink_multiplier(spec, x.squaredNorm());
  return (c * x - theta).squaredNorm();
}

// Runs `draw(x, theta)` over all replications, stream by stream.
template <typename Draw>
McResult run(const McConfig& cfg, int jobs, Draw draw) {
  cfg.validate();
  const std::uint64_t streams = (cfg.n_reps + kMcStreamSize - 1) / kMcStreamSize;
  std::vector<Welford> acc(streams);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(cfg.p);
  theta[0] = std::sqrt(cfg.lambda);

  parallel_for(streams, jobs, [&](std::size_t s) {
    NormalStream rng(cfg.seed, s);
    const std::uint64_t first = s * kMcStreamSize;
    const std::uint64_t count = std::min(kMcStreamSize, cfg.n_reps - first);
    Eigen::VectorXd x(cfg.p);
    Welford w;
    for (std::uint64_t i = 0; i < count; ++i) {
      for (int j = 0; j < cfg.p; ++j) {
        x[j] = theta[j] + rng.next();
      }
      w.add(draw(x, theta));
    }
    acc[s] = w;
  });

  Welford total;
  for (const auto& w : acc) {
    total.merge(w);
  }
  const double n = static_cast<double>(total.n);
  const double var = total.n > 1 ? total.m2 / (n - 1.0) : 0.0;
  return {total.mean, std::sqrt(var / n), total.n, cfg.seed};
}

}  // namespace

void McConfig::validate() const {
  if (n_reps < 100) {
    throw std::invalid_argument("monte carlo: n_reps must be >= 100");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("monte carlo: lambda must be finite and >= 0");
  }
  if (estimator.p() != p) {
    throw std::invalid_argument("monte carlo: estimator dimension differs from p");
  }
}

McResult mc_risk(const McConfig& cfg, int jobs) {
  const auto& spec = cfg.estimator;
  if (cfg.mode == McMode::loss_sampling) {
    return run(cfg, jobs, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
      return loss(spec, x, theta);
    });
  }
  return run(cfg, jobs, [&](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return sure(spec, x.squaredNorm());
  });
}

McResult mc_gap_js(const McConfig& cfg, int jobs) {
  const auto& spec = cfg.estimator;
  const ShrinkageSpec js = ShrinkageSpec::james_stein(cfg.p);
  if (cfg.mode == McMode::loss_sampling) {
    return run(cfg, jobs, [&](const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
      return loss(js, x, theta) - loss(spec, x, theta);
    });
  }
  return run(cfg, jobs, [&](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    return sure_gap_js(spec, x.squaredNorm());
  });
}

std::string to_json(const McResult& r) {
  nlohmann::ordered_json j;
  j["mean"] = r.mean;
  j["stderr"] = r.std_error;
  j["n"] = r.n;
  j["seed"] = r.seed;
  return j.dump();
}

McMode parse_mc_mode(const std::string& text) {
  if (text == "loss_sampling" || text == "loss") return McMode::loss_sampling;
  if (text == "sure_averaging" || text == "sure") return McMode::sure_averaging;
  throw std::invalid_argument("mode must be loss_sampling or sure_averaging");
}

}  // namespace steindom
