#include "steindom/montecarlo.hpp"
#include "steindom/risk.hpp"

#include <doctest.h>

#include <cmath>

using namespace steindom;

namespace {

McConfig config(ShrinkageSpec s, double lambda, std::uint64_t n, McMode mode = McMode::loss_sampling,
                std::uint64_t seed = 11) {
  return {n, seed, s.p(), lambda, s, mode};
}

}  // namespace

TEST_CASE("unbiased estimator") {
  for (int p : {3, 6}) {
    const auto r = mc_risk(config(ShrinkageSpec::stein_class(0.0, 0.0, p), 4.0, 100000));
    CHECK(std::abs(r.mean - p) <= 4.0 * r.std_error);
  }
}

TEST_CASE("James-Stein at the origin") {
  const auto r = mc_risk(config(ShrinkageSpec::james_stein(5), 0.0, 1000000));
  CHECK(std::abs(r.mean - 2.0) <= 4.0 * r.std_error);
  CHECK(r.n == 1000000);
}

TEST_CASE("three estimates of one risk") {
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 1.0, 5);
  const auto loss = mc_risk(config(s, 9.0, 400000));
  const auto sure = mc_risk(config(s, 9.0, 400000, McMode::sure_averaging, 12));
  const double exact = risk(s, 9.0).value;
  CHECK(std::abs(loss.mean - sure.mean) <= 4.0 * std::hypot(loss.std_error, sure.std_error));
  CHECK(std::abs(loss.mean - exact) <= 4.0 * loss.std_error);
  CHECK(std::abs(sure.mean - exact) <= 4.0 * sure.std_error);
}

TEST_CASE("loss sampling and SURE averaging agree across configurations") {
  const std::vector<ShrinkageSpec> specs{
      ShrinkageSpec::james_stein(4), ShrinkageSpec::positive_part(4),
      ShrinkageSpec::induced(GeneratorSpec::phi1(0.5), 1.0, 4),
      ShrinkageSpec::induced(GeneratorSpec::phi2(1.0, 0.5), 1.0 / 4, 6),
      ShrinkageSpec::induced(GeneratorSpec::phi3(2.0, 6), 1.0 / 4, 6),
      ShrinkageSpec::stein_class(1.0, 2.0, 4)};
  for (const auto& s : specs) {
    for (double lambda : {0.0, 16.0}) {
      CAPTURE(s.describe());
      CAPTURE(lambda);
      const auto a = mc_risk(config(s, lambda, 100000, McMode::loss_sampling, 3));
      const auto b = mc_risk(config(s, lambda, 100000, McMode::sure_averaging, 4));
      CHECK(std::abs(a.mean - b.mean) <= 4.0 * std::hypot(a.std_error, b.std_error));
    }
  }
}

TEST_CASE("paired gap estimates") {
  const auto self = mc_gap_js(config(ShrinkageSpec::james_stein(5), 3.0, 10000));
  CHECK(self.mean == 0.0);
  CHECK(self.std_error == 0.0);

  const auto star = mc_gap_js(config(ShrinkageSpec::induced(GeneratorSpec::phi1(0.5), 1.0, 3), 0.0, 1000000));
  CHECK(star.mean >= -4.0 * star.std_error);

  const auto pp = mc_gap_js(config(ShrinkageSpec::positive_part(5), 0.0, 1000000));
  CHECK(pp.mean > 4.0 * pp.std_error);

  // Pairing: the gap's standard error is far below that of a single risk.
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 1.0, 5);
  const auto gap = mc_gap_js(config(s, 100.0, 100000));
  const auto single = mc_risk(config(s, 100.0, 100000));
  CHECK(gap.std_error * 10.0 < single.std_error);
  const auto sure_gap = mc_gap_js(config(s, 9.0, 100000, McMode::sure_averaging));
  const auto sure_single = mc_risk(config(s, 9.0, 100000, McMode::sure_averaging));
  CHECK(sure_gap.std_error * 10.0 < sure_single.std_error);
}

TEST_CASE("reproducibility") {
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi2(3.0, 2.0), 1.0 / 3, 5);
  const auto cfg = config(s, 2.0, 200000);
  const auto a = mc_risk(cfg, 1);
  const auto b = mc_risk(cfg, 3);
  const auto c = mc_risk(cfg, 1);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean == c.mean);
  auto other = cfg;
  other.seed = 12;
  CHECK(mc_risk(other).mean != a.mean);
}

TEST_CASE("standard error scales as 1/sqrt(n)") {
  const auto s = ShrinkageSpec::positive_part(5);
  const double e4 = mc_risk(config(s, 1.0, 10000)).std_error;
  const double e5 = mc_risk(config(s, 1.0, 100000)).std_error;
  const double e6 = mc_risk(config(s, 1.0, 1000000)).std_error;
  CHECK(std::abs(e4 / e5 / std::sqrt(10.0) - 1.0) < 0.2);
  CHECK(std::abs(e5 / e6 / std::sqrt(10.0) - 1.0) < 0.2);
}

TEST_CASE("configuration checks and JSON") {
  CHECK_THROWS(mc_risk(config(ShrinkageSpec::james_stein(5), 0.0, 99)));
  auto bad = config(ShrinkageSpec::james_stein(5), 0.0, 1000);
  bad.p = 6;
  CHECK_THROWS(mc_risk(bad));
  const std::string j = to_json({1.5, 0.25, 1000, 7});
  CHECK(j == R"({"mean":1.5,"stderr":0.25,"n":1000,"seed":7})");
  CHECK(parse_mc_mode("sure_averaging") == McMode::sure_averaging);
  CHECK_THROWS(parse_mc_mode("bogus"));
}
