#include "oracle.hpp"
#include "steindom/error.hpp"
#include "steindom/shrinkage.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace steindom;

namespace {

double h_of(const GeneratorSpec& g, double C, double w) {
  const double d = cumulative(g, w) + C;
  return 1.0 / (w * d * d);
}

std::vector<ShrinkageSpec> induced_specs() {
  std::vector<ShrinkageSpec> out;
  for (int p : {3, 5, 8}) {
    const double c0 = 1.0 / (p - 2);
    out.push_back(ShrinkageSpec::induced(GeneratorSpec::phi1(0.5), 1.0, p));
    out.push_back(ShrinkageSpec::induced(GeneratorSpec::phi1(2.0), c0, p));
    out.push_back(ShrinkageSpec::induced(GeneratorSpec::phi2(3.0, 2.0), c0, p));
    out.push_back(ShrinkageSpec::induced(GeneratorSpec::phi3(1.0, p), c0, p));
  }
  return out;
}

}  // namespace

TEST_CASE("phi values") {
  const int p = 5;
  CHECK(phi_value(ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 1.0 / (p - 2), p), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(phi_value(ShrinkageSpec::stein_class(1.0, 2.0, 4), 1.0) == doctest::Approx(1.0));
  CHECK(phi_value(ShrinkageSpec::james_stein(7), 3.0) == 5.0);
  CHECK(phi_value(ShrinkageSpec::positive_part(7), 3.0) == 3.0);
  for (int q = 3; q <= 12; ++q) {
    CHECK(std::abs(phi_value(ShrinkageSpec::kubokawa(q), 0.0)) < 1e-13);
  }
}

TEST_CASE("construction rules for induced factors") {
  CHECK_THROWS(ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 0.2, 5));
  CHECK_NOTHROW(ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 0.2, 5, true));
  const CustomTable dip({1.0, 2.0, 3.0}, {1.0, 0.5, 2.0});
  CHECK_THROWS(ShrinkageSpec::induced(GeneratorSpec::custom(dip), 1.0, 5));
  CHECK_THROWS(ShrinkageSpec::james_stein(2));
}

TEST_CASE("phi derivatives") {
  CHECK(phi_deriv(ShrinkageSpec::james_stein(5), 2.0) == 0.0);
  CHECK(phi_deriv(ShrinkageSpec::induced(GeneratorSpec::phi2(1.0, 1.0), 1.0, 5), 1.0) ==
        doctest::Approx(0.25));
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi1(2.0), 1.0, 6);
  const double fd = oracle::central_diff([&](double w) { return phi_value(s, w); }, 3.0, 1e-5);
  CHECK(oracle::rel_err(phi_deriv(s, 3.0), fd) < 1e-6);
}

TEST_CASE("separable ODE and gap factorisation for induced factors") {
  for (const auto& s : induced_specs()) {
    CAPTURE(s.describe());
    const auto& ind = std::get<Induced>(s.kind());
    const double m = s.p() - 2.0;
    double prev = phi_value(s, 0.0);
    CHECK(prev >= -1e-15);
    for (int i = 0; i < 200; ++i) {
      const double w = 1e-4 * std::pow(1e9, i / 199.0);
      const double phi = phi_value(s, w);
      const double Phi = eval_generator(ind.gen, w);
      CHECK(phi >= prev);
      CHECK(phi < m);
      prev = phi;
      // Independent finite difference of phi against the ODE right-hand side.
      const double fd =
          oracle::central_diff([&](double t) { return phi_value(s, t); }, w, 1e-4 * w);
      // Rounding in phi itself limits the difference quotient once phi is near p - 2.
      const double rhs = Phi / w * (m - phi) * (m - phi);
      CHECK(std::abs(fd - rhs) <= 1e-6 * rhs + 1e-11 * m / w);
      const double gap = sure_gap_js(s, w);
      const double want = h_of(ind.gen, ind.C, w) * (4.0 * Phi - 1.0);
      CHECK(std::abs(gap - want) <= 1e-10 * std::abs(want) + 1e-300);
    }
    const double big = 1e12;
    CHECK(m - phi_value(s, big) <= 1.0 / (cumulative(ind.gen, big) + ind.C) * (1 + 1e-12));
  }
}

TEST_CASE("estimator application") {
  Eigen::Vector3d x3(1, 0, 0);
  CHECK(apply_estimator(ShrinkageSpec::james_stein(3), x3).isZero());
  Eigen::Vector4d x4(1, 0, 0, 0);
  CHECK(apply_estimator(ShrinkageSpec::james_stein(4), x4).isApprox(Eigen::Vector4d(-1, 0, 0, 0)));
  CHECK(apply_estimator(ShrinkageSpec::positive_part(4), x4).isZero());
  const auto ind = ShrinkageSpec::induced(GeneratorSpec::phi3(1.0, 4), 0.5, 4);
  CHECK(apply_estimator(ind, x4).norm() < 1e-15);

  // x = 0: allowed only when phi(0) = 0.
  CHECK_THROWS_AS(apply_estimator(ShrinkageSpec::james_stein(4), Eigen::Vector4d::Zero().eval()),
                  SingularInputError);
  const auto zero_at_origin = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 0.5, 4);
  CHECK(apply_estimator(zero_at_origin, Eigen::Vector4d::Zero().eval()).isZero());

  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const auto pp = ShrinkageSpec::positive_part(6);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(6);
    for (int j = 0; j < 6; ++j) x[j] = nd(rng) * (i % 5 + 0.1);
    const double c = shrink_multiplier(pp, x.squaredNorm());
    CHECK(c >= 0.0);
    CHECK(c < 1.0);
  }

  Eigen::MatrixXd rows(2, 3);
  rows << 1, 0, 0, 2, 0, 0;
  const Eigen::MatrixXd out = apply_estimator_rows(ShrinkageSpec::james_stein(3), rows);
  CHECK(out(0, 0) == 0.0);
  CHECK(out(1, 0) == doctest::Approx(1.5));
  CHECK_THROWS(apply_estimator_rows(ShrinkageSpec::james_stein(4), rows));
}

TEST_CASE("unbiased risk estimate") {
  CHECK(sure(ShrinkageSpec::james_stein(4), 2.0) == doctest::Approx(2.0));
  CHECK(sure(ShrinkageSpec::james_stein(3), 1.0) == doctest::Approx(2.0));
  for (int p : {3, 6, 11}) {
    CHECK(sure(ShrinkageSpec::stein_class(0.0, 0.0, p), 1.7) == doctest::Approx(p));
  }
  // Positive part: phi = w below p - 2 gives p - 2 - ... = p + w - 2(p-2) - 4.
  CHECK(sure(ShrinkageSpec::positive_part(5), 1.0) == doctest::Approx(5.0 + 1.0 - 6.0 - 4.0));
}

TEST_CASE("SURE gap against James-Stein") {
  CHECK(sure_gap_js(ShrinkageSpec::james_stein(5), 3.0) == 0.0);
  const auto s1 = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 1.0, 5);
  const double l = std::log(2.0) + 1.0;
  CHECK(sure_gap_js(s1, 1.0) == doctest::Approx(1.0 / (l * l)).epsilon(1e-12));
  CHECK(sure_gap_js(s1, 1.0) == doctest::Approx(0.34883).epsilon(1e-5));
  const auto s2 = ShrinkageSpec::induced(GeneratorSpec::phi2(1.0, 1.0), 1.0, 4);
  CHECK(std::abs(sure_gap_js(s2, 0.25)) < 1e-15);
}

TEST_CASE("Kubokawa factor against the incomplete-gamma series") {
  for (int p : {3, 4, 5, 8, 12}) {
    double prev = -1.0;
    for (double w : {1e-3, 0.1, 1.0, 3.0, 10.0, 30.0, 80.0}) {
      CAPTURE(p);
      CAPTURE(w);
      const double got = phi_stein_kubokawa(p, w);
      const double want = oracle::phi_s(p, w);
      CHECK(std::abs(got - want) < 1e-11 * (p - 2));
      CHECK(got > prev);
      // Past w ~ 70 the gap to p - 2 drops below one ulp.
      CHECK(got <= p - 2.0);
      if (w <= 30.0) CHECK(got < p - 2.0);
      prev = got;
      const double fd =
          oracle::central_diff([&](double t) { return phi_stein_kubokawa(p, t); }, w, 1e-4 * w);
      CHECK(std::abs(phi_stein_kubokawa_deriv(p, w) - fd) < 1e-6 * std::abs(fd) + 1e-12);
    }
  }
  const double eps = 3.0 - phi_stein_kubokawa(5, 50.0);
  CHECK(eps > 0.0);
  CHECK(eps < 1e-6);
  // phi_S exceeds the Stein-class factor b w/(a + w), a = 1, b = p - 2, at w = 20.
  CHECK(phi_stein_kubokawa(5, 20.0) > phi_value(ShrinkageSpec::stein_class(1.0, 3.0, 5), 20.0));
}
