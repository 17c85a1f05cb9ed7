#include "oracle.hpp"
#include "steindom/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

using namespace steindom;

namespace {

std::vector<double> log_points(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
  }
  return out;
}

std::vector<GeneratorSpec> builtins() {
  return {GeneratorSpec::phi1(0.5), GeneratorSpec::phi1(2.0),     GeneratorSpec::phi2(1.0, 0.25),
          GeneratorSpec::phi2(3.0, 2.0), GeneratorSpec::phi2(5.0, 3.0), GeneratorSpec::phi3(1.0, 4),
          GeneratorSpec::phi3(2.0, 7)};
}

}  // namespace

TEST_CASE("closed-form generator values") {
  CHECK(eval_generator(GeneratorSpec::phi1(2.0), 1.0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(eval_generator(GeneratorSpec::phi2(3.0, 2.0), 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_generator(GeneratorSpec::phi3(1.0, 4), 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(eval_generator(GeneratorSpec::phi1(1.0), -1.0), std::domain_error);
}

TEST_CASE("closed-form cumulative integrals") {
  CHECK(cumulative(GeneratorSpec::phi1(1.0), std::exp(1.0) - 1.0) == doctest::Approx(1.0));
  CHECK(cumulative(GeneratorSpec::phi2(1.0, 2.0), 1.0) == doctest::Approx(0.5));
  for (const auto& g : builtins()) {
    CHECK(cumulative(g, 0.0) == 0.0);
  }
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(GeneratorSpec::phi1(0.0));
  CHECK_THROWS(GeneratorSpec::phi2(1.0, -1.0));
  CHECK_THROWS(GeneratorSpec::phi3(1.0, 2));
}

TEST_CASE("dJ/dw matches Phi(w)/w for built-ins") {
  for (const auto& g : builtins()) {
    CAPTURE(g.describe());
    for (double w : log_points(1e-3, 1e3, 100)) {
      const double h = 1e-5 * w;
      const double fd = oracle::central_diff([&](double t) { return cumulative(g, t); }, w, h);
      CHECK(oracle::rel_err(fd, eval_generator(g, w) / w) < 1e-6);
    }
  }
}

TEST_CASE("J is non-decreasing and beta_sup bounds Phi/J") {
  for (const auto& g : builtins()) {
    CAPTURE(g.describe());
    const double beta = beta_sup(g);
    double prev = 0.0;
    for (double w : log_points(1e-6, 1e6, 200)) {
      const double j = cumulative(g, w);
      CHECK(j >= prev);
      prev = j;
      CHECK(eval_generator(g, w) / j <= beta * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("beta_sup for the three families") {
  CHECK(beta_sup(GeneratorSpec::phi2(5.0, 3.0)) == 3.0);
  CHECK(beta_sup(GeneratorSpec::phi2(1.0, 0.25)) == 0.25);
  CHECK(beta_sup(GeneratorSpec::phi1(1.0)) == 1.0);
  CHECK(beta_sup(GeneratorSpec::phi3(2.0, 5)) == 1.0);
}

TEST_CASE("tabulated Phi1 reproduces log(1 + w)") {
  // 1e4 knots on [0, 100]: the origin plus log-spaced points.
  std::vector<double> w{0.0}, phi{0.0};
  for (double t : log_points(1e-6, 100.0, 9999)) {
    w.push_back(t);
    phi.push_back(t / (t + 1.0));
  }
  const auto g = GeneratorSpec::custom(CustomTable(w, phi));
  CHECK(std::abs(cumulative(g, 50.0) - std::log(51.0)) < 1e-6);
  CHECK(is_admissible(g));
  CHECK(beta_sup(g) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK_THROWS_AS(eval_generator(g, 101.0), std::out_of_range);
  CHECK_THROWS_AS(cumulative(g, 101.0), std::out_of_range);
}

TEST_CASE("tabulated generator between knots") {
  const CustomTable t({1.0, 2.0, 4.0}, {1.0, 2.0, 2.0}, TablePolicy::hold_last);
  CHECK(t.value(0.5) == doctest::Approx(0.5));  // linear run to the origin
  CHECK(t.value(3.0) == doctest::Approx(2.0));
  CHECK(t.value(10.0) == doctest::Approx(2.0));
  // Phi(t) = t on [0, 2]: J(2) = 2; then 2 log(4/2) on [2, 4].
  CHECK(t.cumulative(2.0) == doctest::Approx(2.0));
  CHECK(t.cumulative(4.0) == doctest::Approx(2.0 + 2.0 * std::log(2.0)));
  CHECK(t.cumulative(8.0) == doctest::Approx(2.0 + 4.0 * std::log(2.0)));
  CHECK(t.is_monotone_positive());
}

TEST_CASE("tabulated generator validation") {
  CHECK_THROWS(CustomTable({1.0, 1.0}, {1.0, 2.0}));
  CHECK_THROWS(CustomTable({0.0, 1.0}, {0.5, 1.0}));  // Phi(0) must be 0
  CHECK_THROWS(CustomTable({1.0, 2.0}, {1.0}));
  const CustomTable dip({1.0, 2.0, 3.0}, {1.0, 0.5, 2.0});
  CHECK_FALSE(dip.is_monotone_positive());
  CHECK_FALSE(is_admissible(GeneratorSpec::custom(dip)));
}

TEST_CASE("CSV ingestion") {
  std::istringstream ok("w,phi_of_w\n1,0.5\n2,1\n");
  const CustomTable t = read_custom_table(ok);
  CHECK(t.knots_w().size() == 3);  // origin prepended
  CHECK(t.value(2.0) == doctest::Approx(1.0));
  std::istringstream bad_header("x,y\n1,2\n");
  CHECK_THROWS(read_custom_table(bad_header));
  std::istringstream unsorted("w,phi_of_w\n2,1\n1,0.5\n");
  CHECK_THROWS(read_custom_table(unsorted));
}
