#include "steindom/dominance.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace steindom;

namespace {

const std::vector<double> kGrid = log_grid(1e-3, 1e4, 400);

std::map<int, Sign> column_signs(GeneratorFamily f, const FamilyParams& prm, const CMode& mode, int upto) {
  std::map<int, Sign> out;
  for (int p = 3; p < upto; ++p) {
    out[p] = sign_of(rdiff0(make_generator(f, prm, p), mode.at(p), p));
  }
  return out;
}

CellVerdict cell(GeneratorFamily f, const FamilyParams& prm, const CMode& mode, int p) {
  return classify_cell(f, prm, mode, p, column_signs(f, prm, mode, p));
}

std::vector<MarkGrid> reference(const std::string& name) {
  std::ifstream in(std::string(STEINDOM_TEST_DATA) + "/" + name);
  REQUIRE(in.good());
  return parse_text(in);
}

}  // namespace

TEST_CASE("conditions for an induced factor") {
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 1.0 / 3, 5);
  const auto r = check_conditions(s, kGrid);
  for (int k : {1, 2, 4, 6}) CHECK(r.condition(k).status == Status::holds);
  CHECK(r.condition(3).status == Status::holds);
  CHECK(r.condition(7).status == Status::holds);
  REQUIRE(r.origin_gap);
  CHECK(r.origin_gap->value > 0.0);
}

TEST_CASE("Stein-class factors") {
  const auto a5 = check_conditions(ShrinkageSpec::stein_class(1.0, 3.0, 5), kGrid);
  CHECK(a5.condition(5).status == Status::fails);
  REQUIRE(a5.condition(5).witness);
  CHECK(*a5.condition(5).witness > 1.0);

  const auto a3 = check_conditions(ShrinkageSpec::stein_class(0.0, 4.1, 4), kGrid);
  CHECK(a3.condition(3).status == Status::fails);
  // A.4 fails too (limit 4.1 != 2), so A.6 and A.7 are not evaluated.
  CHECK(a3.condition(4).status == Status::fails);
  CHECK(a3.condition(6).status == Status::not_applicable);
  CHECK(a3.condition(7).status == Status::not_applicable);
}

TEST_CASE("linear generator fails A.5 at large w") {
  const auto r = check_conditions(ShrinkageSpec::induced(GeneratorSpec::phi3(1.0, 8), 1.0 / 6, 8), kGrid);
  CHECK(r.condition(5).status == Status::fails);
}

TEST_CASE("James-Stein and its positive part") {
  const auto js = check_conditions(ShrinkageSpec::james_stein(5), kGrid);
  CHECK(js.condition(6).status == Status::not_applicable);
  CHECK(js.condition(7).status == Status::holds);
  REQUIRE(js.origin_gap);
  CHECK(js.origin_gap->value == 0.0);

  const auto pp = check_conditions(ShrinkageSpec::positive_part(5), kGrid);
  CHECK(pp.condition(7).status == Status::holds);
  CHECK(pp.origin_gap->value > 0.5);
}

TEST_CASE("invalid C is reported, not rejected") {
  const auto s = ShrinkageSpec::induced(GeneratorSpec::phi1(1.0), 0.1, 5, true);
  const auto r = check_conditions(s, kGrid);
  CHECK(r.condition(2).status == Status::fails);
  CHECK(r.condition(7).status == Status::not_applicable);
  CHECK_THROWS(check_conditions(s, {2.0, 1.0}));
}

TEST_CASE("Theorem 1 verdicts") {
  CHECK(theorem1_verdict(GeneratorSpec::phi1(0.5), 1.0, 3) == Verdict::dominates);
  CHECK(theorem1_verdict(GeneratorSpec::phi1(1.0), 1.0, 3) == Verdict::fails_origin);
  CHECK(theorem1_verdict(GeneratorSpec::phi1(1.0), 1.0 / 6, 5) == Verdict::invalid_C);
  const CustomTable dip({1.0, 2.0, 3.0}, {1.0, 0.5, 2.0});
  CHECK(theorem1_verdict(GeneratorSpec::custom(dip), 1.0, 5) == Verdict::invalid_generator);
}

TEST_CASE("sign bands") {
  CHECK(sign_of({1e-3, 1e-5, 1, 0}) == Sign::nonnegative);
  CHECK(sign_of({-1e-3, 1e-5, 1, 0}) == Sign::negative);
  CHECK(sign_of({0.9e-5, 1e-6, 1, 0}) == Sign::indeterminate);
  CHECK(sign_of({-0.9e-5, 1e-6, 1, 0}) == Sign::indeterminate);
  CHECK(sign_of({0.0, 0.0, 1, 0}) == Sign::nonnegative);
}

TEST_CASE("cell classification along a column") {
  using K = Justification::Kind;
  const auto inv = CMode::inverse_dim();
  const FamilyParams b15{1.5, 0, 0};
  CHECK(cell(GeneratorFamily::phi1, b15, inv, 4).mark == Mark::minus);
  CHECK(cell(GeneratorFamily::phi1, b15, inv, 5).mark == Mark::star);
  const auto c6 = cell(GeneratorFamily::phi1, b15, inv, 6);
  CHECK(c6.mark == Mark::bullet);
  CHECK(c6.justification.kind == K::prop2);
  CHECK(c6.justification.p_star == 5);
  CHECK(c6.justification.beta == 1.0);

  const FamilyParams g3{1.0, 3.0, 0};
  for (int p : {3, 4, 5}) CHECK(cell(GeneratorFamily::phi2, g3, inv, p).mark == Mark::star);
  const auto g6 = cell(GeneratorFamily::phi2, g3, inv, 6);
  CHECK(g6.mark == Mark::bullet);
  CHECK(g6.justification.to_string() == "prop2(p*=5;beta=3)");

  const FamilyParams q{1.0, 0.25, 0};
  CHECK(cell(GeneratorFamily::phi2, q, CMode::fixed(1.0), 3).mark == Mark::star);
  for (int p = 4; p <= 10; ++p) {
    const auto c = cell(GeneratorFamily::phi2, q, CMode::fixed(1.0), p);
    CHECK(c.mark == Mark::bullet);
    CHECK(c.justification.to_string() == "prop1(p*=3)");
  }
  CHECK_THROWS(classify_cell(GeneratorFamily::phi1, b15, inv, 6, {}));
}

TEST_CASE("linear generator uses the closed-form bound") {
  const FamilyParams a1{0, 0, 1.0};
  const auto inv = CMode::inverse_dim();
  const auto c8 = cell(GeneratorFamily::phi3, a1, inv, 8);
  CHECK(c8.mark == Mark::bullet);
  CHECK(c8.justification.to_string() == "prop3(p*=8)");
  CHECK(cell(GeneratorFamily::phi3, a1, inv, 7).mark == Mark::star);
  // Fixed C has no proposition for this family.
  CHECK(cell(GeneratorFamily::phi3, a1, CMode::fixed(1.0), 8).justification.kind ==
        Justification::Kind::individual_check);
}

TEST_CASE("paper tables: sign partition and documented rule") {
  const auto t1 = build_preset(Preset::table1);
  const auto d1 = compare_tables(t1, reference("table1.txt"));
  CHECK(d1.empty());
  const auto d2 = compare_tables(build_preset(Preset::table2), reference("table2.txt"));
  CHECK(d2.empty());
  const auto d3 = compare_tables(build_preset(Preset::table3), reference("table3.txt"));
  for (const auto& d : d3) CHECK(d.kind == Discrepancy::Kind::star_bullet);
  bool anomaly = false;
  for (const auto& d : d3) {
    anomaly |= d.column == "b=3:gamma=2" && d.p == 5 && d.computed == '*' && d.reference == 'o';
  }
  CHECK(anomaly);
  for (const auto& t : t1) CHECK(t.diagnostics.empty());
}

TEST_CASE("table spot checks") {
  const auto t2 = build_preset(Preset::table2).front();
  for (std::size_t i = 0; i < t2.ps.size(); ++i) {
    if (t2.ps[i] >= 9) {
      for (const auto& c : t2.cells[i]) CHECK(c.mark != Mark::minus);
    }
  }
  const auto t3 = build_preset(Preset::table3).front();
  for (std::size_t j = 0; j < t3.params.size(); ++j) {
    if (t3.params[j].b == 1.0) CHECK(t3.cells[0][j].mark != Mark::minus);
  }
  const auto single = build_table(GeneratorFamily::phi1, {{3.5, 0, 0}}, {3, 4, 5, 6, 7, 8, 9, 10},
                                  CMode::fixed(1.0));
  for (const auto& row : single.cells) CHECK(row[0].mark == Mark::minus);
  CHECK_THROWS(build_table(GeneratorFamily::phi1, {{1, 0, 0}}, {4, 5}, CMode::fixed(1.0)));
}

TEST_CASE("renderings round-trip") {
  const auto tables = build_preset(Preset::table1, {}, 2);
  std::ostringstream text;
  render_text(text, tables);
  std::istringstream back(text.str());
  const auto grids = parse_text(back);
  REQUIRE(grids.size() == 2);
  CHECK(compare_tables(tables, grids).empty());

  std::ostringstream csv1, csv2;
  render_csv(csv1, tables);
  render_csv(csv2, parse_json(render_json(tables)));
  CHECK(csv1.str() == csv2.str());
  CHECK(csv1.str().rfind("p,c_mode,b,sign,mark,justification\n3,fixed:1,0.5,+,*,individual_check\n", 0) == 0);

  std::ostringstream rep;
  render_report(rep, tables);
  CHECK(rep.str().find("⋆") != std::string::npos);
  CHECK(rep.str().find("•") != std::string::npos);
}

TEST_CASE("labels and justifications parse back") {
  for (const std::string s : {"individual_check", "prop1(p*=3)", "prop2(p*=5;beta=0.25)", "prop3(p*=8)",
                              "negative", "indeterminate"}) {
    CHECK(Justification::parse(s).to_string() == s);
  }
  const auto prm = parse_params_label(GeneratorFamily::phi2, "b=3:γ=0.5");
  CHECK(params_label(GeneratorFamily::phi2, prm) == "b=3:gamma=0.5");
  CHECK_THROWS(parse_params_label(GeneratorFamily::phi1, "b=1:gamma=2"));
  CHECK(CMode::parse("fixed:0.5").label() == "fixed:0.5");
  CHECK(CMode::parse("inverse-dim").at(6) == 0.25);
  CHECK_THROWS(CMode::parse("fixed:-1"));
}
