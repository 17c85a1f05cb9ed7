#include "steindom/dominance.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace steindom {

namespace {

std::string fmt_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

bool in_domain(const ShrinkageSpec& spec, double w) {
  if (const auto* ind = std::get_if<Induced>(&spec.kind())) {
    if (const auto* t = std::get_if<CustomTable>(&ind->gen.family())) {
      return t->tail() == TablePolicy::hold_last || w <= t->knots_w().back();
    }
  }
  return true;
}

ConditionCheck analytic(Status s, std::string note = {}) { return {s, std::nullopt, std::move(note)}; }

// Scans the grid with `ok(w)`; first failure becomes the witness.
template <typename Pred>
ConditionCheck grid_check(const ShrinkageSpec& spec, const std::vector<double>& grid, Pred ok) {
  for (double w : grid) {
    if (!in_domain(spec, w)) {
      continue;
    }
    if (!ok(w)) {
      return {Status::fails, w, "numeric grid"};
    }
  }
  return {Status::holds_numerically, std::nullopt, "numeric grid"};
}

bool holds(const ConditionCheck& c) {
  return c.status == Status::holds || c.status == Status::holds_numerically;
}

bool is_induced_admissible(const ShrinkageSpec& spec) {
  const auto* ind = std::get_if<Induced>(&spec.kind());
  return ind != nullptr && is_admissible(ind->gen);
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  }
  out.back() = hi;
  return out;
}

Sign sign_of(const RiskReport& r) {
  if (r.value == 0.0 && r.err_estimate == 0.0) {
    return Sign::nonnegative;
  }
  if (std::abs(r.value) <= kIndeterminateFactor * r.err_estimate) {
    return Sign::indeterminate;
  }
  return r.value >= 0.0 ? Sign::nonnegative : Sign::negative;
}

ConditionReport check_conditions(const ShrinkageSpec& spec, const std::vector<double>& grid,
                                 const QuadConfig& cfg) {
  if (grid.empty()) {
    throw std::invalid_argument("check_conditions: grid must be non-empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw std::invalid_argument("check_conditions: grid must be positive and increasing");
    }
  }

  const int p = spec.p();
  const double m = p - 2.0;
  ConditionReport rep;
  rep.grid_points = grid.size();
  auto& a = rep.a;
  const auto& kind = spec.kind();

  // A.1 phi' >= 0, A.2 phi >= 0, A.3 phi <= 2(p-2), A.4 phi -> p-2.
  if (std::holds_alternative<JamesStein>(kind)) {
    a[0] = analytic(Status::holds, "constant phi");
    a[1] = analytic(Status::holds);
    a[2] = analytic(Status::holds);
    a[3] = analytic(Status::holds);
  } else if (std::holds_alternative<JamesSteinPositivePart>(kind)) {
    a[0] = analytic(Status::holds, "phi = min(w, p-2)");
    a[1] = analytic(Status::holds);
    a[2] = analytic(Status::holds);
    a[3] = analytic(Status::holds);
  } else if (const auto* sc = std::get_if<SteinClass>(&kind)) {
    a[0] = analytic(Status::holds, "phi' = ab/(a+w)^2");
    a[1] = analytic(Status::holds);
    if (sc->b <= 2.0 * m) {
      a[2] = analytic(Status::holds);
    } else {
      a[2] = grid_check(spec, grid, [&](double w) { return phi_value(spec, w) <= 2.0 * m; });
      a[2].status = Status::fails;
      a[2].note = "sup phi = b > 2(p-2)";
    }
    a[3] = sc->b == m ? analytic(Status::holds) : analytic(Status::fails, "limit is b != p-2");
  } else if (const auto* ind = std::get_if<Induced>(&kind)) {
    if (is_admissible(ind->gen)) {
      a[0] = analytic(Status::holds, "phi' = (Phi/w)(p-2-phi)^2 >= 0");
    } else {
      a[0] = grid_check(spec, grid, [&](double w) { return phi_deriv(spec, w) >= 0.0; });
    }
    if (ind->C >= min_integration_constant(p) * (1.0 - 1e-12)) {
      a[1] = analytic(Status::holds, "phi(0) = p-2-1/C >= 0");
    } else {
      a[1] = {Status::fails, 0.0, "C < 1/(p-2) gives phi(0) < 0"};
    }
    a[2] = analytic(Status::holds, "phi < p-2");
    const auto* table = std::get_if<CustomTable>(&ind->gen.family());
    if (!is_admissible(ind->gen)) {
      a[3] = analytic(Status::not_applicable, "generator not positive non-decreasing");
    } else if (table != nullptr && table->tail() == TablePolicy::reject) {
      a[3] = analytic(Status::not_applicable, "generator undefined past last knot");
    } else {
      a[3] = analytic(Status::holds, "J(w) -> inf for positive non-decreasing Phi");
    }
  } else {
    a[0] = grid_check(spec, grid, [&](double w) { return phi_deriv(spec, w) >= 0.0; });
    a[1] = grid_check(spec, grid, [&](double w) { return phi_value(spec, w) >= 0.0; });
    a[2] = analytic(Status::holds, "phi_S < p-2");
    a[3] = analytic(Status::holds, "phi_S -> p-2 exponentially");
  }

  // A.5 phi >= phi_S.
  if (std::holds_alternative<JamesStein>(kind) || std::holds_alternative<KubokawaStein>(kind)) {
    a[4] = analytic(Status::holds);
  } else {
    a[4] = grid_check(spec, grid, [&](double w) {
      return phi_value(spec, w) >= phi_stein_kubokawa(p, w) - 1e-12 * m;
    });
  }

  const bool base = holds(a[0]) && holds(a[1]) && holds(a[3]);
  if (!base) {
    a[5] = analytic(Status::not_applicable, "requires A.1, A.2, A.4");
    a[6] = analytic(Status::not_applicable, "requires A.1, A.2, A.4");
    return rep;
  }

  // A.6 w phi' / (p-2-phi)^2 non-decreasing.
  if (std::holds_alternative<JamesStein>(kind)) {
    a[5] = analytic(Status::not_applicable, "p-2-phi vanishes identically");
  } else if (is_induced_admissible(spec)) {
    a[5] = analytic(Status::holds, "ratio equals Phi(w)");
  } else {
    double prev = -std::numeric_limits<double>::infinity();
    a[5] = {Status::holds_numerically, std::nullopt, "numeric grid"};
    for (double w : grid) {
      const double s = shortfall(spec, w);
      if (!(s > 0.0)) {
        continue;
      }
      const double q = w * phi_deriv(spec, w) / (s * s);
      if (q < prev - 1e-12 * std::abs(prev)) {
        a[5] = {Status::fails, w, "numeric grid"};
        break;
      }
      prev = q;
    }
  }

  // A.7 dominance at the origin.
  RiskReport origin;
  if (const auto* ind = std::get_if<Induced>(&kind)) {
    origin = rdiff0(ind->gen, ind->C, p, cfg);
  } else {
    origin = risk_gap_js(spec, 0.0, cfg);
  }
  rep.origin_gap = origin;
  switch (sign_of(origin)) {
    case Sign::nonnegative:
      a[6] = analytic(Status::holds);
      break;
    case Sign::negative:
      a[6] = {Status::fails, origin.value, "R(0,JS) - R(0,phi) < 0"};
      break;
    case Sign::indeterminate:
      a[6] = {Status::indeterminate, origin.value, "within 10x error estimate"};
      break;
  }
  return rep;
}

Verdict theorem1_verdict(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg) {
  if (p < 3) {
    throw std::domain_error("theorem1_verdict: p must be >= 3");
  }
  if (!is_admissible(gen)) {
    return Verdict::invalid_generator;
  }
  if (!(C >= min_integration_constant(p) * (1.0 - 1e-12))) {
    return Verdict::invalid_C;
  }
  switch (sign_of(rdiff0(gen, C, p, cfg))) {
    case Sign::nonnegative:
      return Verdict::dominates;
    case Sign::negative:
      return Verdict::fails_origin;
    case Sign::indeterminate:
      break;
  }
  return Verdict::indeterminate;
}

std::string CMode::label() const {
  return kind == Kind::fixed ? "fixed:" + fmt_number(C) : "inverse-dim";
}

CMode CMode::parse(const std::string& text) {
  if (text == "inverse-dim") {
    return inverse_dim();
  }
  if (text.rfind("fixed:", 0) == 0) {
    const double c = parse_number(text.substr(6));
    if (!(c > 0.0)) {
      throw std::invalid_argument("c-mode: fixed C must be positive");
    }
    return fixed(c);
  }
  throw std::invalid_argument("c-mode must be fixed:<C> or inverse-dim, got '" + text + "'");
}

GeneratorSpec make_generator(GeneratorFamily family, const FamilyParams& params, int p) {
  switch (family) {
    case GeneratorFamily::phi1:
      return GeneratorSpec::phi1(params.b);
    case GeneratorFamily::phi2:
      return GeneratorSpec::phi2(params.b, params.gamma);
    case GeneratorFamily::phi3:
      return GeneratorSpec::phi3(params.a, p);
  }
  throw std::logic_error("make_generator: unknown family");
}

std::string family_name(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::phi1:
      return "phi1";
    case GeneratorFamily::phi2:
      return "phi2";
    case GeneratorFamily::phi3:
      return "phi3";
  }
  return "?";
}

GeneratorFamily parse_family(const std::string& name) {
  if (name == "phi1") return GeneratorFamily::phi1;
  if (name == "phi2") return GeneratorFamily::phi2;
  if (name == "phi3") return GeneratorFamily::phi3;
  throw std::invalid_argument("unknown family '" + name + "'");
}

std::string params_label(GeneratorFamily family, const FamilyParams& params) {
  switch (family) {
    case GeneratorFamily::phi1:
      return "b=" + fmt_number(params.b);
    case GeneratorFamily::phi2:
      return "b=" + fmt_number(params.b) + ":gamma=" + fmt_number(params.gamma);
    case GeneratorFamily::phi3:
      return "a=" + fmt_number(params.a);
  }
  return "?";
}

FamilyParams parse_params_label(GeneratorFamily family, const std::string& label) {
  FamilyParams out;
  bool have_b = false, have_gamma = false, have_a = false;
  for (const auto& part : split(label, ':')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("bad parameter '" + part + "'");
    }
    const std::string key = part.substr(0, eq);
    const double v = parse_number(part.substr(eq + 1));
    if (key == "b") {
      out.b = v;
      have_b = true;
    } else if (key == "gamma" || key == "γ") {
      out.gamma = v;
      have_gamma = true;
    } else if (key == "a") {
      out.a = v;
      have_a = true;
    } else {
      throw std::invalid_argument("unknown parameter '" + key + "'");
    }
  }
  const bool ok = (family == GeneratorFamily::phi1 && have_b && !have_gamma && !have_a) ||
                  (family == GeneratorFamily::phi2 && have_b && have_gamma && !have_a) ||
                  (family == GeneratorFamily::phi3 && have_a && !have_b && !have_gamma);
  if (!ok) {
    throw std::invalid_argument("parameters '" + label + "' do not match family " +
                                family_name(family));
  }
  return out;
}

char mark_char(Mark m) {
  switch (m) {
    case Mark::star:
      return '*';
    case Mark::bullet:
      return 'o';
    case Mark::minus:
      return '-';
    case Mark::indeterminate:
      return '?';
  }
  return '?';
}

std::string mark_unicode(Mark m) {
  switch (m) {
    case Mark::star:
      return "⋆";
    case Mark::bullet:
      return "•";
    case Mark::minus:
      return "-";
    case Mark::indeterminate:
      return "?";
  }
  return "?";
}

Mark parse_mark(char c) {
  switch (c) {
    case '*':
      return Mark::star;
    case 'o':
      return Mark::bullet;
    case '-':
      return Mark::minus;
    case '?':
      return Mark::indeterminate;
    default:
      throw std::invalid_argument(std::string("unknown mark '") + c + "'");
  }
}

std::string Justification::to_string() const {
  switch (kind) {
    case Kind::individual_check:
      return "individual_check";
    case Kind::prop1:
      return "prop1(p*=" + std::to_string(p_star) + ")";
    case Kind::prop2:
      return "prop2(p*=" + std::to_string(p_star) + ";beta=" + fmt_number(beta) + ")";
    case Kind::prop3:
      return "prop3(p*=" + std::to_string(p_star) + ")";
    case Kind::negative:
      return "negative";
    case Kind::indeterminate:
      return "indeterminate";
  }
  return "?";
}

Justification Justification::parse(const std::string& text) {
  if (text == "individual_check") return {Kind::individual_check};
  if (text == "negative") return {Kind::negative};
  if (text == "indeterminate") return {Kind::indeterminate};
  auto field = [&](const std::string& key) -> std::string {
    const auto at = text.find(key);
    if (at == std::string::npos) {
      throw std::invalid_argument("bad justification '" + text + "'");
    }
    const auto start = at + key.size();
    const auto end = text.find_first_of(";)", start);
    return text.substr(start, end - start);
  };
  Justification j;
  if (text.rfind("prop1(", 0) == 0) {
    j.kind = Kind::prop1;
  } else if (text.rfind("prop2(", 0) == 0) {
    j.kind = Kind::prop2;
    j.beta = parse_number(field("beta="));
  } else if (text.rfind("prop3(", 0) == 0) {
    j.kind = Kind::prop3;
  } else {
    throw std::invalid_argument("bad justification '" + text + "'");
  }
  j.p_star = std::stoi(field("p*="));
  return j;
}

CellVerdict classify_from_origin(GeneratorFamily family, const FamilyParams& params,
                                 const CMode& c_mode, int p, const RiskReport& origin,
                                 const std::map<int, Sign>& lower_p_results) {
  CellVerdict cell{p, params, c_mode, Mark::indeterminate, {}, origin};
  switch (sign_of(origin)) {
    case Sign::indeterminate:
      cell.justification.kind = Justification::Kind::indeterminate;
      return cell;
    case Sign::negative:
      cell.mark = Mark::minus;
      cell.justification.kind = Justification::Kind::negative;
      return cell;
    case Sign::nonnegative:
      break;
  }

  using JK = Justification::Kind;
  if (family == GeneratorFamily::phi3) {
    // Closed-form bound (p-6)/(a(p-2)) increases in p; only used with C = 1/(p-2).
    if (c_mode.kind == CMode::Kind::inverse_dim) {
      for (int ps = 7; ps <= p; ++ps) {
        if (phi3_bound_reaches_quarter(params.a, ps)) {
          cell.mark = Mark::bullet;
          cell.justification = {JK::prop3, ps, 0.0};
          return cell;
        }
      }
    }
  } else {
    const bool fixed = c_mode.kind == CMode::Kind::fixed;
    const double beta = fixed ? 0.0 : beta_sup(make_generator(family, params, p));
    for (const auto& [lower, sign] : lower_p_results) {
      if (lower >= p || lower < 3 || sign != Sign::nonnegative) {
        continue;
      }
      if (fixed) {
        cell.mark = Mark::bullet;
        cell.justification = {JK::prop1, lower, 0.0};
        return cell;
      }
      if (lower >= beta + 2.0 - 1e-12) {
        cell.mark = Mark::bullet;
        cell.justification = {JK::prop2, lower, beta};
        return cell;
      }
    }
  }
  cell.mark = Mark::star;
  cell.justification.kind = JK::individual_check;
  return cell;
}

CellVerdict classify_cell(GeneratorFamily family, const FamilyParams& params, const CMode& c_mode,
                          int p, const std::map<int, Sign>& lower_p_results,
                          const QuadConfig& cfg) {
  for (int q = 3; q < p; ++q) {
    if (!lower_p_results.contains(q)) {
      throw std::invalid_argument("classify_cell: lower_p_results must cover 3..p-1");
    }
  }
  const GeneratorSpec gen = make_generator(family, params, p);
  return classify_from_origin(family, params, c_mode, p, rdiff0(gen, c_mode.at(p), p, cfg),
                              lower_p_results);
}

bool Table::has_indeterminate() const {
  for (const auto& row : cells) {
    for (const auto& c : row) {
      if (c.mark == Mark::indeterminate) {
        return true;
      }
    }
  }
  return false;
}

Table build_table(GeneratorFamily family, const std::vector<FamilyParams>& param_grid,
                  const std::vector<int>& ps, const CMode& c_mode, const QuadConfig& cfg,
                  int jobs) {
  if (ps.empty() || ps.front() != 3 || !std::is_sorted(ps.begin(), ps.end()) ||
      std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
    throw std::invalid_argument("build_table: p range must ascend from 3");
  }
  for (std::size_t i = 1; i < ps.size(); ++i) {
    if (ps[i] != ps[i - 1] + 1) {
      throw std::invalid_argument("build_table: p range must be contiguous");
    }
  }
  const std::size_t rows = ps.size();
  const std::size_t cols = param_grid.size();

  std::vector<RiskReport> origin(rows * cols);
  parallel_for(rows * cols, jobs, [&](std::size_t idx) {
    const int p = ps[idx / cols];
    const auto& prm = param_grid[idx % cols];
    origin[idx] = rdiff0(make_generator(family, prm, p), c_mode.at(p), p, cfg);
  });

  Table table{family, c_mode, param_grid, ps, std::vector<std::vector<CellVerdict>>(rows), {}};
  for (auto& row : table.cells) {
    row.resize(cols);
  }
  for (std::size_t j = 0; j < cols; ++j) {
    std::map<int, Sign> seen;
    int guaranteed_from = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      const int p = ps[i];
      CellVerdict cell =
          classify_from_origin(family, param_grid[j], c_mode, p, origin[i * cols + j], seen);
      const std::string where =
          "p=" + std::to_string(p) + " " + params_label(family, param_grid[j]);
      if (cell.mark == Mark::indeterminate) {
        table.diagnostics.push_back("indeterminate: " + where);
      }
      if (cell.mark == Mark::minus && guaranteed_from != 0 && p > guaranteed_from) {
        table.diagnostics.push_back("monotone closure violated: " + where +
                                    " is minus after p*=" + std::to_string(guaranteed_from));
      }
      if (cell.mark == Mark::bullet && guaranteed_from == 0) {
        guaranteed_from = cell.justification.p_star;
      }
      seen[p] = sign_of(cell.rdiff0);
      table.cells[i][j] = std::move(cell);
    }
  }
  return table;
}

Preset parse_preset(const std::string& name) {
  if (name == "table1") return Preset::table1;
  if (name == "table2") return Preset::table2;
  if (name == "table3") return Preset::table3;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<Table> build_preset(Preset preset, const QuadConfig& cfg, int jobs) {
  const std::vector<int> ps{3, 4, 5, 6, 7, 8, 9, 10};
  if (preset == Preset::table1) {
    std::vector<FamilyParams> grid;
    for (double b : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5}) {
      grid.push_back({b, 0.0, 0.0});
    }
    return {build_table(GeneratorFamily::phi1, grid, ps, CMode::fixed(1.0), cfg, jobs),
            build_table(GeneratorFamily::phi1, grid, ps, CMode::inverse_dim(), cfg, jobs)};
  }
  std::vector<FamilyParams> grid;
  for (double b : {1.0, 3.0, 5.0, 7.0, 9.0}) {
    for (double g : {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      grid.push_back({b, g, 0.0});
    }
  }
  const CMode mode = preset == Preset::table2 ? CMode::fixed(1.0) : CMode::inverse_dim();
  return {build_table(GeneratorFamily::phi2, grid, ps, mode, cfg, jobs)};
}

void render_text(std::ostream& os, const std::vector<Table>& tables) {
  bool first = true;
  for (const auto& t : tables) {
    if (!first) {
      os << '\n';
    }
    first = false;
    os << "# family=" << family_name(t.family) << " c_mode=" << t.c_mode.label() << '\n';
    std::vector<std::string> labels;
    std::size_t width = 1;
    for (const auto& prm : t.params) {
      labels.push_back(params_label(t.family, prm));
      width = std::max(width, labels.back().size());
    }
    // Columns are padded to a common width; the last one is not padded.
    auto cell = [&](std::size_t j, const std::string& text) {
      os << ' ' << text;
      if (j + 1 < labels.size()) {
        os << std::string(width - text.size(), ' ');
      }
    };
    os << "p  ";
    for (std::size_t j = 0; j < labels.size(); ++j) {
      cell(j, labels[j]);
    }
    os << '\n';
    for (std::size_t i = 0; i < t.ps.size(); ++i) {
      const std::string p = std::to_string(t.ps[i]);
      os << p << std::string(p.size() < 3 ? 3 - p.size() : 0, ' ');
      for (std::size_t j = 0; j < t.cells[i].size(); ++j) {
        cell(j, std::string(1, mark_char(t.cells[i][j].mark)));
      }
      os << '\n';
    }
    for (const auto& d : t.diagnostics) {
      os << "# " << d << '\n';
    }
  }
}

void render_report(std::ostream& os, const std::vector<Table>& tables) {
  for (const auto& t : tables) {
    os << family_name(t.family) << ", C " << t.c_mode.label() << '\n';
    for (std::size_t i = 0; i < t.ps.size(); ++i) {
      os << std::setw(3) << t.ps[i] << " |";
      for (const auto& c : t.cells[i]) {
        os << ' ' << mark_unicode(c.mark);
      }
      os << '\n';
    }
    os << '\n';
  }
}

namespace {

std::string csv_header(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::phi1:
      return "p,c_mode,b,sign,mark,justification";
    case GeneratorFamily::phi2:
      return "p,c_mode,b,gamma,sign,mark,justification";
    case GeneratorFamily::phi3:
      return "p,c_mode,a,sign,mark,justification";
  }
  return {};
}

char sign_char(Sign s) {
  switch (s) {
    case Sign::nonnegative:
      return '+';
    case Sign::negative:
      return '-';
    case Sign::indeterminate:
      return '?';
  }
  return '?';
}

}  // namespace

void render_csv(std::ostream& os, const std::vector<Table>& tables) {
  std::optional<GeneratorFamily> last;
  for (const auto& t : tables) {
    if (!last || *last != t.family) {
      os << csv_header(t.family) << '\n';
      last = t.family;
    }
    for (std::size_t i = 0; i < t.ps.size(); ++i) {
      for (const auto& c : t.cells[i]) {
        os << c.p << ',' << t.c_mode.label() << ',';
        switch (t.family) {
          case GeneratorFamily::phi1:
            os << fmt_number(c.params.b);
            break;
          case GeneratorFamily::phi2:
            os << fmt_number(c.params.b) << ',' << fmt_number(c.params.gamma);
            break;
          case GeneratorFamily::phi3:
            os << fmt_number(c.params.a);
            break;
        }
        os << ',' << sign_char(sign_of(c.rdiff0)) << ',' << mark_char(c.mark) << ','
           << c.justification.to_string() << '\n';
      }
    }
  }
}

std::string render_json(const std::vector<Table>& tables) {
  using nlohmann::json;
  json out = json::array();
  for (const auto& t : tables) {
    json jt;
    jt["family"] = family_name(t.family);
    jt["c_mode"] = t.c_mode.label();
    jt["ps"] = t.ps;
    jt["params"] = json::array();
    for (const auto& prm : t.params) {
      jt["params"].push_back(params_label(t.family, prm));
    }
    jt["cells"] = json::array();
    for (std::size_t i = 0; i < t.ps.size(); ++i) {
      for (std::size_t j = 0; j < t.params.size(); ++j) {
        const auto& c = t.cells[i][j];
        jt["cells"].push_back({{"p", c.p},
                               {"column", j},
                               {"mark", std::string(1, mark_char(c.mark))},
                               {"justification", c.justification.to_string()},
                               {"rdiff0",
                                {{"value", c.rdiff0.value},
                                 {"err", c.rdiff0.err_estimate},
                                 {"terms", c.rdiff0.terms_used},
                                 {"subdivisions", c.rdiff0.subdivisions}}}});
      }
    }
    jt["diagnostics"] = t.diagnostics;
    out.push_back(std::move(jt));
  }
  return out.dump(2);
}

std::vector<Table> parse_json(const std::string& text) {
  using nlohmann::json;
  const json in = json::parse(text);
  std::vector<Table> tables;
  for (const auto& jt : in) {
    Table t;
    t.family = parse_family(jt.at("family").get<std::string>());
    t.c_mode = CMode::parse(jt.at("c_mode").get<std::string>());
    t.ps = jt.at("ps").get<std::vector<int>>();
    for (const auto& lbl : jt.at("params")) {
      t.params.push_back(parse_params_label(t.family, lbl.get<std::string>()));
    }
    t.cells.assign(t.ps.size(), std::vector<CellVerdict>(t.params.size()));
    for (const auto& jc : jt.at("cells")) {
      const int p = jc.at("p").get<int>();
      const auto row = static_cast<std::size_t>(
          std::find(t.ps.begin(), t.ps.end(), p) - t.ps.begin());
      const auto col = jc.at("column").get<std::size_t>();
      if (row >= t.ps.size() || col >= t.params.size()) {
        throw std::invalid_argument("parse_json: cell outside table");
      }
      CellVerdict c;
      c.p = p;
      c.params = t.params[col];
      c.c_mode = t.c_mode;
      c.mark = parse_mark(jc.at("mark").get<std::string>().at(0));
      c.justification = Justification::parse(jc.at("justification").get<std::string>());
      const auto& r = jc.at("rdiff0");
      c.rdiff0 = {r.at("value").get<double>(), r.at("err").get<double>(),
                  r.at("terms").get<int>(), r.at("subdivisions").get<int>()};
      t.cells[row][col] = c;
    }
    t.diagnostics = jt.at("diagnostics").get<std::vector<std::string>>();
    tables.push_back(std::move(t));
  }
  return tables;
}

std::vector<MarkGrid> parse_text(std::istream& in) {
  std::vector<MarkGrid> grids;
  std::string line;
  MarkGrid* cur = nullptr;
  bool expect_header = false;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, fam, mode;
      ls >> hash >> fam >> mode;
      if (fam.rfind("family=", 0) != 0 || mode.rfind("c_mode=", 0) != 0) {
        continue;  // diagnostic comment
      }
      grids.push_back({parse_family(fam.substr(7)), CMode::parse(mode.substr(7)), {}, {}, {}});
      cur = &grids.back();
      expect_header = true;
      continue;
    }
    if (cur == nullptr) {
      throw std::invalid_argument("parse_text: table row before '# family=' header");
    }
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) {
      tok.push_back(t);
    }
    if (expect_header) {
      if (tok.empty() || tok[0] != "p") {
        throw std::invalid_argument("parse_text: expected column header");
      }
      cur->labels.assign(tok.begin() + 1, tok.end());
      expect_header = false;
      continue;
    }
    if (tok.size() != cur->labels.size() + 1) {
      throw std::invalid_argument("parse_text: row width mismatch: " + line);
    }
    cur->ps.push_back(std::stoi(tok[0]));
    std::vector<Mark> row;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      if (tok[k].size() != 1) {
        throw std::invalid_argument("parse_text: bad mark '" + tok[k] + "'");
      }
      row.push_back(parse_mark(tok[k][0]));
    }
    cur->marks.push_back(std::move(row));
  }
  return grids;
}

std::vector<Discrepancy> compare_tables(const std::vector<Table>& computed,
                                        const std::vector<MarkGrid>& reference) {
  std::vector<Discrepancy> out;
  for (const auto& ref : reference) {
    const auto it = std::find_if(computed.begin(), computed.end(), [&](const Table& t) {
      return t.family == ref.family && t.c_mode.label() == ref.c_mode.label();
    });
    for (std::size_t i = 0; i < ref.ps.size(); ++i) {
      for (std::size_t j = 0; j < ref.labels.size(); ++j) {
        const char want = mark_char(ref.marks[i][j]);
        const Table* t = it == computed.end() ? nullptr : &*it;
        const CellVerdict* cell = nullptr;
        if (t != nullptr) {
          const auto row = std::find(t->ps.begin(), t->ps.end(), ref.ps[i]);
          const FamilyParams prm = parse_params_label(ref.family, ref.labels[j]);
          const auto col = std::find_if(t->params.begin(), t->params.end(), [&](const FamilyParams& x) {
            return params_label(t->family, x) == params_label(ref.family, prm);
          });
          if (row != t->ps.end() && col != t->params.end()) {
            cell = &t->cells[static_cast<std::size_t>(row - t->ps.begin())]
                            [static_cast<std::size_t>(col - t->params.begin())];
          }
        }
        if (cell == nullptr) {
          out.push_back({Discrepancy::Kind::missing, ref.c_mode.label(), ref.labels[j], ref.ps[i],
                         ' ', want, ""});
          continue;
        }
        const char got = mark_char(cell->mark);
        if (got == want) {
          continue;
        }
        const bool got_pass = cell->mark == Mark::star || cell->mark == Mark::bullet;
        const bool want_pass = ref.marks[i][j] == Mark::star || ref.marks[i][j] == Mark::bullet;
        const auto kind = got_pass && want_pass ? Discrepancy::Kind::star_bullet
                                                : Discrepancy::Kind::sign;
        out.push_back({kind, ref.c_mode.label(), ref.labels[j], ref.ps[i], got, want,
                       cell->justification.to_string()});
      }
    }
  }
  return out;
}

void render_discrepancies(std::ostream& os, const std::vector<Discrepancy>& ds) {
  if (ds.empty()) {
    os << "no discrepancies\n";
    return;
  }
  for (const auto& d : ds) {
    const char* kind = d.kind == Discrepancy::Kind::sign          ? "SIGN"
                       : d.kind == Discrepancy::Kind::star_bullet ? "star/bullet"
                                                                  : "missing";
    os << kind << ": c_mode=" << d.c_mode << " " << d.column << " p=" << d.p
       << " computed=" << d.computed << " reference=" << d.reference;
    if (!d.justification.empty()) {
      os << " (" << d.justification << ")";
    }
    os << '\n';
  }
}

}  // namespace steindom
