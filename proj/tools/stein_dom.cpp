// stein-dom: tables, risk curves, condition checks, asymptotics and
// simulations for shrinkage estimators of a normal mean.

#include "steindom/asymptotics.hpp"
#include "steindom/csv.hpp"
#include "steindom/dominance.hpp"
#include "steindom/error.hpp"
#include "steindom/montecarlo.hpp"
#include "steindom/parallel.hpp"
#include "steindom/risk.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace steindom;

constexpr int kExitUsage = 2;
constexpr int kExitIndeterminate = 3;
constexpr int kExitNumeric = 4;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw UsageError("not a number: '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw UsageError("not an integer: '" + s + "'");
  }
  return v;
}

std::vector<double> number_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    out.push_back(to_double(item));
  }
  return out;
}

// "3..10", "5" or "3,5,7".
std::vector<int> p_range(const std::string& s) {
  std::vector<int> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int lo = to_int(s.substr(0, dots));
    const int hi = to_int(s.substr(dots + 2));
    if (hi < lo) {
      throw UsageError("empty p range '" + s + "'");
    }
    for (int p = lo; p <= hi; ++p) {
      out.push_back(p);
    }
  } else {
    for (const auto& item : split(s, ',')) {
      out.push_back(to_int(item));
    }
  }
  for (int p : out) {
    if (p < 3) {
      throw UsageError("p must be >= 3");
    }
  }
  return out;
}

int single_p(const std::string& s) {
  const auto ps = p_range(s);
  if (ps.size() != 1) {
    throw UsageError("this command takes a single --p");
  }
  return ps.front();
}

// "b=1,3:gamma=0.25,0.5" -> cartesian product, first key outermost.
std::vector<FamilyParams> params_grid(GeneratorFamily family, const std::string& text) {
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const auto& part : split(text, ':')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw UsageError("bad --params entry '" + part + "'");
    }
    std::string key = part.substr(0, eq);
    if (key == "γ") {
      key = "gamma";
    }
    axes.emplace_back(key, number_list(part.substr(eq + 1)));
  }
  std::vector<std::string> labels{""};
  for (const auto& [key, values] : axes) {
    std::vector<std::string> next;
    for (const auto& prefix : labels) {
      for (double v : values) {
        next.push_back(prefix + (prefix.empty() ? "" : ":") + key + "=" + fmt(v));
      }
    }
    labels = std::move(next);
  }
  std::vector<FamilyParams> out;
  for (const auto& l : labels) {
    try {
      out.push_back(parse_params_label(family, l));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return out;
}

// Flags that select one shrinkage factor.
struct EstimatorFlags {
  bool js = false;
  bool js_plus = false;
  bool kubokawa = false;
  bool stein_class = false;
  std::string family;
  std::string table_file;
  std::string table_tail = "reject";
  std::optional<double> b, gamma, a, C;
  std::string c_mode;
  bool unchecked = false;

  void add_to(CLI::App* app) {
    app->add_flag("--js", js, "James-Stein");
    app->add_flag("--js-plus", js_plus, "positive-part James-Stein");
    app->add_flag("--kubokawa", kubokawa, "Kubokawa's improvement phi_S");
    app->add_flag("--stein-class", stein_class, "phi = b w/(a + w)");
    app->add_option("--family", family, "induced generator: phi1, phi2 or phi3");
    app->add_option("--table", table_file, "induced generator from a w,phi_of_w CSV");
    app->add_option("--table-tail", table_tail, "reject or hold past the last knot");
    app->add_option("--b", b, "generator parameter b");
    app->add_option("--gamma", gamma, "generator parameter gamma");
    app->add_option("--a", a, "generator parameter a");
    app->add_option("--C", C, "constant of integration");
    app->add_option("--c-mode,--C-mode", c_mode, "fixed:<C> or inverse-dim");
    app->add_flag("--unchecked", unchecked, "allow C < 1/(p-2) and inadmissible generators");
  }

  int selected() const {
    return int(js) + int(js_plus) + int(kubokawa) + int(stein_class) + int(!family.empty()) +
           int(!table_file.empty());
  }

  double constant(int p) const {
    if (C && !c_mode.empty()) {
      throw UsageError("give --C or --c-mode, not both");
    }
    if (C) {
      return *C;
    }
    if (!c_mode.empty()) {
      try {
        return CMode::parse(c_mode).at(p);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
    return 1.0;
  }

  GeneratorSpec generator(int p) const {
    if (!table_file.empty()) {
      TablePolicy tail;
      if (table_tail == "reject") {
        tail = TablePolicy::reject;
      } else if (table_tail == "hold") {
        tail = TablePolicy::hold_last;
      } else {
        throw UsageError("--table-tail must be reject or hold");
      }
      return GeneratorSpec::custom(read_custom_table_file(table_file, tail));
    }
    const GeneratorFamily fam = family_or_throw();
    FamilyParams prm;
    auto need = [](const std::optional<double>& v, const char* name) {
      if (!v) {
        throw UsageError(std::string("--") + name + " is required for this family");
      }
      return *v;
    };
    switch (fam) {
      case GeneratorFamily::phi1:
        prm.b = need(b, "b");
        break;
      case GeneratorFamily::phi2:
        prm.b = need(b, "b");
        prm.gamma = need(gamma, "gamma");
        break;
      case GeneratorFamily::phi3:
        prm.a = need(a, "a");
        break;
    }
    try {
      return make_generator(fam, prm, p);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  GeneratorFamily family_or_throw() const {
    try {
      return parse_family(family);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  ShrinkageSpec spec(int p) const {
    if (selected() != 1) {
      throw UsageError(
          "select exactly one estimator: --js, --js-plus, --kubokawa, --stein-class, --family or "
          "--table");
    }
    try {
      if (js) return ShrinkageSpec::james_stein(p);
      if (js_plus) return ShrinkageSpec::positive_part(p);
      if (kubokawa) return ShrinkageSpec::kubokawa(p);
      if (stein_class) return ShrinkageSpec::stein_class(a.value_or(0.0), b.value_or(p - 2.0), p);
      return ShrinkageSpec::induced(generator(p), constant(p), p, unchecked);
    } catch (const UsageError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  bool induced() const { return !family.empty() || !table_file.empty(); }
};

const char* status_name(Status s) {
  switch (s) {
    case Status::holds:
      return "holds";
    case Status::fails:
      return "fails";
    case Status::holds_numerically:
      return "holds (numerically)";
    case Status::not_applicable:
      return "n/a";
    case Status::indeterminate:
      return "indeterminate";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::dominates:
      return "dominates";
    case Verdict::fails_origin:
      return "fails_origin";
    case Verdict::invalid_C:
      return "invalid_C";
    case Verdict::invalid_generator:
      return "invalid_generator";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "?";
}

// --- table ---------------------------------------------------------------

struct TableArgs {
  std::string family, c_mode = "fixed:1", params, p = "3..10", format = "text", preset, compare;
};

int run_table(const TableArgs& args, const QuadConfig& cfg, int jobs) {
  std::vector<Table> tables;
  if (!args.preset.empty()) {
    if (!args.family.empty() || !args.params.empty()) {
      throw UsageError("--paper-preset fixes the family and parameter grid");
    }
    Preset preset;
    try {
      preset = parse_preset(args.preset);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    tables = build_preset(preset, cfg, jobs);
  } else {
    if (args.family.empty() || args.params.empty()) {
      throw UsageError("table needs --family and --params (or --paper-preset)");
    }
    GeneratorFamily family;
    CMode mode;
    try {
      family = parse_family(args.family);
      mode = CMode::parse(args.c_mode);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const auto ps = p_range(args.p);
    if (ps.front() != 3) {
      throw UsageError("--p range must start at 3");
    }
    tables.push_back(build_table(family, params_grid(family, args.params), ps, mode, cfg, jobs));
  }

  if (args.format == "text") {
    render_text(std::cout, tables);
  } else if (args.format == "report") {
    render_report(std::cout, tables);
  } else if (args.format == "csv") {
    render_csv(std::cout, tables);
  } else if (args.format == "json") {
    std::cout << render_json(tables) << '\n';
  } else {
    throw UsageError("--format must be text, report, csv or json");
  }

  if (!args.compare.empty()) {
    std::ifstream in(args.compare);
    if (!in) {
      throw UsageError("cannot open " + args.compare);
    }
    std::cout << "\n# comparison with " << args.compare << '\n';
    render_discrepancies(std::cout, compare_tables(tables, parse_text(in)));
  }

  bool indeterminate = false;
  for (const auto& t : tables) {
    for (const auto& row : t.cells) {
      for (const auto& c : row) {
        if (c.mark == Mark::indeterminate) {
          std::cerr << "indeterminate cell: c_mode=" << t.c_mode.label() << " p=" << c.p << ' '
                    << params_label(t.family, c.params) << " rdiff0=" << c.rdiff0.value
                    << " err=" << c.rdiff0.err_estimate << '\n';
          indeterminate = true;
        }
      }
    }
  }
  return indeterminate ? kExitIndeterminate : 0;
}

// --- risk-curve ------------------------------------------------------------

int run_risk_curve(const EstimatorFlags& est, const std::string& p_text, const std::string& lambdas,
                   bool gap, const QuadConfig& cfg, int jobs) {
  const int p = single_p(p_text);
  const ShrinkageSpec spec = est.spec(p);
  const std::vector<double> grid =
      lambdas.empty() ? geometric_lambda_grid(0.5, 1024.0) : number_list(lambdas);
  for (double l : grid) {
    if (!(l >= 0.0)) {
      throw UsageError("--lambda values must be >= 0");
    }
  }
  if (!gap) {
    write_risk_curve_csv(std::cout, risk_curve(spec, grid, cfg, jobs));
    return 0;
  }
  std::vector<RiskReport> out(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) { out[i] = risk_gap_js(spec, grid[i], cfg); });
  std::cout << "lambda,gap,err,terms\n" << std::setprecision(17);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::cout << grid[i] << ',' << out[i].value << ',' << out[i].err_estimate << ','
              << out[i].terms_used << '\n';
  }
  return 0;
}

// --- check -----------------------------------------------------------------

int run_check(EstimatorFlags est, const std::string& p_text, double lo, double hi, int n,
              const QuadConfig& cfg) {
  const int p = single_p(p_text);
  est.unchecked = true;  // invalid C or generators are reported, not rejected
  const ShrinkageSpec spec = est.spec(p);
  const ConditionReport rep = check_conditions(spec, log_grid(lo, hi, n), cfg);
  std::cout << spec.describe() << '\n';
  bool indeterminate = false;
  for (int k = 1; k <= 7; ++k) {
    const auto& c = rep.condition(k);
    std::cout << "A." << k << ": " << status_name(c.status);
    if (c.witness) {
      std::cout << " witness=" << fmt(*c.witness);
    }
    if (!c.note.empty()) {
      std::cout << " (" << c.note << ')';
    }
    std::cout << '\n';
    indeterminate |= c.status == Status::indeterminate;
  }
  if (rep.origin_gap) {
    std::cout << "origin gap: " << fmt(rep.origin_gap->value)
              << " err=" << fmt(rep.origin_gap->err_estimate) << '\n';
  }
  if (est.induced()) {
    const auto* ind = std::get_if<Induced>(&spec.kind());
    const Verdict v = theorem1_verdict(ind->gen, ind->C, p, cfg);
    std::cout << "verdict: " << verdict_name(v) << '\n';
    indeterminate |= v == Verdict::indeterminate;
  }
  return indeterminate ? kExitIndeterminate : 0;
}

// --- asymptote ---------------------------------------------------------------

int run_asymptote(const EstimatorFlags& est, const std::string& p_text, const std::string& ws) {
  const int p = single_p(p_text);
  if (est.family.empty() || est.selected() != 1) {
    throw UsageError("asymptote needs --family phi1|phi2|phi3");
  }
  const GeneratorFamily family = est.family_or_throw();
  FamilyParams prm;
  prm.b = est.b.value_or(0.0);
  prm.gamma = est.gamma.value_or(0.0);
  prm.a = est.a.value_or(0.0);
  (void)est.generator(p);  // validates parameters
  const auto seq = ws.empty() ? default_w_sequence(family) : number_list(ws);
  ConvergenceReport rep;
  try {
    rep = verify_limit(family, prm, est.constant(p), p, seq);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  write_convergence_csv(std::cout, rep);
  std::cout << "# predicted=" << fmt(rep.spec.predicted_limit)
            << " extrapolated=" << fmt(rep.extrapolated) << " rel_dev=" << fmt(rep.rel_dev)
            << " monotone=" << (rep.monotone ? "yes" : "no") << '\n';
  return 0;
}

// --- simulate ----------------------------------------------------------------

int run_simulate(const EstimatorFlags& est, const std::string& p_text, double lambda,
                 std::uint64_t n, std::uint64_t seed, const std::string& mode, bool gap, int jobs) {
  const int p = single_p(p_text);
  McConfig cfg{n, seed, p, lambda, est.spec(p), McMode::loss_sampling};
  try {
    cfg.mode = parse_mc_mode(mode);
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::cout << to_json(gap ? mc_gap_js(cfg, jobs) : mc_risk(cfg, jobs)) << '\n';
  return 0;
}

// --- phi-eval ----------------------------------------------------------------

int run_phi_eval(const EstimatorFlags& est, const std::string& p_text, const std::string& ws) {
  const int p = single_p(p_text);
  const ShrinkageSpec spec = est.spec(p);
  const auto grid = ws.empty() ? log_grid(1e-2, 1e3, 16) : number_list(ws);
  std::cout << "w,phi,phi_deriv,sure,sure_gap_js\n";
  for (double w : grid) {
    if (!(w > 0.0)) {
      throw UsageError("--w values must be > 0");
    }
    std::cout << fmt(w) << ',' << fmt(phi_value(spec, w)) << ',' << fmt(phi_deriv(spec, w)) << ','
              << fmt(sure(spec, w)) << ',' << fmt(sure_gap_js(spec, w)) << '\n';
  }
  return 0;
}

// --- shrink ------------------------------------------------------------------

int run_shrink(const EstimatorFlags& est, const std::string& input) {
  Eigen::MatrixXd rows;
  if (input.empty() || input == "-") {
    rows = read_rows_csv(std::cin);
  } else {
    std::ifstream in(input);
    if (!in) {
      throw UsageError("cannot open " + input);
    }
    rows = read_rows_csv(in);
  }
  if (rows.rows() == 0) {
    return 0;
  }
  const ShrinkageSpec spec = est.spec(static_cast<int>(rows.cols()));
  write_rows_csv(std::cout, apply_estimator_rows(spec, rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrinkage estimators of a normal mean: dominance over James-Stein"};
  app.require_subcommand(1);
  app.fallthrough();

  int jobs = default_jobs();
  QuadConfig cfg;
  app.add_option("--jobs", jobs, "worker threads (default STEIN_DOM_JOBS)")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", cfg.rel_tol, "quadrature relative tolerance");
  app.add_option("--abs-tol", cfg.abs_tol, "quadrature absolute tolerance");

  TableArgs targs;
  auto* table = app.add_subcommand("table", "classify (p, parameter) cells");
  table->add_option("--family", targs.family, "phi1, phi2 or phi3");
  table->add_option("--c-mode,--C-mode", targs.c_mode, "fixed:<C> or inverse-dim");
  table->add_option("--params", targs.params, "grid such as b=1,3:gamma=0.25,0.5");
  table->add_option("--p", targs.p, "dimension range, e.g. 3..10");
  table->add_option("--format", targs.format, "text, report, csv or json");
  table->add_option("--paper-preset", targs.preset, "table1, table2 or table3");
  table->add_option("--compare", targs.compare, "reference mark grid to compare against");

  EstimatorFlags est;
  std::string p_text = "5";
  std::string lambdas, ws, mode = "loss_sampling", input;
  bool gap = false;
  double lambda = 0.0, grid_lo = 1e-3, grid_hi = 1e4;
  int grid_n = 400;
  std::uint64_t n = 100000, seed = 1;

  auto* curve = app.add_subcommand("risk-curve", "exact risk over a lambda grid (CSV)");
  est.add_to(curve);
  curve->add_option("--p", p_text, "dimension");
  curve->add_option("--lambda", lambdas, "comma-separated lambdas (default 0, 0.5, 1, ..., 1024)");
  curve->add_flag("--gap", gap, "report R(JS) - R(phi) instead of the risk");

  auto* check = app.add_subcommand("check", "conditions A.1-A.7 and the origin verdict");
  est.add_to(check);
  check->add_option("--p", p_text, "dimension");
  check->add_option("--grid-lo", grid_lo, "smallest w of the check grid");
  check->add_option("--grid-hi", grid_hi, "largest w of the check grid");
  check->add_option("--grid-n", grid_n, "number of log-spaced grid points");

  auto* asym = app.add_subcommand("asymptote", "large-w limit of the scaled SURE gap");
  est.add_to(asym);
  asym->add_option("--p", p_text, "dimension");
  asym->add_option("--w", ws, "comma-separated w sequence");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo risk (JSON)");
  est.add_to(sim);
  sim->add_option("--p", p_text, "dimension");
  sim->add_option("--lambda", lambda, "|theta|^2");
  sim->add_option("--n", n, "replications");
  sim->add_option("--seed", seed, "64-bit seed");
  sim->add_option("--mode", mode, "loss_sampling or sure_averaging");
  sim->add_flag("--gap", gap, "paired estimate of R(JS) - R(phi)");

  auto* eval = app.add_subcommand("phi-eval", "phi, phi', SURE and SURE gap over w (CSV)");
  est.add_to(eval);
  eval->add_option("--p", p_text, "dimension");
  eval->add_option("--w", ws, "comma-separated w values");

  auto* shrink = app.add_subcommand("shrink", "apply an estimator to CSV rows");
  est.add_to(shrink);
  shrink->add_option("--input", input, "CSV file of observations (default stdin)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    cfg.validate();
    if (table->parsed()) return run_table(targs, cfg, jobs);
    if (curve->parsed()) return run_risk_curve(est, p_text, lambdas, gap, cfg, jobs);
    if (check->parsed()) return run_check(est, p_text, grid_lo, grid_hi, grid_n, cfg);
    if (asym->parsed()) return run_asymptote(est, p_text, ws);
    if (sim->parsed()) return run_simulate(est, p_text, lambda, n, seed, mode, gap, jobs);
    if (eval->parsed()) return run_phi_eval(est, p_text, ws);
    if (shrink->parsed()) return run_shrink(est, input);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << " (partial value " << e.partial_value()
              << ", residual " << e.residual() << ")\n";
    return kExitNumeric;
  } catch (const SingularInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
