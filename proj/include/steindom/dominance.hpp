#pragma once

// Dominance over James-Stein: conditions A.1-A.7 on a shrinkage factor,
// the origin-criterion verdict for induced factors, and dimension-uniform
// classification of (p, parameters) cells into star / bullet / minus.

#include "steindom/generators.hpp"
#include "steindom/numerics.hpp"
#include "steindom/risk.hpp"
#include "steindom/shrinkage.hpp"

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace steindom {

enum class Status { holds, fails, holds_numerically, not_applicable, indeterminate };

struct ConditionCheck {
  Status status = Status::not_applicable;
  std::optional<double> witness;  // w (or origin risk gap) where the check failed
  std::string note;
};

/// Index i holds condition A.(i+1).
struct ConditionReport {
  std::array<ConditionCheck, 7> a;
  std::size_t grid_points = 0;
  std::optional<RiskReport> origin_gap;

  const ConditionCheck& condition(int n) const { return a.at(static_cast<std::size_t>(n - 1)); }
};

/// Checks A.1-A.7 for `spec`. Numeric checks run over `grid` (positive,
/// increasing); A.6 and A.7 are skipped unless A.1, A.2 and A.4 hold.
ConditionReport check_conditions(const ShrinkageSpec& spec, const std::vector<double>& grid,
                                 const QuadConfig& cfg = {});

/// Log-spaced grid of n points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

enum class Verdict { dominates, fails_origin, invalid_C, invalid_generator, indeterminate };

/// |value| <= 10 err is treated as noise, never as a sign.
inline constexpr double kIndeterminateFactor = 10.0;

enum class Sign { nonnegative, negative, indeterminate };
Sign sign_of(const RiskReport& r);

Verdict theorem1_verdict(const GeneratorSpec& gen, double C, int p, const QuadConfig& cfg = {});

enum class GeneratorFamily { phi1, phi2, phi3 };

struct FamilyParams {
  double b = 0.0;
  double gamma = 0.0;
  double a = 0.0;
};

struct CMode {
  enum class Kind { fixed, inverse_dim };
  Kind kind = Kind::fixed;
  double C = 1.0;

  static CMode fixed(double c) { return {Kind::fixed, c}; }
  static CMode inverse_dim() { return {Kind::inverse_dim, 0.0}; }
  double at(int p) const { return kind == Kind::fixed ? C : 1.0 / (p - 2); }
  std::string label() const;
  static CMode parse(const std::string& text);
};

GeneratorSpec make_generator(GeneratorFamily family, const FamilyParams& params, int p);
std::string family_name(GeneratorFamily family);
GeneratorFamily parse_family(const std::string& name);
/// Column label such as "b=1:gamma=0.25".
std::string params_label(GeneratorFamily family, const FamilyParams& params);
FamilyParams parse_params_label(GeneratorFamily family, const std::string& label);

enum class Mark { star, bullet, minus, indeterminate };
char mark_char(Mark m);
std::string mark_unicode(Mark m);
Mark parse_mark(char c);

struct Justification {
  enum class Kind { individual_check, prop1, prop2, prop3, negative, indeterminate };
  Kind kind = Kind::individual_check;
  int p_star = 0;
  double beta = 0.0;

  std::string to_string() const;
  static Justification parse(const std::string& text);
};

struct CellVerdict {
  int p = 0;
  FamilyParams params;
  CMode c_mode;
  Mark mark = Mark::indeterminate;
  Justification justification;
  RiskReport rdiff0;
};

/// Classification of one cell from its own origin gap and the signs of the
/// same column at smaller p.
CellVerdict classify_from_origin(GeneratorFamily family, const FamilyParams& params,
                                 const CMode& c_mode, int p, const RiskReport& origin,
                                 const std::map<int, Sign>& lower_p_results);

CellVerdict classify_cell(GeneratorFamily family, const FamilyParams& params, const CMode& c_mode,
                          int p, const std::map<int, Sign>& lower_p_results,
                          const QuadConfig& cfg = {});

struct Table {
  GeneratorFamily family;
  CMode c_mode;
  std::vector<FamilyParams> params;
  std::vector<int> ps;
  std::vector<std::vector<CellVerdict>> cells;  // [row for ps[i]][column j]
  std::vector<std::string> diagnostics;

  bool has_indeterminate() const;
};

Table build_table(GeneratorFamily family, const std::vector<FamilyParams>& param_grid,
                  const std::vector<int>& ps, const CMode& c_mode, const QuadConfig& cfg = {},
                  int jobs = 1);

enum class Preset { table1, table2, table3 };
Preset parse_preset(const std::string& name);
std::vector<Table> build_preset(Preset preset, const QuadConfig& cfg = {}, int jobs = 1);

void render_text(std::ostream& os, const std::vector<Table>& tables);
/// Unicode star / bullet / minus rendering.
void render_report(std::ostream& os, const std::vector<Table>& tables);
/// Columns p,c_mode,<params>,sign,mark,justification.
void render_csv(std::ostream& os, const std::vector<Table>& tables);
std::string render_json(const std::vector<Table>& tables);
std::vector<Table> parse_json(const std::string& text);

/// Mark grid as read from text output (or a hand-written reference file).
struct MarkGrid {
  GeneratorFamily family;
  CMode c_mode;
  std::vector<std::string> labels;
  std::vector<int> ps;
  std::vector<std::vector<Mark>> marks;
};
std::vector<MarkGrid> parse_text(std::istream& in);

struct Discrepancy {
  enum class Kind { sign, star_bullet, missing };
  Kind kind;
  std::string c_mode;
  std::string column;
  int p;
  char computed;
  char reference;
  std::string justification;
};

/// Cell-by-cell comparison. `sign` entries mean the non-minus / minus
/// partition disagrees; `star_bullet` entries only the split within it.
std::vector<Discrepancy> compare_tables(const std::vector<Table>& computed,
                                        const std::vector<MarkGrid>& reference);
void render_discrepancies(std::ostream& os, const std::vector<Discrepancy>& ds);

}  // namespace steindom
