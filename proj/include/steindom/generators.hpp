#pragma once

// Generator functions Phi(w): positive, non-decreasing functions from which
// a shrinkage factor is induced, together with J(w) = int_0^w Phi(t)/t dt.

#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace steindom {

/// Phi(w) = w / (b (w + 1)).
struct Phi1 {
  double b;
};

/// Phi(w) = (w / b)^gamma.
struct Phi2 {
  double b;
  double gamma;
};

/// Phi(w) = w / (a (p - 2)); the only built-in family that depends on p.
struct Phi3 {
  double a;
  int p;
};

/// Behaviour of a tabulated generator past its last knot.
enum class TablePolicy { reject, hold_last };

/// Tabulated generator with piecewise-linear interpolation. Below the first
/// knot the interpolant runs linearly to (0, 0).
class CustomTable {
 public:
  CustomTable(std::vector<double> w, std::vector<double> phi,
              TablePolicy tail = TablePolicy::reject);

  const std::vector<double>& knots_w() const noexcept { return data_->w; }
  const std::vector<double>& knots_phi() const noexcept { return data_->phi; }
  TablePolicy tail() const noexcept { return data_->tail; }

  double value(double w) const;
  double cumulative(double w) const;
  /// Phi is positive for w > 0 and non-decreasing across the knots.
  bool is_monotone_positive() const;

 private:
  struct Data {
    std::vector<double> w;
    std::vector<double> phi;
    std::vector<double> cum;  // J at each knot
    TablePolicy tail;
  };
  std::size_t segment(double w) const;
  std::shared_ptr<const Data> data_;
};

class GeneratorSpec {
 public:
  using Family = std::variant<Phi1, Phi2, Phi3, CustomTable>;

  static GeneratorSpec phi1(double b);
  static GeneratorSpec phi2(double b, double gamma);
  static GeneratorSpec phi3(double a, int p);
  static GeneratorSpec custom(CustomTable table);

  const Family& family() const noexcept { return family_; }
  std::string describe() const;

 private:
  explicit GeneratorSpec(Family f) : family_(std::move(f)) {}
  Family family_;
};

double eval_generator(const GeneratorSpec& gen, double w);
double cumulative(const GeneratorSpec& gen, double w);
/// sup_{w>0} Phi(w) / J(w).
double beta_sup(const GeneratorSpec& gen);
/// Positivity and monotonicity: analytic for built-ins, knot-wise for tables.
bool is_admissible(const GeneratorSpec& gen);

/// Reads a `w,phi_of_w` CSV with strictly increasing w.
CustomTable read_custom_table(std::istream& in, TablePolicy tail = TablePolicy::reject);
CustomTable read_custom_table_file(const std::string& path,
                                   TablePolicy tail = TablePolicy::reject);

}  // namespace steindom
