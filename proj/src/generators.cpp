#include "steindom/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace steindom {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_nonneg(double w, const char* who) {
  if (!(w >= 0.0)) {
    throw std::domain_error(std::string(who) + ": w must be >= 0");
  }
}

}  // namespace

CustomTable::CustomTable(std::vector<double> w, std::vector<double> phi, TablePolicy tail) {
  if (w.size() != phi.size() || w.empty()) {
    throw std::invalid_argument("CustomTable: need matching, non-empty w and phi columns");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || !std::isfinite(phi[i])) {
      throw std::invalid_argument("CustomTable: non-finite knot");
    }
    if (i > 0 && !(w[i] > w[i - 1])) {
      throw std::invalid_argument("CustomTable: w must be strictly increasing");
    }
  }
  if (w.front() < 0.0) {
    throw std::invalid_argument("CustomTable: w must be >= 0");
  }
  if (w.front() == 0.0 && phi.front() != 0.0) {
    throw std::invalid_argument(
        "CustomTable: Phi(0) != 0 makes int_0 Phi(t)/t dt diverge");
  }
  if (w.front() > 0.0) {
    w.insert(w.begin(), 0.0);
    phi.insert(phi.begin(), 0.0);
  }
  if (w.size() < 2) {
    throw std::invalid_argument("CustomTable: need at least one positive knot");
  }

  std::vector<double> cum(w.size(), 0.0);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double slope = (phi[i + 1] - phi[i]) / (w[i + 1] - w[i]);
    const double intercept = phi[i] - slope * w[i];
    double seg = slope * (w[i + 1] - w[i]);
    if (w[i] > 0.0) {
      seg += intercept * std::log(w[i + 1] / w[i]);
    }
    cum[i + 1] = cum[i] + seg;
  }
  data_ = std::make_shared<const Data>(Data{std::move(w), std::move(phi), std::move(cum), tail});
}

std::size_t CustomTable::segment(double w) const {
  const auto& ws = data_->w;
  auto it = std::upper_bound(ws.begin(), ws.end(), w);
  std::size_t i = static_cast<std::size_t>(it - ws.begin());
  return i == 0 ? 0 : std::min(i - 1, ws.size() - 2);
}

double CustomTable::value(double w) const {
  require_nonneg(w, "CustomTable::value");
  const auto& d = *data_;
  if (w > d.w.back()) {
    if (d.tail == TablePolicy::reject) {
      throw std::out_of_range("CustomTable: w beyond last knot");
    }
    return d.phi.back();
  }
  const std::size_t i = segment(w);
  const double slope = (d.phi[i + 1] - d.phi[i]) / (d.w[i + 1] - d.w[i]);
  return d.phi[i] + slope * (w - d.w[i]);
}

double CustomTable::cumulative(double w) const {
  require_nonneg(w, "CustomTable::cumulative");
  const auto& d = *data_;
  if (w > d.w.back()) {
    if (d.tail == TablePolicy::reject) {
      throw std::out_of_range("CustomTable: w beyond last knot");
    }
    return d.cum.back() + d.phi.back() * std::log(w / d.w.back());
  }
  if (w == 0.0) {
    return 0.0;
  }
  const std::size_t i = segment(w);
  const double slope = (d.phi[i + 1] - d.phi[i]) / (d.w[i + 1] - d.w[i]);
  const double intercept = d.phi[i] - slope * d.w[i];
  double part = slope * (w - d.w[i]);
  if (d.w[i] > 0.0) {
    part += intercept * std::log(w / d.w[i]);
  }
  return d.cum[i] + part;
}

bool CustomTable::is_monotone_positive() const {
  const auto& d = *data_;
  for (std::size_t i = 1; i < d.w.size(); ++i) {
    if (!(d.phi[i] > 0.0) || d.phi[i] < d.phi[i - 1]) {
      return false;
    }
  }
  return true;
}

GeneratorSpec GeneratorSpec::phi1(double b) {
  if (!(b > 0.0)) {
    throw std::invalid_argument("phi1: b must be positive");
  }
  return GeneratorSpec(Phi1{b});
}

GeneratorSpec GeneratorSpec::phi2(double b, double gamma) {
  if (!(b > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("phi2: b and gamma must be positive");
  }
  return GeneratorSpec(Phi2{b, gamma});
}

GeneratorSpec GeneratorSpec::phi3(double a, int p) {
  if (!(a > 0.0) || p < 3) {
    throw std::invalid_argument("phi3: a must be positive and p >= 3");
  }
  return GeneratorSpec(Phi3{a, p});
}

GeneratorSpec GeneratorSpec::custom(CustomTable table) { return GeneratorSpec(std::move(table)); }

std::string GeneratorSpec::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Phi1& g) { os << "phi1(b=" << g.b << ")"; },
                 [&](const Phi2& g) { os << "phi2(b=" << g.b << ",gamma=" << g.gamma << ")"; },
                 [&](const Phi3& g) { os << "phi3(a=" << g.a << ",p=" << g.p << ")"; },
                 [&](const CustomTable& t) {
                   os << "custom(" << t.knots_w().size() << " knots)";
                 },
             },
             family_);
  return os.str();
}

double eval_generator(const GeneratorSpec& gen, double w) {
  require_nonneg(w, "eval_generator");
  return std::visit(Overloaded{
                        [&](const Phi1& g) { return w / (g.b * (w + 1.0)); },
                        [&](const Phi2& g) { return std::pow(w / g.b, g.gamma); },
                        [&](const Phi3& g) { return w / (g.a * (g.p - 2)); },
                        [&](const CustomTable& t) { return t.value(w); },
                    },
                    gen.family());
}

double cumulative(const GeneratorSpec& gen, double w) {
  require_nonneg(w, "cumulative");
  return std::visit(Overloaded{
                        [&](const Phi1& g) { return std::log1p(w) / g.b; },
                        [&](const Phi2& g) {
                          return std::pow(w, g.gamma) / (g.gamma * std::pow(g.b, g.gamma));
                        },
                        [&](const Phi3& g) { return w / (g.a * (g.p - 2)); },
                        [&](const CustomTable& t) { return t.cumulative(w); },
                    },
                    gen.family());
}

double beta_sup(const GeneratorSpec& gen) {
  return std::visit(Overloaded{
                        // w/((w+1) log(1+w)) <= 1 with limit 1 at the origin.
                        [](const Phi1&) { return 1.0; },
                        [](const Phi2& g) { return g.gamma; },
                        [](const Phi3&) { return 1.0; },
                        [](const CustomTable& t) {
                          const auto& ws = t.knots_w();
                          // ws[0] == 0; the origin segment is linear so the
                          // ratio there, and its w -> 0+ limit, is exactly 1.
                          double sup = 1.0;
                          const double first = ws[1];
                          for (int j = 1; j <= 10; ++j) {
                            const double w = first * std::pow(10.0, -j);
                            sup = std::max(sup, t.value(w) / t.cumulative(w));
                          }
                          for (std::size_t i = 1; i < ws.size(); ++i) {
                            const double jw = t.cumulative(ws[i]);
                            if (jw > 0.0) {
                              sup = std::max(sup, t.knots_phi()[i] / jw);
                            }
                          }
                          return sup;
                        },
                    },
                    gen.family());
}

bool is_admissible(const GeneratorSpec& gen) {
  if (const auto* t = std::get_if<CustomTable>(&gen.family())) {
    return t->is_monotone_positive();
  }
  return true;
}

CustomTable read_custom_table(std::istream& in, TablePolicy tail) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("custom table: empty input");
  }
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             line.end());
  if (line != "w,phi_of_w") {
    throw std::invalid_argument("custom table: expected header 'w,phi_of_w'");
  }
  std::vector<double> ws;
  std::vector<double> phis;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("custom table: missing comma on line " + std::to_string(lineno));
    }
    try {
      ws.push_back(std::stod(line.substr(0, comma)));
      phis.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("custom table: bad number on line " + std::to_string(lineno));
    }
  }
  return CustomTable(std::move(ws), std::move(phis), tail);
}

CustomTable read_custom_table_file(const std::string& path, TablePolicy tail) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("custom table: cannot open " + path);
  }
  return read_custom_table(in, tail);
}

}  // namespace steindom
