#pragma once

// Globally adaptive 15-point Gauss-Kronrod integration over a finite
// interval. The integrand may return a double or a fixed-size Eigen array;
// vector-valued integrands share one mesh, so ratios of their components
// are formed from identically discretised integrals.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

namespace steindom::quad {

template <typename Value>
struct Estimate {
  Value value;
  Value error;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Value>
Value zero_like(const Value& v) {
  if constexpr (std::is_arithmetic_v<Value>) {
    return Value(0);
  } else {
    return Value::Zero(v.size());
  }
}

template <typename T>
auto cwise_abs(const T& v) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(v);
  } else {
    return v.abs().eval();
  }
}

template <typename Value>
double max_coeff(const Value& v) {
  if constexpr (std::is_arithmetic_v<Value>) {
    return v;
  } else {
    return v.maxCoeff();
  }
}

template <typename Value>
Value tolerance(const Value& v, double abs_tol, double rel_tol) {
  if constexpr (std::is_arithmetic_v<Value>) {
    return std::max(abs_tol, rel_tol * std::abs(v));
  } else {
    return (v.abs() * rel_tol).cwiseMax(abs_tol);
  }
}

// Per-component QUADPACK error heuristic.
inline double kronrod_error(double kronrod, double gauss, double resabs, double resasc) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double err = std::abs(kronrod - gauss);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  return err;
}

template <typename Value>
struct Panel {
  double a;
  double b;
  Value value;
  Value error;
};

template <typename Value, typename F>
Panel<Value> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const Value fc = f(center);
  Value kronrod = fc * kKronrodWeights[7];
  Value gauss = fc * kGaussWeights[3];
  Value resabs = cwise_abs(fc) * kKronrodWeights[7];

  std::array<Value, 7> f1;
  std::array<Value, 7> f2;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const Value sum = f1[j] + f2[j];
    kronrod += sum * kKronrodWeights[j];
    resabs += (cwise_abs(f1[j]) + cwise_abs(f2[j])) * kKronrodWeights[j];
    if (j % 2 == 1) {
      gauss += sum * kGaussWeights[j / 2];
    }
  }

  const Value mean = kronrod * 0.5;
  Value resasc = cwise_abs(fc - mean) * kKronrodWeights[7];
  for (int j = 0; j < 7; ++j) {
    resasc += (cwise_abs(f1[j] - mean) + cwise_abs(f2[j] - mean)) * kKronrodWeights[j];
  }

  const double scale = std::abs(half);
  Panel<Value> panel{a, b, kronrod * half, zero_like(kronrod)};
  if constexpr (std::is_arithmetic_v<Value>) {
    panel.error = kronrod_error(kronrod * half, gauss * half, resabs * scale, resasc * scale);
  } else {
    for (Eigen::Index i = 0; i < kronrod.size(); ++i) {
      panel.error[i] = kronrod_error(kronrod[i] * half, gauss[i] * half, resabs[i] * scale,
                                     resasc[i] * scale);
    }
  }
  return panel;
}

}  // namespace detail

// Integrates f over [breaks.front(), breaks.back()], starting from the panels
// delimited by `breaks`. Stops once every component satisfies
// err <= max(abs_tol, rel_tol * |value|) or max_panels is reached.
template <typename F>
auto adaptive_gk15(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol,
                   int max_panels) {
  using Value = std::decay_t<decltype(f(0.0))>;
  std::vector<detail::Panel<Value>> panels;
  panels.reserve(static_cast<std::size_t>(std::max<int>(max_panels, 16)));
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (breaks[i + 1] > breaks[i]) {
      panels.push_back(detail::gk15<Value>(f, breaks[i], breaks[i + 1]));
    }
  }

  Estimate<Value> out;
  if (panels.empty()) {
    const Value z = detail::zero_like(f(breaks.front()));
    out.value = z;
    out.error = z;
    out.converged = true;
    return out;
  }

  auto totals = [&] {
    Value v = detail::zero_like(panels.front().value);
    Value e = v;
    for (const auto& pnl : panels) {
      v += pnl.value;
      e += pnl.error;
    }
    return std::pair{v, e};
  };

  while (true) {
    auto [value, error] = totals();
    const Value tol = detail::tolerance(value, abs_tol, rel_tol);
    const Value ratio = error / tol;
    if (detail::max_coeff(ratio) <= 1.0 || static_cast<int>(panels.size()) >= max_panels) {
      out.value = value;
      out.error = error;
      out.subdivisions = static_cast<int>(panels.size());
      out.converged = detail::max_coeff(ratio) <= 1.0;
      return out;
    }

    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      double score;
      if constexpr (std::is_arithmetic_v<Value>) {
        score = panels[i].error / tol;
      } else {
        score = (panels[i].error / tol).maxCoeff();
      }
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }

    const double a = panels[worst].a;
    const double b = panels[worst].b;
    const double mid = 0.5 * (a + b);
    if (!(mid > a && mid < b)) {
      // Panel can no longer be bisected in double precision.
      out.value = value;
      out.error = error;
      out.subdivisions = static_cast<int>(panels.size());
      out.converged = false;
      return out;
    }
    panels[worst] = detail::gk15<Value>(f, a, mid);
    panels.push_back(detail::gk15<Value>(f, mid, b));
  }
}

}  // namespace steindom::quad
