#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lawrisk/detail/format.hpp"
#include "lawrisk/error.hpp"

namespace lawrisk {

enum class YoungFamily { power, exp_minus, xlogx, tabulated };

/// Derivative and value of a Young function at a point.
struct YoungValues {
  double derivative; ///< phi(|x|)
  double value;      ///< Phi(x)
};

/**
 * @brief An even convex function Phi(x) = integral of phi over [0, |x|].
 *
 * Families:
 *  - power(p):   phi(x) = x^(p-1),  Phi(x) = |x|^p / p  (p >= 1; p = 1 is the L1 case)
 *  - exp_minus:  phi(x) = e^x - 1,  Phi(x) = e^|x| - |x| - 1
 *  - xlogx:      phi(x) = ln(1+x),  Phi(x) = (1+|x|) ln(1+|x|) - |x|  (conjugate of exp_minus)
 *  - tabulated:  phi piecewise linear through (0,0) and the given knots, extended
 *                beyond the last knot with the last slope.
 *
 * Tabulated knots form a monotone polyline: abscissae and derivative values are both
 * nondecreasing, so repeated abscissae encode jumps of phi and repeated derivative
 * values encode flat pieces. Conjugation swaps the two coordinates, which is exactly
 * the right-continuous inverse psi(y) = inf{u : phi(u) > y}.
 *
 * Instances are immutable.
 */
class YoungFunction {
public:
  static YoungFunction power(double p) {
    detail::require(std::isfinite(p) && p >= 1.0, "power Young function needs finite p >= 1");
    return YoungFunction(Power{p});
  }

  static YoungFunction exp_minus() { return YoungFunction(ExpMinus{}); }

  static YoungFunction xlogx() { return YoungFunction(XLogX{}); }

  static YoungFunction tabulated(std::vector<double> grid, std::vector<double> phi) {
    return YoungFunction(Tabulated::make(std::move(grid), std::move(phi)));
  }

  /// Samples `phi` on a geometric grid of `knots` points spanning [x_min, x_max].
  template <class Derivative>
  static YoungFunction tabulate(Derivative&& phi, double x_min, double x_max, std::size_t knots) {
    detail::require(x_min > 0.0 && x_max > x_min && knots >= 2, "tabulate needs 0 < x_min < x_max and >= 2 knots");
    std::vector<double> grid(knots), values(knots);
    const double ratio = std::pow(x_max / x_min, 1.0 / static_cast<double>(knots - 1));
    double x = x_min;
    for (std::size_t i = 0; i < knots; ++i) {
      grid[i] = (i + 1 == knots) ? x_max : x;
      values[i] = phi(grid[i]);
      x *= ratio;
    }
    return tabulated(std::move(grid), std::move(values));
  }

  YoungFamily family() const {
    return std::visit([](const auto& f) { return f.tag; }, rep_);
  }

  /// Exponent p of a power family.
  double exponent() const {
    const auto* p = std::get_if<Power>(&rep_);
    detail::require(p != nullptr, "exponent() requires a power Young function");
    return p->p;
  }

  /// Knot abscissae of a tabulated family (empty otherwise).
  const std::vector<double>& grid() const { return tabulated_ref().grid; }
  /// Derivative values at the knots of a tabulated family (empty otherwise).
  const std::vector<double>& knot_values() const { return tabulated_ref().phi; }

  /// phi(|x|); never throws for finite x.
  double derivative(double x) const {
    const double a = std::fabs(x);
    return std::visit([a](const auto& f) { return f.derivative(a); }, rep_);
  }

  /// Phi(x), possibly +inf when the true value exceeds the double range.
  double raw_value(double x) const {
    const double a = std::fabs(x);
    return std::visit([a](const auto& f) { return f.value(a); }, rep_);
  }

  /// Phi(x); throws OutOfRange instead of returning an infinite value.
  double value(double x) const {
    const double v = raw_value(x);
    if (!std::isfinite(v)) throw OutOfRange("Young function value overflows at x = " + detail::shortest(x));
    return v;
  }

  YoungValues evaluate(double x) const {
    detail::require(std::isfinite(x), "evaluate needs a finite argument");
    const double d = derivative(x);
    const double v = value(x);
    if (!std::isfinite(d)) throw OutOfRange("Young function derivative overflows at x = " + detail::shortest(x));
    return {d, v};
  }

  /// The conjugate built from the right-continuous inverse of phi.
  /// The L1 case power(1) has no finite conjugate and is rejected.
  YoungFunction conjugate() const {
    return std::visit([](const auto& f) { return YoungFunction(f.conjugate()); }, rep_);
  }

  friend bool operator==(const YoungFunction&, const YoungFunction&) = default;

private:
  struct Power;
  struct ExpMinus;
  struct XLogX;
  struct Tabulated;

  struct Power {
    static constexpr YoungFamily tag = YoungFamily::power;
    double p;
    double derivative(double a) const {
      if (a == 0.0) return 0.0;
      return p == 1.0 ? 1.0 : std::pow(a, p - 1.0);
    }
    double value(double a) const { return std::pow(a, p) / p; }
    Power conjugate() const {
      if (p == 1.0) throw InvalidArgument("power(1) is the L1 case; its conjugate is not a finite Young function");
      return Power{p / (p - 1.0)};
    }
    friend bool operator==(const Power&, const Power&) = default;
  };

  struct ExpMinus {
    static constexpr YoungFamily tag = YoungFamily::exp_minus;
    double derivative(double a) const { return std::expm1(a); }
    double value(double a) const {
      if (a < 1e-4) return a * a * (0.5 + a * (1.0 / 6.0 + a / 24.0));
      return std::expm1(a) - a;
    }
    XLogX conjugate() const;
    friend bool operator==(const ExpMinus&, const ExpMinus&) = default;
  };

  struct XLogX {
    static constexpr YoungFamily tag = YoungFamily::xlogx;
    double derivative(double a) const { return std::log1p(a); }
    double value(double a) const {
      if (a < 1e-4) return a * a * (0.5 + a * (-1.0 / 6.0 + a / 12.0));
      return (1.0 + a) * std::log1p(a) - a;
    }
    ExpMinus conjugate() const { return {}; }
    friend bool operator==(const XLogX&, const XLogX&) = default;
  };

  struct Tabulated {
    static constexpr YoungFamily tag = YoungFamily::tabulated;
    std::vector<double> grid;
    std::vector<double> phi;
    std::vector<double> cumulative; // Phi at each knot
    double tail_slope = 0.0;

    static Tabulated make(std::vector<double> grid, std::vector<double> phi) {
      detail::require(!grid.empty() && grid.size() == phi.size(), "tabulated Young function needs equal-length nonempty grid and phi");
      double pa = 0.0, pb = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i], b = phi[i];
        detail::require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && b > 0.0, "tabulated knots must be finite and positive");
        detail::require(a >= pa && b >= pb, "tabulated knots must be nondecreasing in both coordinates");
        detail::require(a > pa || b > pb, "tabulated knots must not repeat");
        pa = a;
        pb = b;
      }
      const std::size_t m = grid.size();
      const double a0 = m >= 2 ? grid[m - 2] : 0.0;
      const double b0 = m >= 2 ? phi[m - 2] : 0.0;
      detail::require(grid[m - 1] > a0 && phi[m - 1] > b0, "last tabulated segment must increase strictly so phi stays unbounded");

      Tabulated t;
      t.tail_slope = (phi[m - 1] - b0) / (grid[m - 1] - a0);
      t.cumulative.resize(m);
      t.cumulative[0] = 0.5 * grid[0] * phi[0];
      for (std::size_t i = 1; i < m; ++i)
        t.cumulative[i] = t.cumulative[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (phi[i] + phi[i - 1]);
      t.grid = std::move(grid);
      t.phi = std::move(phi);
      return t;
    }

    // Index of the last knot with abscissa <= a, or npos when a precedes the first knot.
    std::size_t segment(double a) const {
      const auto it = std::upper_bound(grid.begin(), grid.end(), a);
      if (it == grid.begin()) return npos;
      return static_cast<std::size_t>(it - grid.begin()) - 1;
    }

    double derivative(double a) const {
      const std::size_t i = segment(a);
      if (i == npos) return phi[0] * (a / grid[0]);
      if (i + 1 == grid.size()) return phi[i] + tail_slope * (a - grid[i]);
      const double t = (a - grid[i]) / (grid[i + 1] - grid[i]);
      return phi[i] + t * (phi[i + 1] - phi[i]);
    }

    double value(double a) const {
      const std::size_t i = segment(a);
      if (i == npos) return 0.5 * a * derivative(a);
      return cumulative[i] + 0.5 * (a - grid[i]) * (phi[i] + derivative(a));
    }

    Tabulated conjugate() const { return make(phi, grid); }

    friend bool operator==(const Tabulated& l, const Tabulated& r) { return l.grid == r.grid && l.phi == r.phi; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  };

  using Rep = std::variant<Power, ExpMinus, XLogX, Tabulated>;

  template <class F>
  explicit YoungFunction(F f) : rep_(std::move(f)) {}

  const Tabulated& tabulated_ref() const {
    static const Tabulated empty{};
    const auto* t = std::get_if<Tabulated>(&rep_);
    return t ? *t : empty;
  }

  Rep rep_;
};

inline YoungFunction::XLogX YoungFunction::ExpMinus::conjugate() const { return {}; }

/// Outcome of a finite-grid test of Phi(2x) <= C Phi(x) for x >= x0.
struct Delta2Report {
  bool satisfied = false;
  double x0 = 0.0;
  double growth_constant = std::numeric_limits<double>::infinity(); ///< C; finite when satisfied
  std::vector<std::pair<double, double>> witness_ratios;            ///< (x, Phi(2x)/Phi(x))
};

/// `count` points spaced geometrically over [lo, hi].
inline std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  detail::require(lo > 0.0 && hi >= lo && count >= 1, "geometric grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

/**
 * Decides the Delta-2 condition on a finite grid.
 *
 * A ratio above `escape_threshold` (or an overflow of Phi(2x)) refutes the condition.
 * Otherwise C is the largest ratio over the upper half of the grid, and x0 is the first
 * grid point after which every ratio stays within C; x0 is reported as 0 when the bound
 * holds over the whole grid.
 */
inline Delta2Report check_delta2(const YoungFunction& yf, const std::vector<double>& grid, double escape_threshold = 1e6) {
  detail::require(!grid.empty(), "delta2 grid must be nonempty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    detail::require(std::isfinite(grid[i]) && grid[i] > 0.0, "delta2 grid must be positive");
    detail::require(i == 0 || grid[i] > grid[i - 1], "delta2 grid must be increasing");
  }

  Delta2Report report;
  report.witness_ratios.reserve(grid.size());
  bool escaped = false;
  for (double x : grid) {
    const double num = yf.raw_value(2.0 * x);
    const double den = yf.raw_value(x);
    double ratio = std::numeric_limits<double>::infinity();
    if (std::isfinite(num) && std::isfinite(den) && den > 0.0) ratio = num / den;
    report.witness_ratios.emplace_back(x, ratio);
    if (!(ratio <= escape_threshold)) escaped = true;
  }
  if (escaped) return report;

  const std::size_t tail_begin = grid.size() / 2;
  double c = 0.0;
  for (std::size_t i = tail_begin; i < grid.size(); ++i) c = std::max(c, report.witness_ratios[i].second);
  const double slack = c * 1e-12;

  std::size_t first = grid.size();
  while (first > 0 && report.witness_ratios[first - 1].second <= c + slack) --first;

  report.satisfied = true;
  report.growth_constant = c;
  report.x0 = first == 0 ? 0.0 : grid[first];
  return report;
}

} // namespace lawrisk
