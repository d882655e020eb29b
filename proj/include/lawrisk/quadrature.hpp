#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lawrisk/detail/summation.hpp"

namespace lawrisk {

struct QuadratureOptions {
  double rel_tol = 1e-12;    ///< stop once the estimated remaining tail is below rel_tol * |integral|
  int max_levels = 200;      ///< dyadic levels per half before declaring divergence
  double piece_tol = 1e-13;  ///< Gauss-Kronrod tolerance on each piece
  unsigned piece_depth = 5;  ///< bisection depth per piece; pieces are already scale-resolved
};

struct QuadratureResult {
  double value = 0.0;
  bool converged = false;
  int levels = 0; ///< dyadic levels used, summed over both halves
};

namespace detail {

// Integrates h over (0, 1/2] as a sum over dyadic pieces [2^-(j+1), 2^-j], each split at the
// supplied breakpoints. The walk toward 0 stops when the geometric tail estimate of the
// remaining pieces falls below rel_tol times the running total; that estimate is then
// added to the result.
inline QuadratureResult integrate_toward_zero(const std::function<double(double)>& h, std::vector<double> breakpoints,
                                              const QuadratureOptions& opt) {
  using boost::math::quadrature::gauss_kronrod;
  std::sort(breakpoints.begin(), breakpoints.end());

  QuadratureResult out;
  CompensatedSum total;
  double prev = 0.0;
  int zero_run = 0;
  double hi = 0.5;
  for (int j = 1; j <= opt.max_levels; ++j) {
    const double lo = std::ldexp(1.0, -(j + 1));
    std::vector<double> cuts{lo};
    for (double b : breakpoints)
      if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);

    CompensatedSum piece;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      piece.add(gauss_kronrod<double, 31>::integrate(h, cuts[k], cuts[k + 1], opt.piece_depth, opt.piece_tol));
    const double p = piece.value();
    out.levels = j;
    if (!std::isfinite(p)) return out;
    total.add(p);

    const double ap = std::fabs(p);
    zero_run = ap == 0.0 ? zero_run + 1 : 0;
    const bool below_breakpoints = breakpoints.empty() || lo < breakpoints.front();
    if (below_breakpoints && zero_run >= 4) break;
    if (below_breakpoints && j >= 4 && ap > 0.0 && prev > 0.0) {
      const double r = ap / prev;
      if (r < 1.0) {
        const double remainder = ap * r / (1.0 - r);
        if (remainder <= opt.rel_tol * std::fabs(total.value())) {
          total.add(std::copysign(remainder, p));
          out.value = total.value();
          out.converged = true;
          return out;
        }
      }
    }
    prev = ap;
    hi = lo;
    if (j == opt.max_levels) {
      out.value = total.value();
      return out;
    }
  }
  out.value = total.value();
  out.converged = true;
  return out;
}

} // namespace detail

/**
 * @brief Integral of g over (0,1) with geometric refinement toward both endpoints.
 *
 * `lower(u)` evaluates g(u) on (0, 1/2]; `upper_tail(s)` evaluates g(1 - s) on (0, 1/2],
 * which keeps full precision near u = 1. `breakpoints` are interior points of (0,1) where
 * g may have kinks or jumps. A non-converged result means the integral did not stabilize
 * and should be treated as divergent.
 */
inline QuadratureResult integrate_unit_interval(const std::function<double(double)>& lower,
                                                const std::function<double(double)>& upper_tail,
                                                const std::vector<double>& breakpoints,
                                                const QuadratureOptions& opt = {}) {
  std::vector<double> low_cuts, high_cuts;
  for (double b : breakpoints) {
    if (b > 0.0 && b < 0.5) low_cuts.push_back(b);
    if (b > 0.5 && b < 1.0) high_cuts.push_back(1.0 - b);
  }
  const auto low = detail::integrate_toward_zero(lower, low_cuts, opt);
  const auto high = detail::integrate_toward_zero(upper_tail, high_cuts, opt);
  QuadratureResult out;
  out.value = low.value + high.value;
  out.converged = low.converged && high.converged;
  out.levels = low.levels + high.levels;
  return out;
}

} // namespace lawrisk
