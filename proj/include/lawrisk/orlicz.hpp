#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lawrisk/detail/summation.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/sample.hpp"
#include "lawrisk/young_function.hpp"

namespace lawrisk {

inline constexpr double default_norm_tolerance = 1e-10;

namespace detail {

// mean of Phi(x_i / alpha); +inf on overflow
inline double mean_young(std::span<const double> xs, const YoungFunction& yf, double alpha) {
  CompensatedSum acc;
  for (double x : xs) {
    const double v = yf.raw_value(x / alpha);
    if (!std::isfinite(v)) return v;
    acc.add(v);
  }
  return acc.value() / static_cast<double>(xs.size());
}

} // namespace detail

/**
 * @brief Luxemburg norm inf{alpha > 0 : mean Phi(xi / alpha) <= 1} of an equal-weight sample.
 *
 * alpha -> mean Phi(xi/alpha) is nonincreasing, so a bracket is found by doubling and
 * halving from max|xi|, then bisected until its width is below tol * upper. The upper
 * (feasible) end is returned, so mean Phi(xi / result) <= 1 always holds.
 */
inline double luxemburg_norm(const SampleVector& xi, const YoungFunction& yf, double tol = default_norm_tolerance) {
  detail::require(tol > 0.0 && tol < 1.0, "luxemburg_norm tolerance must lie in (0, 1)");
  const auto xs = xi.values();
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) return 0.0;

  double hi = scale;
  while (!(detail::mean_young(xs, yf, hi) <= 1.0)) hi *= 2.0;
  double lo = hi;
  while (detail::mean_young(xs, yf, lo) <= 1.0) lo *= 0.5;

  for (int it = 0; it < 400 && hi - lo > tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::mean_young(xs, yf, mid) <= 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

/// Inner product E[xi eta] and its Hoelder bound 2 ||xi||_Phi ||eta||_Psi.
struct Pairing {
  double inner;
  double bound;
};

inline Pairing pairing(const SampleVector& xi, const SampleVector& eta, const YoungFunction& yf,
                       double tol = default_norm_tolerance) {
  detail::require(xi.size() == eta.size(), "pairing needs samples of equal length");
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < xi.size(); ++i) acc.add(xi[i] * eta[i]);
  const double inner = acc.value() / static_cast<double>(xi.size());
  const double bound = 2.0 * luxemburg_norm(xi, yf, tol) * luxemburg_norm(eta, yf.conjugate(), tol);
  return {inner, bound};
}

/// sup over densities h of lambda * E[Phi(h / lambda)], tabulated along a lambda schedule.
struct AndoProfile {
  std::vector<double> lambdas;
  std::vector<double> values;
  double tolerance = 1e-6;

  /// The limit condition, read off at the largest lambda.
  bool converges() const { return !values.empty() && values.back() < tolerance; }
};

inline constexpr double density_mean_tolerance = 1e-9;

inline void validate_density(const SampleVector& h) {
  for (double v : h.values()) detail::require(v >= 0.0, "density has a negative entry");
  detail::require(std::fabs(h.mean() - 1.0) <= density_mean_tolerance, "density must have mean 1");
}

inline AndoProfile ando_profile(const std::vector<SampleVector>& densities, const YoungFunction& yf,
                                const std::vector<double>& lambdas, double tolerance = 1e-6) {
  detail::require(!densities.empty(), "ando_profile needs at least one density");
  detail::require(!lambdas.empty(), "ando_profile needs a nonempty lambda schedule");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    detail::require(std::isfinite(lambdas[i]) && lambdas[i] > 0.0, "lambda schedule must be positive");
    detail::require(i == 0 || lambdas[i] > lambdas[i - 1], "lambda schedule must be increasing");
  }
  for (const auto& h : densities) validate_density(h);

  AndoProfile profile;
  profile.lambdas = lambdas;
  profile.tolerance = tolerance;
  profile.values.reserve(lambdas.size());
  for (double lambda : lambdas) {
    double best = 0.0;
    for (const auto& h : densities) best = std::max(best, lambda * detail::mean_young(h.values(), yf, lambda));
    profile.values.push_back(best);
  }
  return profile;
}

} // namespace lawrisk
