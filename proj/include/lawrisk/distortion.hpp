#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lawrisk/detail/summation.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/quantiles.hpp"
#include "lawrisk/sample.hpp"

namespace lawrisk {

enum class DistortionFamily { expected_shortfall, power, piecewise_linear };

/**
 * @brief Convex f : [0,1] -> [0,1] with f(0) = 0 and f(1) = 1.
 *
 * The Choquet risk measure of a law with quantile q is the integral of q f' over (0,1).
 * The largest observations receive the largest weights because f is convex.
 */
class DistortionFunction {
public:
  /// f(t) = max(0, (t - (1 - alpha)) / alpha), the tail expectation of the upper alpha mass.
  static DistortionFunction expected_shortfall(double alpha) {
    detail::require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "expected shortfall level must lie in (0, 1]");
    return DistortionFunction(ExpectedShortfall{alpha});
  }

  /// f(t) = t^gamma.
  static DistortionFunction power(double gamma) {
    detail::require(std::isfinite(gamma) && gamma >= 1.0, "power distortion needs gamma >= 1");
    return DistortionFunction(Power{gamma});
  }

  static DistortionFunction identity() { return power(1.0); }

  /// Linear interpolation of knots (t_i, f_i), which must start at (0,0), end at (1,1),
  /// have strictly increasing t and nondecreasing slopes.
  static DistortionFunction piecewise_linear(std::vector<std::pair<double, double>> knots) {
    detail::require(knots.size() >= 2, "piecewise distortion needs at least two knots");
    detail::require(knots.front() == std::pair<double, double>{0.0, 0.0}, "piecewise distortion must start at (0,0)");
    detail::require(knots.back() == std::pair<double, double>{1.0, 1.0}, "piecewise distortion must end at (1,1)");
    double prev_slope = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
      const auto [t0, f0] = knots[i - 1];
      const auto [t1, f1] = knots[i];
      detail::require(std::isfinite(t1) && std::isfinite(f1) && t1 > t0, "piecewise knots must have increasing abscissae");
      const double slope = (f1 - f0) / (t1 - t0);
      detail::require(slope >= 0.0, "piecewise distortion must be nondecreasing");
      detail::require(slope >= prev_slope * (1.0 - 1e-12), "piecewise distortion must be convex");
      prev_slope = slope;
    }
    return DistortionFunction(Piecewise{std::move(knots)});
  }

  DistortionFamily family() const {
    return std::visit([](const auto& f) { return f.tag; }, rep_);
  }

  /// ES level alpha, power gamma; 0 for piecewise.
  double parameter() const {
    if (const auto* es = std::get_if<ExpectedShortfall>(&rep_)) return es->alpha;
    if (const auto* p = std::get_if<Power>(&rep_)) return p->gamma;
    return 0.0;
  }

  const std::vector<std::pair<double, double>>& knots() const {
    static const std::vector<std::pair<double, double>> none;
    const auto* p = std::get_if<Piecewise>(&rep_);
    return p ? p->knots : none;
  }

  double operator()(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return std::visit([t](const auto& f) { return f.value(t); }, rep_);
  }

  /// Right derivative of f on [0, 1).
  double derivative(double t) const {
    return std::visit([t](const auto& f) { return f.derivative(t); }, rep_);
  }

  /// Same as derivative(1 - s), computed without cancellation for small s.
  double derivative_upper(double s) const {
    return std::visit([s](const auto& f) { return f.derivative_upper(s); }, rep_);
  }

  /// Interior points of (0,1) where f' is discontinuous.
  std::vector<double> kinks() const {
    return std::visit([](const auto& f) { return f.kinks(); }, rep_);
  }

  friend bool operator==(const DistortionFunction&, const DistortionFunction&) = default;

private:
  struct ExpectedShortfall {
    static constexpr DistortionFamily tag = DistortionFamily::expected_shortfall;
    double alpha;
    double value(double t) const { return std::max(0.0, (t - (1.0 - alpha)) / alpha); }
    double derivative(double t) const { return t >= 1.0 - alpha ? 1.0 / alpha : 0.0; }
    double derivative_upper(double s) const { return s <= alpha ? 1.0 / alpha : 0.0; }
    std::vector<double> kinks() const {
      if (alpha >= 1.0) return {};
      return {1.0 - alpha};
    }
    friend bool operator==(const ExpectedShortfall&, const ExpectedShortfall&) = default;
  };

  struct Power {
    static constexpr DistortionFamily tag = DistortionFamily::power;
    double gamma;
    double value(double t) const { return std::pow(t, gamma); }
    double derivative(double t) const { return gamma == 1.0 ? 1.0 : gamma * std::pow(t, gamma - 1.0); }
    double derivative_upper(double s) const {
      return gamma == 1.0 ? 1.0 : gamma * std::exp((gamma - 1.0) * std::log1p(-s));
    }
    std::vector<double> kinks() const { return {}; }
    friend bool operator==(const Power&, const Power&) = default;
  };

  struct Piecewise {
    static constexpr DistortionFamily tag = DistortionFamily::piecewise_linear;
    std::vector<std::pair<double, double>> knots;

    std::size_t segment(double t) const {
      // last knot index i with t_i <= t, restricted to valid segment starts
      std::size_t i = 0;
      while (i + 2 < knots.size() && knots[i + 1].first <= t) ++i;
      return i;
    }
    double slope(std::size_t i) const {
      return (knots[i + 1].second - knots[i].second) / (knots[i + 1].first - knots[i].first);
    }
    double value(double t) const {
      const std::size_t i = segment(t);
      return knots[i].second + slope(i) * (t - knots[i].first);
    }
    double derivative(double t) const { return slope(segment(t)); }
    double derivative_upper(double s) const { return derivative(1.0 - s); }
    std::vector<double> kinks() const {
      std::vector<double> out;
      for (std::size_t i = 1; i + 1 < knots.size(); ++i) out.push_back(knots[i].first);
      return out;
    }
    friend bool operator==(const Piecewise&, const Piecewise&) = default;
  };

  using Rep = std::variant<ExpectedShortfall, Power, Piecewise>;
  template <class F>
  explicit DistortionFunction(F f) : rep_(std::move(f)) {}
  Rep rep_;
};

/// w_k = f(k/n) - f((k-1)/n) for k = 1..n, with the last weight taken as 1 - f((n-1)/n).
inline std::vector<double> distortion_increments(const DistortionFunction& f, std::size_t n) {
  detail::require(n >= 1, "distortion_increments needs n >= 1");
  std::vector<double> w(n);
  const double dn = static_cast<double>(n);
  double prev = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double cur = f(static_cast<double>(k) / dn);
    w[k - 1] = cur - prev;
    prev = cur;
  }
  w[n - 1] = 1.0 - prev;
  return w;
}

/// Choquet estimate of a sample that is already in increasing order, given its weights.
/// Computed as v_min + sum_k (v_k - v_min) w_k, so constant samples come out exactly.
inline double choquet_sorted(std::span<const double> sorted, std::span<const double> weights) {
  detail::require(!sorted.empty() && sorted.size() == weights.size(), "choquet_sorted needs matching nonempty inputs");
  const double base = sorted.front();
  detail::CompensatedSum acc;
  for (std::size_t k = 0; k < sorted.size(); ++k) acc.add((sorted[k] - base) * weights[k]);
  return base + acc.value();
}

/// The L-statistic sum_k xi_[n:k] (f(k/n) - f((k-1)/n)) over the order statistics of xi.
inline double choquet_empirical(const SampleVector& xi, const DistortionFunction& f) {
  const auto dist = empirical_from_sample(xi);
  const auto w = distortion_increments(f, dist.size());
  return choquet_sorted(dist.sorted_values(), w);
}

/**
 * @brief The integral of q f' over (0,1).
 *
 * For an empirical q the integral is the exact layer-cake sum
 * v_1 + sum_{k<n} (v_{k+1} - v_k) (1 - f(k/n)). For a parametric q it is adaptive
 * Gauss-Kronrod quadrature with dyadic refinement toward both endpoints; throws
 * Divergence when the refinement does not stabilize.
 */
inline double choquet_quadrature(const QuantileFunction& q, const DistortionFunction& f,
                                 const QuadratureOptions& opt = {}) {
  if (const auto* dist = q.empirical()) {
    const auto v = dist->sorted_values();
    const double dn = static_cast<double>(v.size());
    detail::CompensatedSum acc;
    for (std::size_t k = 1; k < v.size(); ++k) {
      const double gap = v[k] - v[k - 1];
      if (gap != 0.0) acc.add(gap * (1.0 - f(static_cast<double>(k) / dn)));
    }
    return v[0] + acc.value();
  }
  const auto result = integrate_unit_interval([&](double u) { return q(u) * f.derivative(u); },
                                              [&](double s) { return q.upper_tail(s) * f.derivative_upper(s); },
                                              f.kinks(), opt);
  if (!result.converged) throw Divergence("Choquet integral did not stabilize; treated as infinite");
  return result.value;
}

/// Finite collection of densities on a common n-atom uniform space.
class ScenarioSet {
public:
  explicit ScenarioSet(std::vector<SampleVector> densities) : densities_(std::move(densities)) {
    detail::require(!densities_.empty(), "scenario set must be nonempty");
    for (const auto& h : densities_) {
      detail::require(h.size() == densities_.front().size(), "scenario densities must share one atom count");
      validate_density(h);
    }
  }

  const std::vector<SampleVector>& densities() const { return densities_; }
  std::size_t atoms() const { return densities_.front().size(); }
  std::size_t size() const { return densities_.size(); }

private:
  std::vector<SampleVector> densities_;
};

/// Permutation selection for ryff_scenarios: every distinct rearrangement, or `count`
/// seeded random ones.
struct PermutationSelection {
  bool exhaustive = true;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static PermutationSelection all() { return {}; }
  static PermutationSelection random(std::size_t count, std::uint64_t seed) { return {false, count, seed}; }
};

inline constexpr std::size_t max_exhaustive_atoms = 8;

/**
 * Discrete rearrangements of f': densities h with h[sigma(k)] = n w_k for the selected
 * permutations sigma. The exhaustive selection lists each distinct density once.
 */
inline ScenarioSet ryff_scenarios(const DistortionFunction& f, std::size_t n, const PermutationSelection& selection) {
  detail::require(n >= 1, "ryff_scenarios needs n >= 1");
  auto base = distortion_increments(f, n);
  for (double& w : base) w *= static_cast<double>(n);

  std::vector<SampleVector> out;
  if (selection.exhaustive) {
    detail::require(n <= max_exhaustive_atoms, "exhaustive permutation selection is limited to n <= 8");
    std::sort(base.begin(), base.end());
    do {
      out.emplace_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
  } else {
    detail::require(selection.count >= 1, "random permutation selection needs count >= 1");
    std::mt19937_64 rng(selection.seed);
    std::vector<double> h(base);
    for (std::size_t i = 0; i < selection.count; ++i) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t k = 0; k < n; ++k) h[perm[k]] = base[k];
      out.emplace_back(h);
    }
  }
  return ScenarioSet(std::move(out));
}

inline constexpr std::size_t max_core_atoms = 20;

/// Exhaustive test of E[h] = 1 and E[h 1_A] >= f(P[A]) over all 2^n events A.
inline bool core_membership(const SampleVector& h, const DistortionFunction& f) {
  const std::size_t n = h.size();
  detail::require(n <= max_core_atoms, "core_membership enumerates 2^n events and is limited to n <= 20");
  constexpr double slack = 1e-12;
  if (std::fabs(h.mean() - 1.0) > slack) return false;

  const double dn = static_cast<double>(n);
  std::vector<double> threshold(n + 1);
  for (std::size_t m = 0; m <= n; ++m) threshold[m] = f(static_cast<double>(m) / dn) - slack;

  // Gray-code walk: one atom enters or leaves the event per step.
  double sum = 0.0;
  std::size_t members = 0;
  std::uint32_t gray = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(step));
    gray ^= (std::uint32_t{1} << bit);
    if (gray & (std::uint32_t{1} << bit)) {
      sum += h[bit];
      ++members;
    } else {
      sum -= h[bit];
      --members;
    }
    if (sum / dn < threshold[members]) {
      // rule out accumulated drift before rejecting
      double exact = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (gray & (std::uint32_t{1} << i)) exact += h[i];
      if (exact / dn < threshold[members]) return false;
      sum = exact;
    }
  }
  return true;
}

/// Convex test functions for convex_dominance.
using ConvexTestFamily = std::vector<std::function<double(double)>>;

/// Hinges x -> max(0, x - t) at every atom value of both laws and on a 33-point grid up to
/// the largest atom, plus x -> x^2.
inline ConvexTestFamily default_convex_tests(std::span<const double> a, std::span<const double> b) {
  std::set<double> knots;
  double top = 0.0;
  for (double v : a) { knots.insert(v); top = std::max(top, v); }
  for (double v : b) { knots.insert(v); top = std::max(top, v); }
  for (int i = 0; i <= 32; ++i) knots.insert(top * i / 32.0);
  ConvexTestFamily family;
  for (double t : knots) family.emplace_back([t](double x) { return std::max(0.0, x - t); });
  family.emplace_back([](double x) { return x * x; });
  return family;
}

/// E[beta(h)] <= E[beta(g)] + 1e-12 for every beta, where g is an explicit reference law
/// on the same number of atoms.
inline bool convex_dominance_against(const SampleVector& h, const SampleVector& reference, const ConvexTestFamily& betas) {
  detail::require(h.size() == reference.size(), "convex_dominance needs matching atom counts");
  const double dn = static_cast<double>(h.size());
  for (const auto& beta : betas) {
    detail::CompensatedSum lhs, rhs;
    for (double v : h.values()) lhs.add(beta(v));
    for (double v : reference.values()) rhs.add(beta(v));
    if (lhs.value() / dn > rhs.value() / dn + 1e-12) return false;
  }
  return true;
}

/// Convex dominance of h by the discrete law of f' at resolution n = h.size(), whose atoms
/// are n w_k. An empty `betas` selects default_convex_tests.
inline bool convex_dominance(const SampleVector& h, const DistortionFunction& f, const ConvexTestFamily& betas = {}) {
  validate_density(h);
  auto law = distortion_increments(f, h.size());
  for (double& w : law) w *= static_cast<double>(h.size());
  const SampleVector reference(std::move(law));
  if (betas.empty()) return convex_dominance_against(h, reference, default_convex_tests(h.values(), reference.values()));
  return convex_dominance_against(h, reference, betas);
}

/// max over densities h of E[xi h].
inline double rho_finite_scenario(const SampleVector& xi, const ScenarioSet& scenarios) {
  detail::require(xi.size() == scenarios.atoms(), "scenario set and sample must have the same atom count");
  const double dn = static_cast<double>(xi.size());
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& h : scenarios.densities()) {
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < xi.size(); ++i) acc.add(xi[i] * h[i]);
    best = std::max(best, acc.value() / dn);
  }
  return best;
}

/// Oracle: the largest pairing of xi with any rearrangement of the weights, by enumerating
/// all n! permutations. Agrees with choquet_empirical by the rearrangement inequality.
inline double bruteforce_choquet(const SampleVector& xi, const DistortionFunction& f) {
  const std::size_t n = xi.size();
  detail::require(n <= max_exhaustive_atoms, "bruteforce_choquet is limited to n <= 8");
  const auto w = distortion_increments(f, n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = -std::numeric_limits<double>::infinity();
  do {
    detail::CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(xi[i] * w[perm[i]]);
    best = std::max(best, acc.value());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

} // namespace lawrisk
