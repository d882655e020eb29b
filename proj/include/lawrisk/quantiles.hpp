#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lawrisk/detail/summation.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/sample.hpp"
#include "lawrisk/young_function.hpp"

namespace lawrisk {

/// Equal-weight atoms kept in increasing order; F(x) = #{v_i <= x} / n.
class EmpiricalDistribution {
public:
  explicit EmpiricalDistribution(const SampleVector& xi) : sorted_(xi.values().begin(), xi.values().end()) {
    std::stable_sort(sorted_.begin(), sorted_.end());
  }

  /// Adopts values that are already sorted.
  static EmpiricalDistribution from_sorted(std::vector<double> sorted) {
    detail::require(!sorted.empty(), "empirical distribution needs at least one atom");
    detail::require(std::is_sorted(sorted.begin(), sorted.end()), "values must be sorted");
    EmpiricalDistribution d;
    d.sorted_ = std::move(sorted);
    return d;
  }

  std::span<const double> sorted_values() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

  double cdf(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

  friend bool operator==(const EmpiricalDistribution&, const EmpiricalDistribution&) = default;

private:
  EmpiricalDistribution() = default;
  std::vector<double> sorted_;
};

/// The increasing rearrangement of a sample.
inline EmpiricalDistribution empirical_from_sample(const SampleVector& xi) { return EmpiricalDistribution(xi); }

/// q(u) = inf{v : F(v) > u} for 0 <= u < 1, i.e. sorted[floor(u n)].
inline double quantile(const EmpiricalDistribution& dist, double u) {
  detail::require(u >= 0.0 && u < 1.0, "quantile level must lie in [0, 1)");
  const auto n = dist.size();
  auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(n)));
  k = std::min(k, n - 1);
  return dist.sorted_values()[k];
}

/**
 * @brief A nondecreasing map on (0,1).
 *
 * Either an empirical step function (integrals against it are exact finite sums) or a
 * parametric map. Parametric maps may supply the upper tail s -> q(1 - s) separately so
 * that levels close to 1 keep full relative precision.
 */
class QuantileFunction {
public:
  using Map = std::function<double(double)>;

  static QuantileFunction from_empirical(EmpiricalDistribution dist) {
    QuantileFunction q;
    q.empirical_ = std::make_shared<const EmpiricalDistribution>(std::move(dist));
    return q;
  }

  static QuantileFunction from_map(Map lower, Map upper_tail = {}) {
    detail::require(static_cast<bool>(lower), "quantile map must be callable");
    QuantileFunction q;
    q.lower_ = std::move(lower);
    q.upper_ = std::move(upper_tail);
    return q;
  }

  double operator()(double u) const {
    if (empirical_) return quantile(*empirical_, u);
    return lower_(u);
  }

  /// q(1 - s) for s in (0, 1].
  double upper_tail(double s) const {
    if (empirical_) return quantile(*empirical_, 1.0 - s);
    if (upper_) return upper_(s);
    return lower_(1.0 - s);
  }

  const EmpiricalDistribution* empirical() const { return empirical_.get(); }

private:
  QuantileFunction() = default;
  std::shared_ptr<const EmpiricalDistribution> empirical_;
  Map lower_;
  Map upper_;
};

/// (1/n) sum Psi(k v_i), with Psi the supplied Young function.
inline double psi_moment(const EmpiricalDistribution& dist, const YoungFunction& psi, double k) {
  detail::require(k > 0.0 && std::isfinite(k), "psi_moment needs k > 0");
  detail::CompensatedSum acc;
  for (double v : dist.sorted_values()) acc.add(psi.value(k * v));
  return acc.value() / static_cast<double>(dist.size());
}

/// sup_x |F_a(x) - F_b(x)|, evaluated at every jump of either step function.
inline double kolmogorov_distance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
  const auto va = a.sorted_values();
  const auto vb = b.sorted_values();
  const double na = static_cast<double>(va.size());
  const double nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < va.size() || j < vb.size()) {
    double x;
    if (j == vb.size() || (i < va.size() && va[i] <= vb[j]))
      x = va[i];
    else
      x = vb[j];
    while (i < va.size() && va[i] <= x) ++i;
    while (j < vb.size() && vb[j] <= x) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

} // namespace detail

/**
 * Reads a single-column CSV: one value per line, optional non-numeric header on the
 * first line, blank lines ignored. Row numbers in errors are 1-based file lines.
 */
inline SampleVector read_sample_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto cell = detail::trim(line);
    if (cell.empty()) continue;
    if (const auto v = detail::parse_double(cell)) {
      values.push_back(*v);
    } else if (row == 1) {
      continue;
    } else {
      throw InvalidArgument("non-numeric value at row " + std::to_string(row) + ": '" + std::string(cell) + "'");
    }
  }
  if (values.empty()) throw InvalidArgument("sample file contains no numeric rows");
  return SampleVector(std::move(values));
}

inline SampleVector read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open sample file '" + path + "'");
  return read_sample_csv(in);
}

} // namespace lawrisk
