#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "lawrisk/detail/format.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/quantiles.hpp"
#include "lawrisk/young_function.hpp"

namespace lawrisk {

enum class LawFamily { uniform, exponential, pareto, lognormal, discrete_uniform };

/// Orlicz membership of a law relative to a Young function Psi.
enum class PsiClass {
  in_m_psi,    ///< E[Psi(k xi)] < inf for every k > 0
  in_l_psi,    ///< finite for some but not all k > 0
  outside,     ///< infinite for every k > 0
};

inline const char* to_string(PsiClass c) {
  switch (c) {
    case PsiClass::in_m_psi: return "M^Psi";
    case PsiClass::in_l_psi: return "L^Psi only";
    case PsiClass::outside: return "outside L^Psi";
  }
  return "?";
}

/**
 * @brief A law on the real line given by its closed-form quantile.
 *
 * Pareto(tail, scale) has survival (scale / x)^tail on x >= scale.
 * Lognormal(mu, sigma) is exp(mu + sigma Z) with Z standard normal.
 */
class ParametricLaw {
public:
  static ParametricLaw uniform(double a, double b) {
    detail::require(std::isfinite(a) && std::isfinite(b) && a < b, "uniform law needs finite a < b");
    return ParametricLaw(Uniform{a, b});
  }
  static ParametricLaw exponential(double rate) {
    detail::require(std::isfinite(rate) && rate > 0.0, "exponential law needs rate > 0");
    return ParametricLaw(Exponential{rate});
  }
  static ParametricLaw pareto(double tail, double scale = 1.0) {
    detail::require(std::isfinite(tail) && tail > 0.0, "pareto law needs a positive tail index");
    detail::require(std::isfinite(scale) && scale > 0.0, "pareto law needs a positive scale");
    return ParametricLaw(Pareto{tail, scale});
  }
  static ParametricLaw lognormal(double mu, double sigma) {
    detail::require(std::isfinite(mu) && std::isfinite(sigma) && sigma > 0.0, "lognormal law needs finite mu and sigma > 0");
    return ParametricLaw(Lognormal{mu, sigma});
  }
  static ParametricLaw discrete_uniform(std::vector<double> values) {
    detail::require(!values.empty(), "discrete uniform law needs at least one value");
    for (double v : values) detail::require(std::isfinite(v), "discrete uniform values must be finite");
    std::sort(values.begin(), values.end());
    return ParametricLaw(Discrete{std::move(values)});
  }

  LawFamily family() const {
    return std::visit([](const auto& l) { return l.tag; }, rep_);
  }

  /// q(u) for u in (0,1).
  double quantile(double u) const {
    return std::visit([u](const auto& l) { return l.quantile(u); }, rep_);
  }

  /// q(1 - s) for s in (0,1), accurate for small s.
  double quantile_upper(double s) const {
    return std::visit([s](const auto& l) { return l.upper(s); }, rep_);
  }

  /// q(u), routed through the upper-tail form for u > 1/2.
  double transform(double u) const { return u > 0.5 ? quantile_upper(1.0 - u) : quantile(u); }

  QuantileFunction quantile_function() const {
    if (const auto* d = std::get_if<Discrete>(&rep_))
      return QuantileFunction::from_empirical(EmpiricalDistribution::from_sorted(d->values));
    return QuantileFunction::from_map([law = *this](double u) { return law.quantile(u); },
                                      [law = *this](double s) { return law.quantile_upper(s); });
  }

  bool has_finite_mean() const {
    if (const auto* p = std::get_if<Pareto>(&rep_)) return p->tail > 1.0;
    return true;
  }

  /// Parameters in declaration order (values for discrete_uniform).
  std::vector<double> parameters() const {
    return std::visit([](const auto& l) { return l.parameters(); }, rep_);
  }

  std::string label() const {
    std::string out = std::string(family_name(family())) + '(';
    const auto ps = parameters();
    for (std::size_t i = 0; i < ps.size(); ++i) out += (i ? "," : "") + detail::shortest(ps[i]);
    return out + ')';
  }

  static const char* family_name(LawFamily f) {
    switch (f) {
      case LawFamily::uniform: return "uniform";
      case LawFamily::exponential: return "exponential";
      case LawFamily::pareto: return "pareto";
      case LawFamily::lognormal: return "lognormal";
      case LawFamily::discrete_uniform: return "discrete_uniform";
    }
    return "?";
  }

  /// Growth class of the law's tail, used for analytic Orlicz membership.
  enum class Tail { bounded, exponential, subexponential_all_moments, polynomial };

  Tail tail() const {
    switch (family()) {
      case LawFamily::uniform:
      case LawFamily::discrete_uniform: return Tail::bounded;
      case LawFamily::exponential: return Tail::exponential;
      case LawFamily::lognormal: return Tail::subexponential_all_moments;
      case LawFamily::pareto: return Tail::polynomial;
    }
    return Tail::polynomial;
  }

  /// Pareto tail index, or +inf for laws with all polynomial moments.
  double polynomial_tail_index() const {
    if (const auto* p = std::get_if<Pareto>(&rep_)) return p->tail;
    return std::numeric_limits<double>::infinity();
  }

  /// Exponential rate, or +inf for bounded laws, 0 for heavier-than-exponential tails.
  double exponential_rate() const {
    if (const auto* e = std::get_if<Exponential>(&rep_)) return e->rate;
    return tail() == Tail::bounded ? std::numeric_limits<double>::infinity() : 0.0;
  }

  friend bool operator==(const ParametricLaw&, const ParametricLaw&) = default;

private:
  struct Uniform {
    static constexpr LawFamily tag = LawFamily::uniform;
    double a, b;
    double quantile(double u) const { return a + u * (b - a); }
    double upper(double s) const { return b - s * (b - a); }
    std::vector<double> parameters() const { return {a, b}; }
    friend bool operator==(const Uniform&, const Uniform&) = default;
  };
  struct Exponential {
    static constexpr LawFamily tag = LawFamily::exponential;
    double rate;
    double quantile(double u) const { return -std::log1p(-u) / rate; }
    double upper(double s) const { return -std::log(s) / rate; }
    std::vector<double> parameters() const { return {rate}; }
    friend bool operator==(const Exponential&, const Exponential&) = default;
  };
  struct Pareto {
    static constexpr LawFamily tag = LawFamily::pareto;
    double tail, scale;
    double quantile(double u) const { return scale * std::exp(-std::log1p(-u) / tail); }
    double upper(double s) const { return scale * std::pow(s, -1.0 / tail); }
    std::vector<double> parameters() const { return {tail, scale}; }
    friend bool operator==(const Pareto&, const Pareto&) = default;
  };
  struct Lognormal {
    static constexpr LawFamily tag = LawFamily::lognormal;
    double mu, sigma;
    // standard normal quantile via erfc^{-1}
    double quantile(double u) const {
      return std::exp(mu - sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u));
    }
    double upper(double s) const {
      return std::exp(mu + sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * s));
    }
    std::vector<double> parameters() const { return {mu, sigma}; }
    friend bool operator==(const Lognormal&, const Lognormal&) = default;
  };
  struct Discrete {
    static constexpr LawFamily tag = LawFamily::discrete_uniform;
    std::vector<double> values; // sorted
    double at(double u) const {
      const auto m = values.size();
      auto k = static_cast<std::size_t>(std::floor(u * static_cast<double>(m)));
      return values[std::min(k, m - 1)];
    }
    double quantile(double u) const { return at(u); }
    double upper(double s) const { return at(1.0 - s); }
    std::vector<double> parameters() const { return values; }
    friend bool operator==(const Discrete&, const Discrete&) = default;
  };

  using Rep = std::variant<Uniform, Exponential, Pareto, Lognormal, Discrete>;
  template <class L>
  explicit ParametricLaw(L l) : rep_(std::move(l)) {}
  Rep rep_;
};

/**
 * Analytic Orlicz membership of a law relative to Psi.
 *
 *  - bounded laws lie in M^Psi for every Psi.
 *  - Psi = power(p) grows like x^p, a tabulated Psi like x^2 (linear phi tail), and
 *    xlogx like x log x; all three are Delta-2, so L^Psi = M^Psi and membership
 *    reduces to a polynomial moment: Pareto(a) needs p < a (a > 1 for xlogx), while
 *    exponential and lognormal laws have every polynomial moment.
 *  - Psi = exp_minus grows like e^x: E[e^{k xi}] is finite iff k < rate for
 *    Exponential(rate) (so L^Psi only) and infinite for every k for lognormal and
 *    Pareto laws.
 */
inline PsiClass psi_class(const ParametricLaw& law, const YoungFunction& psi) {
  using Tail = ParametricLaw::Tail;
  if (law.tail() == Tail::bounded) return PsiClass::in_m_psi;

  if (psi.family() == YoungFamily::exp_minus) {
    return law.tail() == Tail::exponential ? PsiClass::in_l_psi : PsiClass::outside;
  }

  const double a = law.polynomial_tail_index();
  switch (psi.family()) {
    case YoungFamily::power: return psi.exponent() < a ? PsiClass::in_m_psi : PsiClass::outside;
    case YoungFamily::tabulated: return 2.0 < a ? PsiClass::in_m_psi : PsiClass::outside;
    case YoungFamily::xlogx: return 1.0 < a ? PsiClass::in_m_psi : PsiClass::outside;
    case YoungFamily::exp_minus: break;
  }
  return PsiClass::outside;
}

/// Whether E[Psi(k xi)] is finite for this particular k.
inline bool psi_moment_finite(const ParametricLaw& law, const YoungFunction& psi, double k) {
  detail::require(k > 0.0, "moment scale k must be positive");
  switch (psi_class(law, psi)) {
    case PsiClass::in_m_psi: return true;
    case PsiClass::outside: return false;
    case PsiClass::in_l_psi: return k < law.exponential_rate();
  }
  return false;
}

} // namespace lawrisk
