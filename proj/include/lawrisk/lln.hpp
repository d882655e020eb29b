#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <string>
#include <vector>

#include "lawrisk/detail/format.hpp"
#include "lawrisk/detail/summation.hpp"
#include "lawrisk/distortion.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/laws.hpp"
#include "lawrisk/orlicz.hpp"
#include "lawrisk/quadrature.hpp"
#include "lawrisk/rng.hpp"
#include "lawrisk/young_function.hpp"

namespace lawrisk {

/// iid draws q_law(U_i) with U_i the counter-based variates offset .. offset + n - 1.
inline SampleVector sample(const ParametricLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t offset = 0) {
  detail::require(n >= 1, "sample size must be at least 1");
  const CounterRng rng(seed);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = law.transform(rng.uniform(offset + i));
  return SampleVector(std::move(values));
}

inline constexpr double reference_rel_tol = 1e-12;

/// rho(mu) = integral of q_law f' over (0,1). Throws Divergence when the integral is infinite.
inline double reference_value(const ParametricLaw& law, const DistortionFunction& f) {
  QuadratureOptions opt;
  opt.rel_tol = reference_rel_tol;
  return choquet_quadrature(law.quantile_function(), f, opt);
}

inline std::string describe(const DistortionFunction& f) {
  using detail::shortest;
  switch (f.family()) {
    case DistortionFamily::expected_shortfall: return "es(" + shortest(f.parameter()) + ')';
    case DistortionFamily::power: return "power(" + shortest(f.parameter()) + ')';
    case DistortionFamily::piecewise_linear: {
      std::string out = "piecewise(";
      for (std::size_t i = 0; i < f.knots().size(); ++i)
        out += (i ? ";" : "") + shortest(f.knots()[i].first) + ':' + shortest(f.knots()[i].second);
      return out + ')';
    }
  }
  return "?";
}

enum class HypothesisMode {
  m_psi,      ///< xi in M^Psi; moment convergence for every k
  l_psi_ando, ///< xi in L^Psi and the scenario set satisfies Ando's criterion
};

struct ConvergenceOptions {
  HypothesisMode mode = HypothesisMode::m_psi;
  YoungFunction psi = YoungFunction::power(1.0); ///< the space the law must live in
  bool fresh_samples = false;                    ///< draw disjoint samples per N instead of one nested path
};

struct GateDecision {
  bool admitted = false;
  std::string reason;
};

/// Ryff densities used by the Ando part of the gate.
inline constexpr std::size_t ando_gate_atoms = 6;

inline std::vector<double> ando_gate_lambdas() {
  std::vector<double> out;
  for (int e = 0; e <= 12; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

/**
 * Decides whether a convergence run is covered by one of the two almost-sure
 * convergence results: xi in M^Psi, or xi in L^Psi with an Ando-compact scenario set.
 * Distortion densities are bounded, so the scenario set always lies in L^Phi; what
 * remains is the moment hypothesis on the law, and in l-psi-ando mode the Ando profile
 * of the Ryff densities under Phi = conjugate(Psi).
 */
inline GateDecision check_gate(const ParametricLaw& law, const DistortionFunction& f, const ConvergenceOptions& opt) {
  if (!law.has_finite_mean())
    return {false, "infinite Choquet integral: " + law.label() + " has no finite mean"};

  const PsiClass cls = psi_class(law, opt.psi);
  if (opt.mode == HypothesisMode::m_psi) {
    if (cls != PsiClass::in_m_psi)
      return {false, "m-psi mode needs the law in M^Psi, but " + law.label() + " is " + to_string(cls)};
    return {true, "law in M^Psi"};
  }

  if (cls == PsiClass::outside) return {false, "l-psi-ando mode needs the law in L^Psi, but " + law.label() + " is outside"};
  const auto scenarios = ryff_scenarios(f, ando_gate_atoms, PermutationSelection::all());
  if (opt.psi.family() == YoungFamily::power && opt.psi.exponent() == 1.0) {
    // L1 case: the dual space is L-infinity and finite-resolution Ryff densities are bounded.
    return {true, std::string("law in ") + to_string(cls) + "; bounded scenario densities"};
  }
  const auto profile = ando_profile(scenarios.densities(), opt.psi.conjugate(), ando_gate_lambdas());
  if (!profile.converges())
    return {false, "scenario set fails Ando's criterion at lambda = 1e12"};
  return {true, std::string("law in ") + to_string(cls) + "; Ando profile converges"};
}

/// One replication: rho(mu_N) along a schedule, against rho(mu).
struct ConvergenceTrace {
  std::vector<std::size_t> schedule;
  std::vector<double> estimates;
  double reference = 0.0;
  std::vector<double> abs_errors;
  std::uint64_t seed = 0;
  std::string law;
  std::string distortion;
};

namespace detail {

inline void validate_schedule(const std::vector<std::size_t>& schedule) {
  require(!schedule.empty(), "schedule must be nonempty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    require(schedule[i] >= 1, "schedule entries must be at least 1");
    require(i == 0 || schedule[i] > schedule[i - 1], "schedule must be increasing");
  }
}

inline ConvergenceTrace trace_one(const ParametricLaw& law, const DistortionFunction& f, const std::vector<std::size_t>& schedule,
                                  std::uint64_t seed, double reference, bool fresh) {
  ConvergenceTrace trace;
  trace.schedule = schedule;
  trace.reference = reference;
  trace.seed = seed;
  trace.law = law.label();
  trace.distortion = describe(f);

  const CounterRng rng(seed);
  std::vector<double> sorted;
  std::uint64_t drawn = 0;
  for (std::size_t n : schedule) {
    if (fresh) {
      sorted.resize(n);
      for (std::size_t i = 0; i < n; ++i) sorted[i] = law.transform(rng.uniform(drawn + i));
      std::sort(sorted.begin(), sorted.end());
      drawn += n;
    } else {
      const std::size_t old = sorted.size();
      sorted.resize(n);
      for (std::size_t i = old; i < n; ++i) sorted[i] = law.transform(rng.uniform(i));
      std::sort(sorted.begin() + static_cast<std::ptrdiff_t>(old), sorted.end());
      std::inplace_merge(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(old), sorted.end());
    }
    const auto w = distortion_increments(f, n);
    const double est = choquet_sorted(sorted, w);
    trace.estimates.push_back(est);
    trace.abs_errors.push_back(std::fabs(est - reference));
  }
  return trace;
}

} // namespace detail

/**
 * Single-path trajectory of rho(mu_N): the estimate at N uses the first N draws of the
 * seed's stream, so later entries extend earlier ones. Throws GateRefusal when neither
 * convergence result covers (law, f, options).
 */
inline ConvergenceTrace run_convergence(const ParametricLaw& law, const DistortionFunction& f,
                                        const std::vector<std::size_t>& schedule, std::uint64_t seed,
                                        const ConvergenceOptions& opt = {}) {
  detail::validate_schedule(schedule);
  const auto gate = check_gate(law, f, opt);
  if (!gate.admitted) throw GateRefusal(gate.reason);
  return detail::trace_one(law, f, schedule, seed, reference_value(law, f), opt.fresh_samples);
}

/// Independent replications over seeds, run concurrently; results follow the seed order.
inline std::vector<ConvergenceTrace> run_replications(const ParametricLaw& law, const DistortionFunction& f,
                                                      const std::vector<std::size_t>& schedule,
                                                      const std::vector<std::uint64_t>& seeds,
                                                      const ConvergenceOptions& opt = {}) {
  detail::validate_schedule(schedule);
  detail::require(!seeds.empty(), "at least one seed is required");
  const auto gate = check_gate(law, f, opt);
  if (!gate.admitted) throw GateRefusal(gate.reason);
  const double reference = reference_value(law, f);

  std::vector<std::future<ConvergenceTrace>> jobs;
  jobs.reserve(seeds.size());
  for (auto seed : seeds)
    jobs.push_back(std::async(std::launch::async, [&, seed] {
      return detail::trace_one(law, f, schedule, seed, reference, opt.fresh_samples);
    }));
  std::vector<ConvergenceTrace> traces;
  traces.reserve(seeds.size());
  for (auto& job : jobs) traces.push_back(job.get());
  return traces;
}

inline double median(std::vector<double> xs) {
  detail::require(!xs.empty(), "median of an empty list");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

struct ConvergenceSummary {
  double reference = 0.0;
  std::vector<std::size_t> schedule;
  std::vector<double> median_abs_error; ///< per schedule entry, across replications
  double median_final_abs_error = 0.0;
  double max_final_abs_error = 0.0;
  double median_final_rel_error = 0.0;
  bool median_nonincreasing = false;
};

inline ConvergenceSummary summarize(const std::vector<ConvergenceTrace>& traces) {
  detail::require(!traces.empty(), "nothing to summarize");
  ConvergenceSummary s;
  s.reference = traces.front().reference;
  s.schedule = traces.front().schedule;
  for (std::size_t j = 0; j < s.schedule.size(); ++j) {
    std::vector<double> col;
    for (const auto& t : traces) col.push_back(t.abs_errors.at(j));
    s.median_abs_error.push_back(median(std::move(col)));
  }
  std::vector<double> finals;
  for (const auto& t : traces) finals.push_back(t.abs_errors.back());
  s.max_final_abs_error = *std::max_element(finals.begin(), finals.end());
  s.median_final_abs_error = median(finals);
  s.median_final_rel_error = s.reference != 0.0 ? s.median_final_abs_error / std::fabs(s.reference) : s.median_final_abs_error;
  s.median_nonincreasing = std::is_sorted(s.median_abs_error.rbegin(), s.median_abs_error.rend());
  return s;
}

/// Running averages of Psi(k xi_i) along the schedule, against E[Psi(k xi)].
struct MomentTrace {
  std::vector<std::size_t> schedule;
  std::vector<double> estimates;
  double target = 0.0;
  std::vector<double> abs_errors;
};

inline double psi_moment_target(const ParametricLaw& law, const YoungFunction& psi, double k) {
  if (law.family() == LawFamily::discrete_uniform) {
    const auto values = law.parameters();
    return psi_moment(EmpiricalDistribution::from_sorted(values), psi, k);
  }
  QuadratureOptions opt;
  opt.rel_tol = reference_rel_tol;
  const auto r = integrate_unit_interval([&](double u) { return psi.value(k * law.quantile(u)); },
                                         [&](double s) { return psi.value(k * law.quantile_upper(s)); }, {}, opt);
  if (!r.converged) throw Divergence("Psi moment integral did not stabilize; treated as infinite");
  return r.value;
}

/// Throws GateRefusal when E[Psi(k xi)] is infinite.
inline MomentTrace psi_lln_check(const ParametricLaw& law, const YoungFunction& psi, double k,
                                 const std::vector<std::size_t>& schedule, std::uint64_t seed) {
  detail::validate_schedule(schedule);
  if (!psi_moment_finite(law, psi, k))
    throw GateRefusal("E[Psi(k xi)] is infinite for " + law.label() + " at k = " + detail::shortest(k));

  MomentTrace trace;
  trace.schedule = schedule;
  trace.target = psi_moment_target(law, psi, k);

  const CounterRng rng(seed);
  detail::CompensatedSum acc;
  double base = 0.0;
  std::size_t i = 0;
  for (std::size_t n : schedule) {
    for (; i < n; ++i) {
      const double v = psi.value(k * law.transform(rng.uniform(i)));
      if (i == 0) base = v;
      acc.add(v - base);
    }
    const double est = base + acc.value() / static_cast<double>(n);
    trace.estimates.push_back(est);
    trace.abs_errors.push_back(std::fabs(est - trace.target));
  }
  return trace;
}

} // namespace lawrisk
