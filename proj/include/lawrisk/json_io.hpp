#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lawrisk/distortion.hpp"
#include "lawrisk/error.hpp"
#include "lawrisk/laws.hpp"
#include "lawrisk/lln.hpp"
#include "lawrisk/young_function.hpp"

namespace lawrisk::json {

using nlohmann::json;

namespace detail {

inline void only_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw InvalidArgument("unknown field '" + key + "' in " + what);
  }
}

inline const json& field(const json& j, const char* key, const std::string& what) {
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidArgument(what + " is missing \"" + key + "\"");
  return *it;
}

inline double number(const json& j, const char* key, const std::string& what) {
  const auto& v = field(j, key, what);
  if (!v.is_number()) throw InvalidArgument(what + " field \"" + key + "\" must be a number");
  return v.get<double>();
}

inline std::vector<double> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) throw InvalidArgument(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InvalidArgument(what + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::string family(const json& j, const std::string& what) {
  const auto& f = field(j, "family", what);
  if (!f.is_string()) throw InvalidArgument(what + " \"family\" must be a string");
  return f.get<std::string>();
}

} // namespace detail

// {"family":"power","p":2} | {"family":"exp_minus"} | {"family":"xlogx"} |
// {"family":"tabulated","grid":[...],"phi":[...]}
inline YoungFunction young_from_json(const json& j) {
  const std::string what = "Young function";
  const auto fam = detail::family(j, what);
  if (fam == "power") {
    detail::only_keys(j, {"family", "p"}, what);
    return YoungFunction::power(detail::number(j, "p", what));
  }
  if (fam == "exp_minus") {
    detail::only_keys(j, {"family"}, what);
    return YoungFunction::exp_minus();
  }
  if (fam == "xlogx") {
    detail::only_keys(j, {"family"}, what);
    return YoungFunction::xlogx();
  }
  if (fam == "tabulated") {
    detail::only_keys(j, {"family", "grid", "phi"}, what);
    return YoungFunction::tabulated(detail::numbers(detail::field(j, "grid", what), "grid"),
                                    detail::numbers(detail::field(j, "phi", what), "phi"));
  }
  throw InvalidArgument("unknown Young family '" + fam + "'");
}

inline json to_json(const YoungFunction& yf) {
  switch (yf.family()) {
    case YoungFamily::power: return {{"family", "power"}, {"p", yf.exponent()}};
    case YoungFamily::exp_minus: return {{"family", "exp_minus"}};
    case YoungFamily::xlogx: return {{"family", "xlogx"}};
    case YoungFamily::tabulated: return {{"family", "tabulated"}, {"grid", yf.grid()}, {"phi", yf.knot_values()}};
  }
  return {};
}

// {"family":"es","alpha":0.05} | {"family":"power","gamma":2} |
// {"family":"piecewise","knots":[[0,0],[0.9,0.3],[1,1]]}
inline DistortionFunction distortion_from_json(const json& j) {
  const std::string what = "distortion";
  const auto fam = detail::family(j, what);
  if (fam == "es") {
    detail::only_keys(j, {"family", "alpha"}, what);
    return DistortionFunction::expected_shortfall(detail::number(j, "alpha", what));
  }
  if (fam == "power") {
    detail::only_keys(j, {"family", "gamma"}, what);
    return DistortionFunction::power(detail::number(j, "gamma", what));
  }
  if (fam == "piecewise") {
    detail::only_keys(j, {"family", "knots"}, what);
    const auto& knots = detail::field(j, "knots", what);
    if (!knots.is_array()) throw InvalidArgument("piecewise knots must be an array");
    std::vector<std::pair<double, double>> out;
    for (const auto& k : knots) {
      const auto xy = detail::numbers(k, "piecewise knot");
      if (xy.size() != 2) throw InvalidArgument("piecewise knot must be a [t, f] pair");
      out.emplace_back(xy[0], xy[1]);
    }
    return DistortionFunction::piecewise_linear(std::move(out));
  }
  throw InvalidArgument("unknown distortion family '" + fam + "'");
}

inline json to_json(const DistortionFunction& f) {
  switch (f.family()) {
    case DistortionFamily::expected_shortfall: return {{"family", "es"}, {"alpha", f.parameter()}};
    case DistortionFamily::power: return {{"family", "power"}, {"gamma", f.parameter()}};
    case DistortionFamily::piecewise_linear: {
      json knots = json::array();
      for (const auto& [t, v] : f.knots()) knots.push_back({t, v});
      return {{"family", "piecewise"}, {"knots", knots}};
    }
  }
  return {};
}

// {"family":"uniform","a":0,"b":1} | {"family":"exponential","rate":1} |
// {"family":"pareto","tail":3,"scale":1} | {"family":"lognormal","mu":0,"sigma":1} |
// {"family":"discrete_uniform","values":[...]}
inline ParametricLaw law_from_json(const json& j) {
  const std::string what = "law";
  const auto fam = detail::family(j, what);
  if (fam == "uniform") {
    detail::only_keys(j, {"family", "a", "b"}, what);
    return ParametricLaw::uniform(detail::number(j, "a", what), detail::number(j, "b", what));
  }
  if (fam == "exponential") {
    detail::only_keys(j, {"family", "rate"}, what);
    return ParametricLaw::exponential(detail::number(j, "rate", what));
  }
  if (fam == "pareto") {
    detail::only_keys(j, {"family", "tail", "scale"}, what);
    const double scale = j.contains("scale") ? detail::number(j, "scale", what) : 1.0;
    return ParametricLaw::pareto(detail::number(j, "tail", what), scale);
  }
  if (fam == "lognormal") {
    detail::only_keys(j, {"family", "mu", "sigma"}, what);
    return ParametricLaw::lognormal(detail::number(j, "mu", what), detail::number(j, "sigma", what));
  }
  if (fam == "discrete_uniform") {
    detail::only_keys(j, {"family", "values"}, what);
    return ParametricLaw::discrete_uniform(detail::numbers(detail::field(j, "values", what), "values"));
  }
  throw InvalidArgument("unknown law family '" + fam + "'");
}

inline json to_json(const ParametricLaw& law) {
  const auto p = law.parameters();
  switch (law.family()) {
    case LawFamily::uniform: return {{"family", "uniform"}, {"a", p[0]}, {"b", p[1]}};
    case LawFamily::exponential: return {{"family", "exponential"}, {"rate", p[0]}};
    case LawFamily::pareto: return {{"family", "pareto"}, {"tail", p[0]}, {"scale", p[1]}};
    case LawFamily::lognormal: return {{"family", "lognormal"}, {"mu", p[0]}, {"sigma", p[1]}};
    case LawFamily::discrete_uniform: return {{"family", "discrete_uniform"}, {"values", p}};
  }
  return {};
}

/// Configuration of a convergence experiment.
struct ExperimentConfig {
  ParametricLaw law = ParametricLaw::uniform(0.0, 1.0);
  DistortionFunction distortion = DistortionFunction::identity();
  std::vector<std::size_t> schedule;
  std::vector<std::uint64_t> seeds;
  ConvergenceOptions options;
  double tolerance = 5e-3; ///< pass threshold on the median final relative error
};

inline HypothesisMode mode_from_string(const std::string& s) {
  if (s == "m-psi") return HypothesisMode::m_psi;
  if (s == "l-psi-ando") return HypothesisMode::l_psi_ando;
  throw InvalidArgument("mode must be \"m-psi\" or \"l-psi-ando\", got '" + s + "'");
}

inline const char* to_string(HypothesisMode m) { return m == HypothesisMode::m_psi ? "m-psi" : "l-psi-ando"; }

/// Keys: law, distortion, schedule, seeds (required); mode, psi, tolerance, fresh_samples (optional).
inline ExperimentConfig experiment_from_json(const json& j) {
  const std::string what = "experiment config";
  detail::only_keys(j, {"law", "distortion", "schedule", "seeds", "mode", "psi", "tolerance", "fresh_samples"}, what);
  ExperimentConfig c;
  c.law = law_from_json(detail::field(j, "law", what));
  c.distortion = distortion_from_json(detail::field(j, "distortion", what));

  for (double v : detail::numbers(detail::field(j, "schedule", what), "schedule")) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v)))
      throw InvalidArgument("schedule entries must be positive integers");
    c.schedule.push_back(static_cast<std::size_t>(v));
  }
  lawrisk::detail::validate_schedule(c.schedule);

  const auto& seeds = detail::field(j, "seeds", what);
  if (!seeds.is_array() || seeds.empty()) throw InvalidArgument("seeds must be a nonempty array");
  for (const auto& s : seeds) {
    if (!s.is_number_unsigned()) throw InvalidArgument("seeds must be nonnegative integers");
    c.seeds.push_back(s.get<std::uint64_t>());
  }

  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw InvalidArgument("mode must be a string");
    c.options.mode = mode_from_string(j["mode"].get<std::string>());
  }
  if (j.contains("psi")) c.options.psi = young_from_json(j["psi"]);
  if (j.contains("tolerance")) {
    c.tolerance = detail::number(j, "tolerance", what);
    if (!(c.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  }
  if (j.contains("fresh_samples")) {
    if (!j["fresh_samples"].is_boolean()) throw InvalidArgument("fresh_samples must be a boolean");
    c.options.fresh_samples = j["fresh_samples"].get<bool>();
  }
  return c;
}

inline json to_json(const ExperimentConfig& c) {
  json seeds = json::array();
  for (auto s : c.seeds) seeds.push_back(s);
  return {{"law", to_json(c.law)},
          {"distortion", to_json(c.distortion)},
          {"schedule", c.schedule},
          {"seeds", seeds},
          {"mode", to_string(c.options.mode)},
          {"psi", to_json(c.options.psi)},
          {"tolerance", c.tolerance},
          {"fresh_samples", c.options.fresh_samples}};
}

} // namespace lawrisk::json
