#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "lawrisk/json_io.hpp"
#include "lawrisk/lawrisk.hpp"

namespace lawrisk::cli {
namespace {

using Json = nlohmann::json;
namespace io = lawrisk::json;

struct GlobalFlags {
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

// Inline JSON when the argument starts with '{', otherwise a path to a JSON file.
Json load_spec(const std::string& arg) {
  std::string text;
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw InvalidArgument("cannot open '" + arg + "'");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(std::string("malformed JSON: ") + e.what());
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw InvalidArgument("cannot write '" + path.string() + "'");
  os << content;
}

int cmd_conjugate(const std::string& spec, std::size_t points, double x_max, std::ostream& out) {
  if (points < 2 || !(x_max > 0.0)) throw InvalidArgument("conjugate needs --points >= 2 and --max > 0");
  const auto phi = io::young_from_json(load_spec(spec));
  const auto psi = phi.conjugate();
  out << "x,phi,Phi,psi,Psi\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
    const auto a = phi.evaluate(x);
    const auto b = psi.evaluate(x);
    out << format17(x) << ',' << format17(a.derivative) << ',' << format17(a.value) << ',' << format17(b.derivative)
        << ',' << format17(b.value) << '\n';
  }
  return exit_ok;
}

int cmd_norm(const std::string& sample_path, const std::string& spec, const GlobalFlags& g, std::ostream& out) {
  const auto xi = read_sample_csv(sample_path);
  const auto yf = io::young_from_json(load_spec(spec));
  out << format17(luxemburg_norm(xi, yf, g.tol.value_or(default_norm_tolerance))) << '\n';
  return exit_ok;
}

int cmd_estimate(const std::string& sample_path, const std::string& spec, std::ostream& out) {
  const auto xi = read_sample_csv(sample_path);
  const auto f = io::distortion_from_json(load_spec(spec));
  const double rho = choquet_empirical(xi, f);
  out << format17(rho) << '\n';
  const Json record{{"estimate", rho}, {"n", xi.size()}, {"distortion", io::to_json(f)}};
  out << record.dump() << '\n';
  return exit_ok;
}

int cmd_converge(const std::string& config_path, const GlobalFlags& g, std::ostream& out) {
  auto config = io::experiment_from_json(load_spec(config_path));
  if (g.seed) config.seeds = {*g.seed};
  if (g.tol) config.tolerance = *g.tol;

  const auto gate = check_gate(config.law, config.distortion, config.options);
  if (!gate.admitted) throw GateRefusal(gate.reason);
  const auto traces = run_replications(config.law, config.distortion, config.schedule, config.seeds, config.options);
  const auto summary = summarize(traces);

  const std::filesystem::path dir(g.out_dir);
  std::filesystem::create_directories(dir);
  Json files = Json::array();
  for (const auto& t : traces) {
    std::ostringstream csv;
    csv << "N,estimate,reference,abs_error,seed\n";
    for (std::size_t i = 0; i < t.schedule.size(); ++i)
      csv << t.schedule[i] << ',' << format17(t.estimates[i]) << ',' << format17(t.reference) << ','
          << format17(t.abs_errors[i]) << ',' << t.seed << '\n';
    const std::string name = "trace_seed" + std::to_string(t.seed) + ".csv";
    write_file(dir / name, csv.str());
    files.push_back(name);
  }

  const bool pass = summary.median_final_rel_error < config.tolerance;
  const Json report{{"config", io::to_json(config)},
                    {"gate", gate.reason},
                    {"reference", summary.reference},
                    {"schedule", summary.schedule},
                    {"median_abs_error", summary.median_abs_error},
                    {"median_final_abs_error", summary.median_final_abs_error},
                    {"max_final_abs_error", summary.max_final_abs_error},
                    {"median_final_rel_error", summary.median_final_rel_error},
                    {"median_nonincreasing", summary.median_nonincreasing},
                    {"pass", pass},
                    {"traces", files}};
  write_file(dir / "summary.json", report.dump(2) + "\n");

  out << "reference " << format17(summary.reference) << '\n';
  out << "median final relative error " << format17(summary.median_final_rel_error) << '\n';
  out << (pass ? "pass" : "fail") << '\n';
  return exit_ok;
}

int cmd_ando(const std::string& distortion_spec, const std::string& young_spec, std::size_t atoms,
             const std::vector<double>& lambdas, double threshold, std::ostream& out) {
  const auto f = io::distortion_from_json(load_spec(distortion_spec));
  const auto phi = io::young_from_json(load_spec(young_spec));
  const auto scenarios = ryff_scenarios(f, atoms, PermutationSelection::all());
  const auto profile = ando_profile(scenarios.densities(), phi, lambdas, threshold);
  out << "lambda,value\n";
  for (std::size_t i = 0; i < profile.lambdas.size(); ++i)
    out << format17(profile.lambdas[i]) << ',' << format17(profile.values[i]) << '\n';
  out << (profile.converges() ? "condition holds" : "condition fails") << " at threshold " << format17(threshold) << '\n';
  return exit_ok;
}

int cmd_brutecheck(std::size_t n, const std::string& spec, std::size_t trials, const GlobalFlags& g, std::ostream& out) {
  if (n < 1 || n > 7) throw InvalidArgument("brutecheck needs 1 <= n <= 7");
  if (trials < 1) throw InvalidArgument("brutecheck needs at least one trial");
  const auto f = io::distortion_from_json(load_spec(spec));
  const CounterRng rng(g.seed.value_or(0));
  std::uint64_t counter = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> values(n);
    for (auto& v : values) {
      v = 20.0 * rng.uniform(counter++) - 10.0;
      if (rng.uniform(counter++) < 0.25) v = std::round(v);
    }
    const SampleVector xi(std::move(values));
    worst = std::max(worst, std::fabs(bruteforce_choquet(xi, f) - choquet_empirical(xi, f)));
  }
  const bool pass = worst < 1e-12;
  out << "max discrepancy " << format17(worst) << '\n' << (pass ? "pass" : "fail") << '\n';
  return pass ? exit_ok : exit_check_failed;
}

} // namespace

std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Law-invariant risk measures on Orlicz spaces"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("--out", g.out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* tol_opt = app.add_option("--tol", tol, "Numerical tolerance")->check(CLI::PositiveNumber);

  std::string young, distortion, sample_path, config_path;
  std::size_t points = 9, atoms = 4, n = 0, trials = 100;
  double x_max = 4.0, threshold = 1e-6;
  std::vector<double> lambdas{1.0, 10.0, 100.0, 1000.0, 10000.0};

  auto* conj = app.add_subcommand("conjugate", "Tabulate phi, Phi and the conjugate psi, Psi");
  conj->add_option("--young", young, "Young function (JSON or file)")->required();
  conj->add_option("--points", points, "Grid points");
  conj->add_option("--max", x_max, "Largest grid abscissa");

  auto* norm = app.add_subcommand("norm", "Luxemburg norm of a sample");
  norm->add_option("--sample", sample_path, "Single-column CSV")->required();
  norm->add_option("--young", young, "Young function (JSON or file)")->required();

  auto* est = app.add_subcommand("estimate", "Choquet estimate of a sample");
  est->add_option("--sample", sample_path, "Single-column CSV")->required();
  est->add_option("--distortion", distortion, "Distortion (JSON or file)")->required();

  auto* conv = app.add_subcommand("converge", "Monte Carlo convergence experiment");
  conv->add_option("--config", config_path, "Experiment config (JSON file)")->required();

  auto* ando = app.add_subcommand("ando", "Ando profile of Ryff scenario densities");
  ando->add_option("--distortion", distortion, "Distortion (JSON or file)")->required();
  ando->add_option("--young", young, "Young function Phi (JSON or file)")->required();
  ando->add_option("--atoms", atoms, "Atoms per density (exhaustive permutations, <= 8)");
  ando->add_option("--lambdas", lambdas, "Increasing lambda schedule");
  ando->add_option("--threshold", threshold, "Tolerance at the largest lambda");

  auto* brute = app.add_subcommand("brutecheck", "Compare brute-force and sorted Choquet estimates");
  brute->add_option("--n", n, "Atoms per trial (<= 7)")->required();
  brute->add_option("--distortion", distortion, "Distortion (JSON or file)")->required();
  brute->add_option("--trials", trials, "Number of random trials");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return exit_invalid_input;
  }
  if (seed_opt->count() > 0) g.seed = seed;
  if (tol_opt->count() > 0) g.tol = tol;

  try {
    if (conj->parsed()) return cmd_conjugate(young, points, x_max, out);
    if (norm->parsed()) return cmd_norm(sample_path, young, g, out);
    if (est->parsed()) return cmd_estimate(sample_path, distortion, out);
    if (conv->parsed()) return cmd_converge(config_path, g, out);
    if (ando->parsed()) return cmd_ando(distortion, young, atoms, lambdas, threshold, out);
    if (brute->parsed()) return cmd_brutecheck(n, distortion, trials, g, out);
  } catch (const GateRefusal& e) {
    err << "refused: " << e.what() << '\n';
    return exit_gate_refused;
  } catch (const Divergence& e) {
    err << "refused: " << e.what() << '\n';
    return exit_gate_refused;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid_input;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid_input;
  }
  return exit_invalid_input;
}

} // namespace lawrisk::cli
