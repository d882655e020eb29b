#include "catch_amalgamated.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"
#include "lawrisk/json_io.hpp"

namespace fs = std::filesystem;
using lawrisk::cli::run;
using Catch::Approx;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(LAWRISK_TEST_DATA_DIR) + "/" + name; }

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])) || line[0] == '-')) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lawrisk_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("conjugate table", "[cli][conjugate]") {
  auto r = invoke({"conjugate", "--young", R"({"family":"power","p":2})"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("x,phi,Phi,psi,Psi\n", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 9);
  for (const auto& row : rows) {
    CHECK(row[1] == Approx(row[3]));
    CHECK(row[2] == Approx(row[4]));
  }

  r = invoke({"conjugate", "--young", R"({"family":"exp_minus"})"});
  REQUIRE(r.code == 0);
  bool seen = false;
  for (const auto& row : csv_rows(r.out))
    if (row[0] == 1.0) {
      seen = true;
      CHECK(row[4] == Approx(2 * std::log(2.0) - 1).epsilon(1e-12));
    }
  CHECK(seen);

  CHECK(invoke({"conjugate", "--young", R"({"p":2})"}).code == 2);
  CHECK(invoke({"conjugate", "--young", R"({"family":"power","p":2,"extra":1})"}).code == 2);
  CHECK(invoke({"conjugate", "--young", R"({"family":"power","p":1})"}).code == 2);
  CHECK(invoke({"conjugate", "--young", "{not json"}).code == 2);
  CHECK(invoke({"conjugate", "--young", "/nonexistent.json"}).code == 2);
  CHECK(invoke({"conjugate"}).code == 2);
  CHECK(invoke({"nosuchcommand"}).code == 2);
}

TEST_CASE("estimate command", "[cli][estimate]") {
  auto r = invoke({"estimate", "--sample", data("one_to_four.csv"), "--distortion", R"({"family":"es","alpha":0.5})"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("3.5\n", 0) == 0);
  const auto record = nlohmann::json::parse(r.out.substr(r.out.find('\n') + 1));
  CHECK(record.at("estimate").get<double>() == 3.5);

  r = invoke({"estimate", "--sample", data("single_with_header.csv"), "--distortion", R"({"family":"power","gamma":3})"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("2.5\n", 0) == 0);

  r = invoke({"estimate", "--sample", data("empty.csv"), "--distortion", R"({"family":"es","alpha":0.5})"});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());

  r = invoke({"estimate", "--sample", data("bad_row.csv"), "--distortion", R"({"family":"es","alpha":0.5})"});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 3") != std::string::npos);

  CHECK(invoke({"estimate", "--sample", "/nonexistent.csv", "--distortion", R"({"family":"es","alpha":0.5})"}).code == 2);
  CHECK(invoke({"estimate", "--sample", data("one_to_four.csv"), "--distortion", R"({"family":"es","alpha":2})"}).code == 2);
}

TEST_CASE("norm and ando commands", "[cli]") {
  auto r = invoke({"norm", "--sample", data("one_to_four.csv"), "--young", R"({"family":"power","p":1})"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == Approx(2.5).epsilon(1e-9));

  r = invoke({"ando", "--distortion", R"({"family":"es","alpha":0.5})", "--young", R"({"family":"power","p":3})", "--atoms",
              "2", "--lambdas", "1", "10", "100"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 3);
  // h = (0, 2): lambda E[Phi(h / lambda)] = (8/3) lambda^-2 / 2
  CHECK(rows[0][1] == Approx(4.0 / 3.0));
  CHECK(rows[2][1] == Approx(4.0 / 3.0 * 1e-4));
  CHECK(r.out.find("condition fails") != std::string::npos);

  r = invoke({"ando", "--distortion", R"({"family":"es","alpha":0.5})", "--young", R"({"family":"power","p":3})", "--atoms",
              "2", "--lambdas", "1", "1e4"});
  CHECK(r.out.find("condition holds") != std::string::npos);
}

TEST_CASE("brutecheck command", "[cli][brutecheck]") {
  auto r = invoke({"brutecheck", "--n", "5", "--distortion", R"({"family":"power","gamma":2})", "--trials", "100"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);

  r = invoke({"brutecheck", "--n", "1", "--distortion", R"({"family":"es","alpha":0.3})"});
  CHECK(r.code == 0);
  CHECK(r.out.find("max discrepancy 0\n") != std::string::npos);

  CHECK(invoke({"brutecheck", "--n", "8", "--distortion", R"({"family":"power","gamma":2})"}).code == 2);
  CHECK(invoke({"brutecheck", "--n", "0", "--distortion", R"({"family":"power","gamma":2})"}).code == 2);
}

TEST_CASE("converge command", "[cli][converge]") {
  const auto dir = fresh_dir("degenerate");
  const auto config = dir.string() + ".json";
  {
    std::ofstream os(config);
    os << R"({"law":{"family":"discrete_uniform","values":[4.25]},"distortion":{"family":"es","alpha":0.1},
             "schedule":[1,10,100],"seeds":[1,2]})";
  }
  auto r = invoke({"--out", dir.string(), "converge", "--config", config});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("pass") != std::string::npos);
  for (const char* name : {"trace_seed1.csv", "trace_seed2.csv"}) {
    const auto text = slurp(dir / name);
    CHECK(text.rfind("N,estimate,reference,abs_error,seed\n", 0) == 0);
    const auto rows = csv_rows(text);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) {
      CHECK(row[1] == 4.25);
      CHECK(row[3] == 0.0);
    }
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("max_final_abs_error").get<double>() == 0.0);

  // rerun overwrites identically; --seed narrows to one replication
  const auto first = slurp(dir / "summary.json");
  REQUIRE(invoke({"--out", dir.string(), "converge", "--config", config}).code == 0);
  CHECK(slurp(dir / "summary.json") == first);

  const auto seeded = fresh_dir("seeded");
  REQUIRE(invoke({"--out", seeded.string(), "--seed", "77", "converge", "--config", config}).code == 0);
  CHECK(fs::exists(seeded / "trace_seed77.csv"));
  CHECK_FALSE(fs::exists(seeded / "trace_seed1.csv"));

  const auto refused = fresh_dir("refused");
  r = invoke({"--out", refused.string(), "converge", "--config",
              R"({"law":{"family":"pareto","tail":0.8},"distortion":{"family":"es","alpha":0.05},"schedule":[10],"seeds":[1]})"});
  CHECK(r.code == 3);
  CHECK(r.err.find("infinite Choquet integral") != std::string::npos);
  CHECK_FALSE(fs::exists(refused / "summary.json"));

  CHECK(invoke({"converge", "--config", R"({"law":{"family":"uniform","a":0,"b":1},"distortion":{"family":"es","alpha":0.5},"schedule":[10,5],"seeds":[1]})"})
            .code == 2);
  CHECK(invoke({"converge", "--config", R"({"law":{"family":"uniform","a":0,"b":1},"distortion":{"family":"es","alpha":0.5},"schedule":[10],"seeds":[1],"verbose":true})"})
            .code == 2);
  fs::remove_all(dir);
  fs::remove_all(seeded);
  fs::remove(config);
}

TEST_CASE("JSON round trips", "[cli][json]") {
  namespace io = lawrisk::json;
  for (const char* text : {R"({"family":"power","p":2.5})", R"({"family":"exp_minus"})", R"({"family":"xlogx"})",
                           R"({"family":"tabulated","grid":[1,2],"phi":[1,3]})"}) {
    const auto yf = io::young_from_json(nlohmann::json::parse(text));
    CHECK(io::young_from_json(io::to_json(yf)) == yf);
  }
  for (const char* text : {R"({"family":"es","alpha":0.05})", R"({"family":"power","gamma":2})",
                           R"({"family":"piecewise","knots":[[0,0],[0.9,0.3],[1,1]]})"}) {
    const auto f = io::distortion_from_json(nlohmann::json::parse(text));
    CHECK(io::to_json(io::distortion_from_json(io::to_json(f))) == io::to_json(f));
  }
  for (const char* text : {R"({"family":"uniform","a":0,"b":2})", R"({"family":"exponential","rate":1})",
                           R"({"family":"pareto","tail":3,"scale":2})", R"({"family":"lognormal","mu":0,"sigma":1})",
                           R"({"family":"discrete_uniform","values":[3,1]})"}) {
    const auto law = io::law_from_json(nlohmann::json::parse(text));
    CHECK(io::law_from_json(io::to_json(law)) == law);
  }
  const auto c = io::experiment_from_json(nlohmann::json::parse(
      R"({"law":{"family":"pareto","tail":3},"distortion":{"family":"power","gamma":2},"schedule":[10,100],"seeds":[3,4],
          "mode":"l-psi-ando","psi":{"family":"power","p":2},"tolerance":0.02,"fresh_samples":true})"));
  CHECK(c.options.mode == lawrisk::HypothesisMode::l_psi_ando);
  CHECK(c.options.fresh_samples);
  CHECK(io::to_json(io::experiment_from_json(io::to_json(c))) == io::to_json(c));

  CHECK_THROWS_AS(io::law_from_json(nlohmann::json::parse(R"({"family":"pareto","alpha":3})")), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(io::distortion_from_json(nlohmann::json::parse(R"({"family":"es"})")), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(io::young_from_json(nlohmann::json::parse(R"({"family":"cosh"})")), lawrisk::InvalidArgument);
  CHECK_THROWS_AS(io::mode_from_string("both"), lawrisk::InvalidArgument);
}
