#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "regbp/bench.hpp"
#include "regbp/cli.hpp"
#include "regbp/csv.hpp"
#include "regbp/io.hpp"

using namespace regbp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "regbp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("regbp_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path small_instance(const fs::path& d) {
  const DenseMatrix a = DenseMatrix::identity(4);
  const RecoveryInstance inst = RecoveryInstance::from_signal(a, {1.0, 0.0, 0.1, 0.0});
  const PriorKnowledge p({0}, {0.9}, 0.1, 4);
  write_instance(d / "inst.json", "A.csv", inst, &p);
  return d / "inst.json";
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"solve", "--help"}).out.find("--instance") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"solve"}).code == 2);
  CHECK(run({"rip", "--matrix", "x.csv", "--workers", "0"}).code == 2);
}

TEST_CASE("solve writes the estimate") {
  const fs::path d = scratch("solve");
  const fs::path inst = small_instance(d);
  const Run r = run({"solve", "--instance", inst.string(), "--method", "regmodbp", "--out", (d / "x.csv").string(),
                     "--dump-lp", (d / "lp.txt").string()});
  CHECK(r.code == 0);
  CHECK(r.err.find("(exact)") != std::string::npos);
  CHECK(read_vector_csv(d / "x.csv") == Vector{1.0, 0.0, 0.1, 0.0});
  CHECK(fs::file_size(d / "lp.txt") > 0);
  const Run s = run({"solve", "--instance", inst.string(), "--method", "weighted_l1", "--gamma", "0.5"});
  CHECK(s.code == 0);
  CHECK(s.out == "1\n0\n0.10000000000000001\n0\n");
}

TEST_CASE("exit codes for domain and I/O failures") {
  const fs::path d = scratch("codes");
  const fs::path inst = small_instance(d);
  CHECK(run({"solve", "--instance", (d / "none.json").string()}).code == 2);
  CHECK(run({"solve", "--instance", inst.string(), "--method", "lasso"}).code == 1);
  CHECK(run({"solve", "--instance", inst.string(), "--rho", "0.01"}).code == 1);
  std::ofstream wide(d / "wide.csv");
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 25; ++j) wide << (j ? "," : "") << (i == j % 3 ? 1 : 0);
    wide << '\n';
  }
  wide.close();
  const Run r = run({"rip", "--matrix", (d / "wide.csv").string(), "--smax", "30"});
  CHECK(r.code == 1);
  CHECK(r.err.find("enumeration too large") != std::string::npos);
}

TEST_CASE("rip and certify produce reports") {
  const fs::path d = scratch("reports");
  const fs::path inst = small_instance(d);
  const Run r = run({"rip", "--matrix", (d / "A.csv").string(), "--smax", "2", "--workers", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("kind,s1,s2,value\n", 0) == 0);
  const Run c = run({"certify", "--instance", inst.string(), "--out", (d / "cert.json").string()});
  CHECK(c.code == 0);
  CHECK(c.out.find("verdict: certified") != std::string::npos);
  CHECK(fs::exists(d / "cert.json"));
}

TEST_CASE("experiment writes the three tables and honours overrides") {
  const fs::path d = scratch("experiment");
  std::ofstream(d / "cfg.json") << R"({"m": 24, "support_size": 3, "u": 1, "n": [10], "trials": 4,
      "scenario": {"kind": "quantized", "K": 2, "rho": 0.1}, "find_n_exact": true, "n_grid": [8, 16, 24]})";
  const Run r = run({"experiment", "--config", (d / "cfg.json").string(), "--out", (d / "o").string(), "--seed",
                     "3", "--gamma", "0.1,0.01", "--workers", "2"});
  CHECK(r.code == 0);
  for (const char* f : {"results.csv", "summary.csv", "n_exact.csv"}) CHECK(fs::exists(d / "o" / f));
  std::ifstream res(d / "o" / "results.csv");
  std::string all((std::istreambuf_iterator<char>(res)), {});
  CHECK(all.find("weighted_l1@0.01") != std::string::npos);
  CHECK(all.find("weighted_l1@0.05") == std::string::npos);
  std::ofstream(d / "bit.json") << R"({"m": 24, "support_size": 3, "u": 1, "n": [10], "trials": 2,
      "scenario": {"kind": "three_bit"}})";
  CHECK(run({"experiment", "--config", (d / "bit.json").string(), "--rho", "1"}).code == 1);
  CHECK(run({"experiment", "--config", (d / "missing.json").string()}).code == 2);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"table1_k2", "table1_k5", "table2", "table3"}) {
    const fs::path p = fs::path(REGBP_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
    const ExperimentConfig c = read_experiment_config(p.string());
    CHECK(c.m == 256);
    CHECK(c.trials == 100);
    CHECK(c.find_n_exact);
  }
}
