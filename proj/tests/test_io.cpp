#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "regbp/io.hpp"

using namespace regbp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("regbp_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("instance documents round-trip") {
  const fs::path d = scratch("roundtrip");
  const DenseMatrix a(2, 3, {1, 0, 1, 0, 1, 1});
  const RecoveryInstance inst = RecoveryInstance::from_signal(a, {1.0, 0.0, -0.5});
  const PriorKnowledge p({0, 1}, {0.9, 0.05}, 0.1, 3);
  write_instance(d / "inst.json", "A.csv", inst, &p);
  const InstanceFile f = read_instance(d / "inst.json");
  CHECK(f.instance.a == a);
  CHECK(f.instance.y == inst.y);
  REQUIRE(f.prior);
  CHECK(f.prior->t() == p.t());
  CHECK(f.prior->mu_hat_t() == p.mu_hat_t());
  CHECK(f.prior->rho() == 0.1);
}

TEST_CASE("rho encodings and full-length estimates") {
  const fs::path d = scratch("rho");
  std::ofstream(d / "A.csv") << "1,0,0\n0,1,0\n";
  auto load = [&](const std::string& body) {
    std::ofstream(d / "i.json") << body;
    return read_instance(d / "i.json");
  };
  CHECK(std::isinf(load(R"({"A": "A.csv", "y": [1, 0], "T": [0], "mu_hat": [1], "rho": null})").prior->rho()));
  CHECK(std::isinf(load(R"({"A": "A.csv", "y": [1, 0], "T": [0], "mu_hat": [1], "rho": "inf"})").prior->rho()));
  CHECK(std::isinf(load(R"({"A": "A.csv", "y": [1, 0], "T": [0], "mu_hat": [1]})").prior->rho()));
  const InstanceFile f = load(R"({"A": "A.csv", "y": [1, 0], "T": [0], "mu_hat": [0.9, 5, 5], "rho": 0.2})");
  CHECK(f.prior->mu_hat_t() == Vector{0.9});
  CHECK_FALSE(load(R"({"A": "A.csv", "y": [1, 0]})").prior);
}

TEST_CASE("malformed documents") {
  const fs::path d = scratch("bad");
  std::ofstream(d / "A.csv") << "1,0\n0,1\n";
  auto load = [&](const std::string& body) {
    std::ofstream(d / "i.json") << body;
    return read_instance(d / "i.json");
  };
  CHECK_THROWS_AS(load("{"), IoError);
  CHECK_THROWS_AS(load(R"({"A": "A.csv", "y": [1, 0], "extra": 1})"), IoError);
  CHECK_THROWS_AS(load(R"({"A": "missing.csv", "y": [1, 0]})"), IoError);
  CHECK_THROWS_AS(load(R"({"A": "A.csv"})"), IoError);
  CHECK_THROWS_AS(load(R"({"A": "A.csv", "y": [1, 0], "rho": "wide", "T": [0], "mu_hat": [1]})"), IoError);
  CHECK_THROWS_AS(load(R"({"A": "A.csv", "y": [1, 0], "x_true": [0, 1]})"), DomainError);
  CHECK_THROWS_AS(load(R"({"A": "A.csv", "y": [1, 0], "x_true": [1, 0], "T": [0], "mu_hat": [3], "rho": 0.5})"),
                  DomainError);
  CHECK_THROWS_AS(read_instance(d / "nope.json"), IoError);
}

TEST_CASE("RIP table CSV rows") {
  const RipTable t = RipTable::compute(DenseMatrix::identity(3), 2);
  std::ostringstream s;
  write_rip_csv(s, t);
  CHECK(s.str() == "kind,s1,s2,value\ndelta,1,0,0\ndelta,2,0,0\ntheta,1,1,0\n");
}

TEST_CASE("certification report serializes") {
  const DenseMatrix a = DenseMatrix::identity(4);
  const RecoveryInstance inst = RecoveryInstance::from_signal(a, {1.0, 0.0, 0.1, 0.0});
  const PriorKnowledge p({0}, {0.9}, 0.1, 4);
  const Certification c = certify(inst, p);
  const auto j = nlohmann::json::parse(certification_json(c));
  CHECK(j.at("verdict") == c.verdict);
  CHECK(j.at("delta") == nlohmann::json::array({2}));
  CHECK(j.at("partition").at("T_a_plus") == nlohmann::json::array({0}));
  std::ostringstream out;
  print_certification(out, c);
  CHECK(out.str().find("verdict: ") != std::string::npos);
}
