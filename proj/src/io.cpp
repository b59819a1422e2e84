#include "regbp/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "regbp/csv.hpp"

namespace regbp {

namespace {

using nlohmann::json;

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IoError(std::string("instance field '") + key + "': " + e.what());
  }
}

double parse_rho(const json& j) {
  if (j.is_null()) return kInf;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
    throw IoError("instance field 'rho': expected a number, \"inf\" or null");
  }
  if (!j.is_number()) throw IoError("instance field 'rho': expected a number, \"inf\" or null");
  return j.get<double>();
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json index_json(const IndexSet& s) { return json(s.values()); }

}  // namespace

InstanceFile read_instance(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw IoError("cannot open instance '" + json_path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("instance '" + json_path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw IoError("instance document must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "A" && key != "y" && key != "x_true" && key != "T" && key != "mu_hat" && key != "rho") {
      throw IoError("unknown instance field '" + key + "'");
    }
  }
  std::filesystem::path a_path = get<std::string>(j, "A");
  if (a_path.is_relative()) a_path = json_path.parent_path() / a_path;
  DenseMatrix a;
  try {
    a = read_matrix_csv(a_path);
  } catch (const DomainError& e) {
    throw IoError("matrix '" + a_path.string() + "': " + e.what());
  }
  const Vector y = get<Vector>(j, "y");
  std::optional<Vector> x;
  if (j.contains("x_true") && !j.at("x_true").is_null()) x = get<Vector>(j, "x_true");

  InstanceFile f{RecoveryInstance::from_measurements(std::move(a), y, std::move(x)), std::nullopt};
  if (j.contains("T")) {
    const auto t = get<std::vector<std::size_t>>(j, "T");
    const IndexSet ts = IndexSet::from_unsorted(t);
    if (ts.size() != t.size()) throw DomainError("T lists an index twice");
    Vector mu = j.contains("mu_hat") ? get<Vector>(j, "mu_hat") : Vector{};
    const std::size_t m = f.instance.m();
    if (mu.size() == m && m != ts.size()) {
      if (ts.bound() > m) throw DomainError("support estimate index out of range");
      mu = subvector(mu, ts);
    }
    const double rho = j.contains("rho") ? parse_rho(j.at("rho")) : kInf;
    f.prior.emplace(ts, std::move(mu), rho, m);
    if (f.instance.x_true) f.prior->require_feasible(*f.instance.x_true);
  } else if (j.contains("mu_hat")) {
    throw DomainError("mu_hat given without T");
  }
  return f;
}

void write_instance(const std::filesystem::path& json_path, const std::string& matrix_name,
                    const RecoveryInstance& inst, const PriorKnowledge* prior) {
  write_matrix_csv(json_path.parent_path() / matrix_name, inst.a);
  json j;
  j["A"] = matrix_name;
  j["y"] = inst.y;
  if (inst.x_true) j["x_true"] = *inst.x_true;
  if (prior) {
    j["T"] = prior->t().values();
    j["mu_hat"] = prior->mu_hat_t();
    j["rho"] = real_or_null(prior->rho());
  }
  std::ofstream out(json_path);
  if (!out) throw IoError("cannot write '" + json_path.string() + "'");
  out << j.dump(2) << '\n';
}

void write_rip_csv(std::ostream& out, const RipTable& t) {
  out << "kind,s1,s2,value\n";
  for (std::size_t s = 1; s <= t.s_max(); ++s) out << "delta," << s << ",0," << format_real(t.delta(s)) << '\n';
  for (std::size_t s1 = 1; s1 <= t.s_max(); ++s1)
    for (std::size_t s2 = 1; s1 + s2 <= t.s_max(); ++s2)
      out << "theta," << s1 << ',' << s2 << ',' << format_real(t.theta(s1, s2)) << '\n';
}

std::string certification_json(const Certification& c) {
  json j;
  j["verdict"] = c.verdict;
  j["partition"] = {{"T_a_plus", index_json(c.partition.plus)},
                    {"T_a_minus", index_json(c.partition.minus)},
                    {"T_in", index_json(c.partition.inner)}};
  j["delta"] = index_json(c.delta);
  j["delta_e"] = index_json(c.extras);
  j["good_sets"] = {{"T_a_plus_g", index_json(c.good.plus_good)},
                    {"T_a_minus_g", index_json(c.good.minus_good)},
                    {"T_b", index_json(c.good.bad)},
                    {"k_b", c.good.k_b},
                    {"searched", c.good.searched}};
  json conds = json::array();
  for (const ConditionCheck& k : c.conditions.checks) {
    conds.push_back({{"name", k.name},
                     {"lhs", real_or_null(k.lhs)},
                     {"threshold", k.threshold},
                     {"margin", real_or_null(k.margin)},
                     {"pass", k.pass}});
  }
  j["conditions"] = {{"k", c.conditions.k}, {"u", c.conditions.u}, {"k_b", c.conditions.k_b},
                   {"checks", conds},     {"pass", c.conditions.pass}};
  if (c.certificate) {
    const CertificateReport& r = *c.certificate;
    json checks = json::array();
    for (const CertificateCheck& k : r.checks)
      checks.push_back({{"name", k.name}, {"value", k.value}, {"limit", k.limit}, {"pass", k.pass}});
    j["certificate"] = {{"w", r.w},
                        {"terms", r.terms},
                        {"residuals", r.residuals},
                        {"term_norms", r.term_norms},
                        {"ratio_bound", real_or_null(r.ratio_bound)},
                        {"ratio_ok", r.ratio_ok},
                        {"converged", r.converged},
                        {"forced", r.forced},
                        {"checks", checks},
                        {"pass", r.pass}};
  } else {
    j["certificate"] = nullptr;
  }
  return j.dump(2);
}

namespace {

std::string list(const IndexSet& s) {
  std::ostringstream o;
  o << '{';
  for (std::size_t i = 0; i < s.size(); ++i) o << (i ? "," : "") << s[i];
  o << '}';
  return o.str();
}

}  // namespace

void print_certification(std::ostream& out, const Certification& c) {
  out << "active sets: T_a+ = " << list(c.partition.plus) << ", T_a- = " << list(c.partition.minus) << '\n';
  out << "misses delta = " << list(c.delta) << ", extras = " << list(c.extras) << '\n';
  out << "good sets: T_a+g = " << list(c.good.plus_good) << ", T_a-g = " << list(c.good.minus_good)
      << ", k_b = " << c.good.k_b << (c.good.searched ? "" : " (search skipped)") << '\n';
  out << "conditions (k = " << c.conditions.k << ", u = " << c.conditions.u << ", k_b = " << c.conditions.k_b
      << "):\n";
  for (const ConditionCheck& k : c.conditions.checks) {
    out << "  " << (k.pass ? "pass" : "FAIL") << "  " << k.name << " = " << k.lhs << " < " << k.threshold
        << "  (margin " << k.margin << ")\n";
  }
  if (c.certificate) {
    const CertificateReport& r = *c.certificate;
    out << "certificate: " << r.terms << " series term(s)" << (r.forced ? ", forced build" : "")
        << (r.converged ? "" : ", not converged") << (r.ratio_ok ? "" : ", decay bound violated") << '\n';
    for (const CertificateCheck& k : r.checks) {
      out << "  " << (k.pass ? "pass" : "FAIL") << "  " << k.name << " = " << k.value << " (limit " << k.limit
          << ")\n";
    }
  } else {
    out << "certificate: not built\n";
  }
  out << "verdict: " << c.verdict << '\n';
}

}  // namespace regbp
