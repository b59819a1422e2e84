#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "regbp/certificates.hpp"
#include "regbp/models.hpp"
#include "regbp/rip.hpp"

namespace regbp {

struct InstanceFile {
  RecoveryInstance instance;
  std::optional<PriorKnowledge> prior;  // present when the document lists T
};

/// Instance document:
///   {"A": "matrix.csv", "y": [..], "x_true": [..], "T": [..],
///    "mu_hat": [..], "rho": r}
/// A is a CSV path resolved against the document's directory. mu_hat lists
/// one value per entry of T (a full-length vector is also accepted). rho may
/// be a number, "inf" or null (no box). x_true, T, mu_hat and rho are
/// optional; T requires mu_hat. Throws IoError on unreadable or malformed
/// files and DomainError on inconsistent content.
InstanceFile read_instance(const std::filesystem::path& json_path);

/// Writes the matrix next to the document (file name `matrix_name`) and the
/// document itself.
void write_instance(const std::filesystem::path& json_path, const std::string& matrix_name,
                    const RecoveryInstance& inst, const PriorKnowledge* prior);

/// kind,s1,s2,value rows: delta rows use s2 = 0.
void write_rip_csv(std::ostream& out, const RipTable& t);

/// Pretty-printed JSON of a certification run.
std::string certification_json(const Certification& c);
/// Human-readable condition report.
void print_certification(std::ostream& out, const Certification& c);

}  // namespace regbp
