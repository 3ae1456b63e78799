#pragma once

#include <map>
#include <string>
#include <vector>

#include "gelfand/audit.hpp"
#include "gelfand/levelgeom.hpp"
#include "gelfand/planar.hpp"
#include "gelfand/radial.hpp"

namespace gelfand {

inline constexpr const char* tool_version = "0.1.0";

// Whole-file helpers; write is not atomic, callers own the directory.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);  // DataError when unreadable
std::string checksum_file(const std::string& path);   // fnv1a64 of the raw bytes

// Per-run artifact registry. Artifacts map file name (relative to the run
// directory) to checksum; wall_clock maps stage name to seconds. Checksums
// make stale or corrupted caches detectable; timings are informational and
// excluded from any determinism guarantee.
struct Manifest {
    std::string config_hash;
    std::string version = tool_version;
    std::map<std::string, std::string> artifacts;
    std::map<std::string, double> wall_clock;
};

Manifest load_manifest(const std::string& dir);  // DataError when missing or malformed
void save_manifest(const std::string& dir, const Manifest& m);
// DataError when the file is missing, unlisted, or fails its checksum.
void verify_artifact(const std::string& dir, const Manifest& m, const std::string& file);

// Branch table, header `m,lambda,sup_norm,lambda1,l1_norm`. The csv holds the
// points; the json adds dimension, nonlinearity id and skipped-parameter gaps.
std::string branch_to_csv(const Branch& b);
Branch branch_from_csv(const std::string& csv);
std::string branch_to_json(const Branch& b);
Branch branch_from_json(const std::string& text);

// Radial solution as csv `r,u,du` plus a json sidecar {n, lambda, g_id}.
std::string radial_to_csv(const RadialSolution& sol);
std::string radial_sidecar_json(const RadialSolution& sol, const std::string& g_id);
RadialSolution radial_from_csv(const std::string& csv, const std::string& sidecar);

std::string profiles_to_csv(const std::vector<LevelProfile>& fam);
std::string curves_to_json(const std::vector<LevelCurve>& curves);

std::string audit_to_csv(const std::vector<AuditRecord>& recs);
std::string audit_to_json(const std::vector<AuditRecord>& recs);

// Grid field as a flat little-endian double block (row-major, exterior nodes
// zero) next to a json header {nx, ny, h, shape, params, lambda, g_id}.
void write_field(const std::string& bin_path, const std::string& json_path,
                 const ScalarField2D& u, double lambda, const std::string& g_id);
ScalarField2D load_field(const std::string& bin_path, const std::string& json_path,
                         double* lambda = nullptr, std::string* g_id = nullptr);

}  // namespace gelfand
