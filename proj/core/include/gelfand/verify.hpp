#pragma once

#include <string>
#include <vector>

namespace gelfand {

// One acceptance criterion outcome. detail carries the measured values so a
// failure is diagnosable from the report alone.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyOptions {
    int threads = 4;
    double h_fine = 1.0 / 256;  // planar grid for the identity/coarea criteria
    double h_mid = 1.0 / 128;   // planar grid for anchors and refinement pairs
    int uniform_nodes = 4096;   // radial output grid
    int n_levels = 64;
    // Nonpositive keeps the defaults above; a config-supplied h replaces both
    // planar grids (coarse overrides surface as measured tolerance failures).
    double h_override = 0;
};

// Runs the ten acceptance criteria and returns one result each, in order.
// Tolerances are fixed here, not configurable.
std::vector<CriterionResult> run_acceptance(const VerifyOptions& opts);

}  // namespace gelfand
