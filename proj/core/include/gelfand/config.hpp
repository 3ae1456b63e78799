#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "gelfand/nonlinearity.hpp"
#include "gelfand/planar.hpp"

namespace gelfand {

// One experiment, read from a flat key = value file with dotted sections.
// Unknown keys, malformed values and broken invariants are all collected and
// reported together in a single ConfigError.
struct ExperimentConfig {
    struct Problem {
        int n = 2;
        std::string shape = "ball";  // ball | disk | square | ellipse | polygon
        double h = 1.0 / 128;        // planar grid spacing
        double radius = 1.0;
        double side = 1.0;
        double a = 1.0, b = 1.0;
        std::vector<double> vertices;  // polygon, flat x y list
        std::string g = "exp";         // exp | power | affine | constant | tabulated
        double p = 2.0;                // power exponent
        double g_a = 1.0, g_b = 1.0;   // affine coefficients
        double g_c = 1.0;              // constant value
        std::string g_table;           // tabulated: two-column csv path
    } problem;

    struct BranchCfg {
        std::vector<double> m_grid;       // radial parameterization (ball only)
        std::vector<double> lambda_grid;  // minimal-branch parameterization
        double rel_tol = 1e-10;
        double abs_tol = 1e-12;
        double root_tol = 1e-10;
        double newton_tol = 1e-10;
        int uniform_nodes = 4096;
    } branch;

    struct AuditCfg {
        std::vector<double> t_fractions = {0.25, 0.5, 0.75};
        std::string phi = "both";  // ramp | phik | both
        std::vector<int> k_list = {1, 4, 16, 64};
        int n_levels = 64;
        double rho = 0.2;  // boundary strip width
    } audit;

    struct Output {
        std::string directory = "out";
        std::vector<std::string> formats = {"csv", "json", "svg"};
    } output;

    // Hash of the file the config was parsed from; keys cache artifacts.
    std::string source_hash;
};

// Parse + validate; throws ConfigError listing every offending field.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Invariant check used by both parse entry points; returns the list of
// offending fields (empty when valid).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// True when the problem is solved by the radial pipeline.
bool radial_problem(const ExperimentConfig& cfg);

Nonlinearity make_nonlinearity(const ExperimentConfig::Problem& p);
std::shared_ptr<const DomainMask> make_mask(const ExperimentConfig::Problem& p);

}  // namespace gelfand
