#include "gelfand/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "gelfand/common.hpp"

namespace gelfand {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::vector<std::string> bad;

    bool to_double(const std::string& key, const std::string& v, double& out) {
        char* end = nullptr;
        double x = std::strtod(v.c_str(), &end);
        if (end == v.c_str() || *end != '\0') {
            bad.push_back(key + ": not a number: '" + v + "'");
            return false;
        }
        out = x;
        return true;
    }

    bool to_int(const std::string& key, const std::string& v, int& out) {
        double x;
        if (!to_double(key, v, x)) return false;
        if (x != static_cast<int>(x)) {
            bad.push_back(key + ": not an integer: '" + v + "'");
            return false;
        }
        out = static_cast<int>(x);
        return true;
    }

    // Whitespace-separated list; an empty value yields an empty list.
    bool to_doubles(const std::string& key, const std::string& v, std::vector<double>& out) {
        out.clear();
        std::istringstream is(v);
        std::string tok;
        while (is >> tok) {
            double x;
            if (!to_double(key, tok, x)) return false;
            out.push_back(x);
        }
        return true;
    }

    bool to_ints(const std::string& key, const std::string& v, std::vector<int>& out) {
        std::vector<double> xs;
        if (!to_doubles(key, v, xs)) return false;
        out.clear();
        for (double x : xs) {
            if (x != static_cast<int>(x)) {
                bad.push_back(key + ": not an integer list");
                return false;
            }
            out.push_back(static_cast<int>(x));
        }
        return true;
    }

    void to_strings(const std::string& v, std::vector<std::string>& out) {
        out.clear();
        std::istringstream is(v);
        std::string tok;
        while (is >> tok) out.push_back(tok);
    }
};

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> bad;
    const auto& p = cfg.problem;

    static const std::set<std::string> shapes = {"ball", "disk", "square", "ellipse", "polygon"};
    if (p.n < 2) bad.push_back("problem.n: must be >= 2");
    if (!shapes.count(p.shape)) bad.push_back("problem.shape: unknown shape '" + p.shape + "'");
    if (p.n >= 3 && p.shape != "ball")
        bad.push_back("problem.shape: only 'ball' is available for n >= 3");
    if (p.h <= 0) bad.push_back("problem.h: must be positive");
    if (p.radius <= 0) bad.push_back("problem.radius: must be positive");
    if (p.side <= 0) bad.push_back("problem.side: must be positive");
    if (p.a <= 0 || p.b <= 0) bad.push_back("problem.a/problem.b: must be positive");
    if (p.shape == "polygon" && (p.vertices.size() < 6 || p.vertices.size() % 2 != 0))
        bad.push_back("problem.vertices: need an even list of >= 3 points");

    static const std::set<std::string> kinds = {"exp", "power", "affine", "constant", "tabulated"};
    if (!kinds.count(p.g)) bad.push_back("problem.g: unknown nonlinearity '" + p.g + "'");
    if (p.g == "power" && p.p <= 1) bad.push_back("problem.p: power exponent must exceed 1");
    if (p.g == "tabulated" && p.g_table.empty())
        bad.push_back("problem.g_table: tabulated nonlinearity needs a csv path");

    const auto& b = cfg.branch;
    if (!b.m_grid.empty() && !b.lambda_grid.empty())
        bad.push_back("branch.m_grid: give either m_grid or lambda_grid, not both");
    if (!b.m_grid.empty() && p.shape != "ball")
        bad.push_back("branch.m_grid: only the radial problem is m-parameterized");
    for (auto [name, grid] : {std::pair{"branch.m_grid", &b.m_grid},
                              std::pair{"branch.lambda_grid", &b.lambda_grid}}) {
        if (grid->empty()) continue;
        bool ok = grid->front() > 0;
        for (std::size_t i = 1; i < grid->size(); ++i) ok = ok && (*grid)[i] > (*grid)[i - 1];
        if (!ok) bad.push_back(std::string(name) + ": must be positive and strictly increasing");
    }
    if (b.rel_tol <= 0) bad.push_back("branch.rel_tol: must be positive");
    if (b.abs_tol <= 0) bad.push_back("branch.abs_tol: must be positive");
    if (b.root_tol <= 0) bad.push_back("branch.root_tol: must be positive");
    if (b.newton_tol <= 0) bad.push_back("branch.newton_tol: must be positive");
    if (b.uniform_nodes < 16) bad.push_back("branch.uniform_nodes: must be >= 16");

    const auto& a = cfg.audit;
    if (a.t_fractions.empty()) bad.push_back("audit.t_fractions: must not be empty");
    for (double t : a.t_fractions)
        if (!(t > 0 && t <= 1)) {
            bad.push_back("audit.t_fractions: fractions must lie in (0, 1]");
            break;
        }
    if (a.phi != "ramp" && a.phi != "phik" && a.phi != "both")
        bad.push_back("audit.phi: must be ramp, phik or both");
    if (a.k_list.empty()) bad.push_back("audit.k_list: must not be empty");
    for (int k : a.k_list)
        if (k < 1) {
            bad.push_back("audit.k_list: entries must be >= 1");
            break;
        }
    if (a.n_levels < 16) bad.push_back("audit.n_levels: must be >= 16");
    if (a.rho <= 0) bad.push_back("audit.rho: must be positive");

    static const std::set<std::string> fmts = {"csv", "json", "svg", "bin"};
    for (const auto& f : cfg.output.formats)
        if (!fmts.count(f)) bad.push_back("output.formats: unknown format '" + f + "'");
    if (cfg.output.directory.empty()) bad.push_back("output.directory: must not be empty");

    return bad;
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.source_hash = fnv1a64_hex(text);
    Parser ps;
    std::set<std::string> seen;

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            ps.bad.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (!seen.insert(key).second)
            ps.bad.push_back(key + ": duplicate key");

        auto& p = cfg.problem;
        auto& b = cfg.branch;
        auto& a = cfg.audit;
        if (key == "problem.n") ps.to_int(key, val, p.n);
        else if (key == "problem.shape") p.shape = val;
        else if (key == "problem.h") ps.to_double(key, val, p.h);
        else if (key == "problem.radius") ps.to_double(key, val, p.radius);
        else if (key == "problem.side") ps.to_double(key, val, p.side);
        else if (key == "problem.a") ps.to_double(key, val, p.a);
        else if (key == "problem.b") ps.to_double(key, val, p.b);
        else if (key == "problem.vertices") ps.to_doubles(key, val, p.vertices);
        else if (key == "problem.g") p.g = val;
        else if (key == "problem.p") ps.to_double(key, val, p.p);
        else if (key == "problem.g_a") ps.to_double(key, val, p.g_a);
        else if (key == "problem.g_b") ps.to_double(key, val, p.g_b);
        else if (key == "problem.g_c") ps.to_double(key, val, p.g_c);
        else if (key == "problem.g_table") p.g_table = val;
        else if (key == "branch.m_grid") ps.to_doubles(key, val, b.m_grid);
        else if (key == "branch.lambda_grid") ps.to_doubles(key, val, b.lambda_grid);
        else if (key == "branch.rel_tol") ps.to_double(key, val, b.rel_tol);
        else if (key == "branch.abs_tol") ps.to_double(key, val, b.abs_tol);
        else if (key == "branch.root_tol") ps.to_double(key, val, b.root_tol);
        else if (key == "branch.newton_tol") ps.to_double(key, val, b.newton_tol);
        else if (key == "branch.uniform_nodes") ps.to_int(key, val, b.uniform_nodes);
        else if (key == "audit.t_fractions") ps.to_doubles(key, val, a.t_fractions);
        else if (key == "audit.phi") a.phi = val;
        else if (key == "audit.k_list") ps.to_ints(key, val, a.k_list);
        else if (key == "audit.n_levels") ps.to_int(key, val, a.n_levels);
        else if (key == "audit.rho") ps.to_double(key, val, a.rho);
        else if (key == "output.directory") cfg.output.directory = val;
        else if (key == "output.formats") ps.to_strings(val, cfg.output.formats);
        else ps.bad.push_back(key + ": unknown key");
    }

    auto invalid = validate_config(cfg);
    ps.bad.insert(ps.bad.end(), invalid.begin(), invalid.end());
    if (!ps.bad.empty()) {
        std::string msg = "invalid config";
        for (const auto& f : ps.bad) msg += "\n  " + f;
        throw ConfigError(msg, ps.bad);
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path, {"<file>"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

bool radial_problem(const ExperimentConfig& cfg) { return cfg.problem.shape == "ball"; }

Nonlinearity make_nonlinearity(const ExperimentConfig::Problem& p) {
    if (p.g == "exp") return Nonlinearity::exponential();
    if (p.g == "power") return Nonlinearity::power(p.p);
    if (p.g == "affine") return Nonlinearity::affine(p.g_a, p.g_b);
    if (p.g == "constant") return Nonlinearity::constant(p.g_c);
    if (p.g == "tabulated") {
        std::ifstream in(p.g_table);
        if (!in) throw ConfigError("cannot read table: " + p.g_table, {"problem.g_table"});
        std::vector<double> s, g;
        std::string line;
        while (std::getline(in, line)) {
            line.erase(std::remove(line.begin(), line.end(), ','), line.end());
            std::istringstream row(line);
            double a, b;
            if (row >> a >> b) {
                s.push_back(a);
                g.push_back(b);
            }
        }
        return Nonlinearity::tabulated(std::move(s), std::move(g));
    }
    throw ConfigError("unknown nonlinearity: " + p.g, {"problem.g"});
}

std::shared_ptr<const DomainMask> make_mask(const ExperimentConfig::Problem& p) {
    if (p.shape == "disk")
        return std::make_shared<const DomainMask>(DomainMask::disk(p.h, p.radius));
    if (p.shape == "square")
        return std::make_shared<const DomainMask>(DomainMask::square(p.h, p.side));
    if (p.shape == "ellipse")
        return std::make_shared<const DomainMask>(DomainMask::ellipse(p.h, p.a, p.b));
    if (p.shape == "polygon") {
        std::vector<std::array<double, 2>> vs(p.vertices.size() / 2);
        for (std::size_t i = 0; i < vs.size(); ++i)
            vs[i] = {p.vertices[2 * i], p.vertices[2 * i + 1]};
        return std::make_shared<const DomainMask>(DomainMask::polygon(p.h, vs));
    }
    throw ConfigError("no planar mask for shape: " + p.shape, {"problem.shape"});
}

}  // namespace gelfand
