#include "gelfand/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "json.hpp"

#include "gelfand/audit.hpp"
#include "gelfand/config.hpp"
#include "gelfand/io.hpp"
#include "gelfand/levelgeom.hpp"
#include "gelfand/svg.hpp"

namespace gelfand {

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Workspace {
    ExperimentConfig cfg;
    std::string dir;
    bool want_csv = false, want_json = false, want_svg = false, want_bin = false;

    Nonlinearity g = Nonlinearity::exponential();

    Workspace(const RunOptions& opts) : cfg(parse_config_file(opts.config_path)) {
        if (!opts.out_dir.empty()) cfg.output.directory = opts.out_dir;
        dir = cfg.output.directory;
        fs::create_directories(dir);
        for (const auto& f : cfg.output.formats) {
            want_csv |= f == "csv";
            want_json |= f == "json";
            want_svg |= f == "svg";
            want_bin |= f == "bin";
        }
        g = make_nonlinearity(cfg.problem);
    }

    ShootingControl shooting() const {
        ShootingControl c;
        c.rel_tol = cfg.branch.rel_tol;
        c.abs_tol = cfg.branch.abs_tol;
        c.root_tol = cfg.branch.root_tol;
        c.uniform_nodes = cfg.branch.uniform_nodes;
        return c;
    }

    NewtonControl newton() const {
        NewtonControl c;
        c.res_tol = cfg.branch.newton_tol;
        return c;
    }
};

// Manifest that survives missing files; config changes invalidate it.
Manifest open_manifest(const Workspace& ws) {
    try {
        Manifest m = load_manifest(ws.dir);
        if (m.config_hash == ws.cfg.source_hash) return m;
    } catch (const DataError&) {
    }
    Manifest fresh;
    fresh.config_hash = ws.cfg.source_hash;
    return fresh;
}

void record_artifact(Manifest& m, const Workspace& ws, const std::string& file,
                     const std::string& content) {
    write_text_file(ws.dir + "/" + file, content);
    m.artifacts[file] = fnv1a64_hex(content);
}

void warn_conditions(const Workspace& ws, double s_max) {
    // Superlinearity is judged from sampled growth, so probe well beyond the
    // branch itself; bounded table domains cap the horizon.
    double horizon = std::max(64.0, 2.0 * s_max);
    if (ws.g.domain_max()) horizon = std::min(horizon, *ws.g.domain_max());
    auto rep = check_conditions(ws.g, std::max(horizon, 1.0), 200);
    if (!rep.superlinear)
        std::fprintf(stderr, "warning: nonlinearity '%s' is not superlinear; "
                             "no extremal parameter is expected\n",
                     ws.g.id().c_str());
    if (!rep.positive_at_zero)
        std::fprintf(stderr, "warning: nonlinearity '%s' vanishes at 0; "
                             "the minimal branch may be trivial\n",
                     ws.g.id().c_str());
}

// lambda(m) on the minimal branch: increasing up to the fold. Inverts a
// lambda target by bisection over m; the caller supplies the fold location
// (or an upper cap when the branch is monotone).
double invert_lambda(const Workspace& ws, double target, double m_hi) {
    auto ctrl = ws.shooting();
    double lo = 1e-9, hi = m_hi;
    auto lam = [&](double m) { return solve_shooting(ws.cfg.problem.n, ws.g, m, ctrl).first; };
    if (lam(hi) < target) throw NoSolutionError("lambda target beyond the traced branch");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (lam(mid) < target ? lo : hi) = mid;
        if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

// Coarse fold scan used when a lambda grid must be inverted or the extremal
// command runs without an explicit m grid.
Branch scan_branch(const Workspace& ws, int threads) {
    std::vector<double> grid;
    for (int i = 1; i <= 16; ++i) grid.push_back(0.5 * i);
    BranchControl ctrl;
    ctrl.shooting = ws.shooting();
    ctrl.threads = threads;
    Branch b = trace_branch(ws.cfg.problem.n, ws.g, grid, ctrl);
    while (first_turning_index(b) == branch_npos && grid.back() < 64.0) {
        double last = grid.back();
        for (int i = 1; i <= 8; ++i) grid.push_back(last + 0.5 * i * last / 4.0);
        b = trace_branch(ws.cfg.problem.n, ws.g, grid, ctrl);
    }
    return b;
}

Branch compute_branch(const Workspace& ws, int threads,
                      std::vector<PlanarBranchPoint>* planar_points = nullptr) {
    const auto& bc = ws.cfg.branch;
    if (radial_problem(ws.cfg)) {
        double probe = bc.m_grid.empty() ? 4.0 : bc.m_grid.back();
        warn_conditions(ws, probe);
        if (!bc.m_grid.empty()) {
            BranchControl ctrl;
            ctrl.shooting = ws.shooting();
            ctrl.threads = threads;
            return trace_branch(ws.cfg.problem.n, ws.g, bc.m_grid, ctrl);
        }
        if (bc.lambda_grid.empty())
            throw ConfigError("branch needs branch.m_grid or branch.lambda_grid",
                              {"branch.m_grid"});
        // Invert each lambda through the minimal branch.
        Branch scan = scan_branch(ws, threads);
        double m_cap;
        double lambda_cap;
        std::size_t fold = first_turning_index(scan);
        if (fold != branch_npos) {
            auto est = extremal_parameter(scan);
            m_cap = est.m_at_max;
            lambda_cap = est.lambda_star;
        } else {
            m_cap = scan.points.empty() ? 64.0 : scan.points.back().m;
            lambda_cap = scan.points.empty() ? 0.0 : scan.points.back().lambda;
        }
        Branch b;
        b.n = ws.cfg.problem.n;
        b.g_id = ws.g.id();
        auto ctrl = ws.shooting();
        for (double target : bc.lambda_grid) {
            if (target > lambda_cap) {
                b.gaps.push_back({target, "beyond the extremal parameter estimate"});
                continue;
            }
            try {
                double m = invert_lambda(ws, target, m_cap);
                auto [lam, sol] = solve_shooting(b.n, ws.g, m, ctrl);
                BranchPoint p;
                p.m = m;
                p.lambda = lam;
                p.sup_norm = sol.sup_norm();
                p.lambda1 = linearized_eigenvalue(sol, ws.g);
                p.l1_norm = sol.l1_norm();
                b.points.push_back(p);
            } catch (const NoSolutionError& e) {
                b.gaps.push_back({target, e.what()});
            }
        }
        return b;
    }

    // Planar: the minimal branch is continued along the lambda grid.
    if (bc.lambda_grid.empty())
        throw ConfigError("planar branches need branch.lambda_grid", {"branch.lambda_grid"});
    warn_conditions(ws, 4.0);
    auto mask = make_mask(ws.cfg.problem);
    auto pts = minimal_branch_2d(mask, ws.g, bc.lambda_grid, ws.newton());
    Branch b;
    b.n = 2;
    b.g_id = ws.g.id();
    for (const auto& p : pts) {
        BranchPoint q;
        q.m = p.u.max_value();  // sup norm stands in for the center value
        q.lambda = p.lambda;
        q.sup_norm = p.u.max_value();
        q.lambda1 = p.lambda1;
        q.l1_norm = p.u.l1_norm();
        b.points.push_back(q);
    }
    for (std::size_t i = pts.size(); i < bc.lambda_grid.size(); ++i)
        b.gaps.push_back({bc.lambda_grid[i], "newton did not converge"});
    if (planar_points) *planar_points = std::move(pts);
    return b;
}

void persist_branch(const Workspace& ws, Manifest& man, const Branch& b) {
    if (ws.want_csv) record_artifact(man, ws, "branch.csv", branch_to_csv(b));
    if (ws.want_json) record_artifact(man, ws, "branch.json", branch_to_json(b));
    if (ws.want_svg) {
        PlotSpec spec;
        spec.title = "minimal branch";
        spec.xlabel = "lambda";
        spec.ylabel = "sup u";
        PlotSeries s;
        for (const auto& p : b.points) {
            s.x.push_back(p.lambda);
            s.y.push_back(p.sup_norm);
        }
        s.label = "branch";
        spec.series.push_back(std::move(s));
        if (!b.points.empty()) {
            auto apex = std::max_element(b.points.begin(), b.points.end(),
                                         [](const BranchPoint& a, const BranchPoint& c) {
                                             return a.lambda < c.lambda;
                                         });
            spec.markers.push_back(
                {apex->lambda, apex->sup_norm, "#c23a3a", "lambda* estimate"});
            spec.vlines.push_back(apex->lambda);
            for (std::size_t i = 0; i + 1 < b.points.size(); ++i) {
                const auto& a = b.points[i];
                const auto& c = b.points[i + 1];
                if (a.lambda1 > 0 && c.lambda1 <= 0) {
                    double w = a.lambda1 / (a.lambda1 - c.lambda1);
                    spec.markers.push_back({a.lambda + w * (c.lambda - a.lambda),
                                            a.sup_norm + w * (c.sup_norm - a.sup_norm),
                                            "#2a8f4a", "lambda1 = 0"});
                    break;
                }
            }
        }
        record_artifact(man, ws, "branch.svg", render_svg_plot(spec));
    }
}

// Cached branch when the manifest vouches for it; recomputed (and persisted)
// otherwise. Checksum mismatches are hard errors; missing files are not.
Branch ensure_branch(const Workspace& ws, Manifest& man, int threads) {
    for (const char* file : {"branch.json", "branch.csv"}) {
        auto it = man.artifacts.find(file);
        if (it == man.artifacts.end()) continue;
        std::string content;
        try {
            content = read_text_file(ws.dir + "/" + std::string(file));
        } catch (const DataError&) {
            continue;  // deleted cache: recompute below
        }
        if (fnv1a64_hex(content) != it->second)
            throw DataError(std::string(file) + ": checksum mismatch (stale or corrupt cache); "
                                                "delete the file to recompute");
        return std::string(file) == "branch.json" ? branch_from_json(content)
                                                  : branch_from_csv(content);
    }
    auto t0 = clock_type::now();
    Branch b = compute_branch(ws, threads);
    man.wall_clock["branch"] = seconds_since(t0);
    persist_branch(ws, man, b);
    return b;
}

std::vector<std::size_t> select_points(const Branch& b, const std::string& selector) {
    if (b.points.empty()) throw std::runtime_error("selector: the branch has no points");
    std::vector<std::size_t> idx;
    if (selector == "all") {
        idx.resize(b.points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        return idx;
    }
    if (selector == "last" || selector.empty()) return {b.points.size() - 1};

    auto eq = selector.find('=');
    std::string key = eq == std::string::npos ? selector : selector.substr(0, eq);
    if (eq == std::string::npos || (key != "m" && key != "lambda"))
        throw std::runtime_error("selector: expected last, all, m=<v> or lambda=<v>, got '" +
                                 selector + "'");
    char* end = nullptr;
    std::string vstr = selector.substr(eq + 1);
    double v = std::strtod(vstr.c_str(), &end);
    if (end == vstr.c_str() || *end != '\0')
        throw std::runtime_error("selector: bad number '" + vstr + "'");
    bool by_m = key == "m";
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        double have = by_m ? b.points[i].m : b.points[i].lambda;
        if (std::abs(have - v) <= 1e-6 * std::max(1.0, std::abs(v))) return {i};
    }
    std::string avail;
    for (const auto& p : b.points) avail += ' ' + format_double(by_m ? p.m : p.lambda);
    throw std::runtime_error("selector: no branch point at " + selector + "; available" +
                             (by_m ? " m:" : " lambda:") + avail);
}

// A selected solution, in whichever representation the problem uses.
struct Solved {
    bool radial = true;
    RadialSolution rsol;
    ScalarField2D u;
    double lambda = 0;
    double sup = 0;
    std::string id;
};

Solved materialize(const Workspace& ws, const Branch& b, std::size_t i, int threads) {
    (void)threads;
    Solved s;
    const auto& p = b.points[i];
    if (radial_problem(ws.cfg)) {
        auto [lam, sol] = solve_shooting(ws.cfg.problem.n, ws.g, p.m, ws.shooting());
        s.radial = true;
        s.rsol = std::move(sol);
        s.lambda = lam;
        s.sup = s.rsol.sup_norm();
        s.id = "m=" + format_double(p.m);
    } else {
        auto mask = make_mask(ws.cfg.problem);
        std::vector<double> grid(ws.cfg.branch.lambda_grid.begin(),
                                 ws.cfg.branch.lambda_grid.begin() + i + 1);
        auto pts = minimal_branch_2d(mask, ws.g, grid, ws.newton());
        if (pts.size() != grid.size())
            throw ConvergenceError("cached branch point did not reconverge");
        s.radial = false;
        s.u = std::move(pts.back().u);
        s.lambda = p.lambda;
        s.sup = s.u.max_value();
        s.id = "lambda=" + format_double(p.lambda);
    }
    return s;
}

std::vector<LevelProfile> profiles_of(const Solved& s, int n_levels, int threads) {
    return s.radial ? radial_profile_family(s.rsol, n_levels)
                    : profile_family(s.u, n_levels, threads);
}

}  // namespace

int run_branch(const RunOptions& opts) {
    Workspace ws(opts);
    Manifest man = open_manifest(ws);
    auto t0 = clock_type::now();
    std::vector<PlanarBranchPoint> planar_pts;
    Branch b = compute_branch(ws, opts.threads, &planar_pts);
    man.wall_clock["branch"] = seconds_since(t0);
    persist_branch(ws, man, b);
    if (ws.want_bin)
        for (std::size_t i = 0; i < planar_pts.size(); ++i) {
            std::string base = "field_" + std::to_string(i);
            write_field(ws.dir + "/" + base + ".bin", ws.dir + "/" + base + ".json",
                        planar_pts[i].u, planar_pts[i].lambda, ws.g.id());
            man.artifacts[base + ".bin"] = checksum_file(ws.dir + "/" + base + ".bin");
            man.artifacts[base + ".json"] = checksum_file(ws.dir + "/" + base + ".json");
        }
    save_manifest(ws.dir, man);

    double lam_max = 0;
    for (const auto& p : b.points) lam_max = std::max(lam_max, p.lambda);
    std::printf("branch: %zu points, %zu gaps, lambda max %s -> %s\n", b.points.size(),
                b.gaps.size(), format_double(lam_max).c_str(), ws.dir.c_str());
    return 0;
}

int run_audit(const RunOptions& opts) {
    Workspace ws(opts);
    Manifest man = open_manifest(ws);
    Branch b = ensure_branch(ws, man, opts.threads);
    auto picks = select_points(b, opts.selector);
    const auto& ac = ws.cfg.audit;

    auto t0 = clock_type::now();
    std::vector<AuditRecord> recs;
    std::vector<LevelProfile> last_profiles;
    // One C_emp(t) series per audited solution for the svg.
    std::vector<std::pair<std::string, std::vector<std::array<double, 2>>>> cemp;

    std::mt19937_64 rng(opts.seed);
    for (std::size_t i : picks) {
        Solved s = materialize(ws, b, i, opts.threads);
        auto fam = profiles_of(s, ac.n_levels, opts.threads);
        double T = s.sup;

        if (ac.phi != "phik")
            for (double f : ac.t_fractions)
                if (f < 1.0)
                    recs.push_back(check_stability_inequality(fam, make_ramp(f * T, T), s.id));
        if (ac.phi != "ramp") {
            double t0k = 0.5 * T;
            double bt = s.radial ? radial_sublevel_energy(s.rsol, t0k)
                                 : sublevel_energy(s.u, t0k);
            for (int k : ac.k_list) {
                auto phi = build_phik(fam, t0k, k);
                recs.push_back(check_stability_inequality(fam, phi, s.id));
                recs.back().check_id = "stability_phik";
                recs.back().param = k;
                recs.push_back(check_chain_bound(fam, phi, bt, s.id));
            }
        }

        if (s.radial && ws.cfg.problem.n == 4)
            recs.push_back(check_michael_simon(fam, 4, s.id));
        if (!s.radial)
            recs.push_back(check_michael_simon(extract_level(s.u, 0.5 * T), 2, s.id));

        std::vector<double> t_grid;
        for (double f : ac.t_fractions) t_grid.push_back(f * T);
        auto fam_recs = s.radial ? check_main_estimate(s.rsol, t_grid, s.id)
                                 : check_main_estimate(s.u, t_grid, s.id);
        std::vector<std::array<double, 2>> curve;
        for (const auto& r : fam_recs)
            if (r.check_id == "main_estimate") curve.push_back({r.param, r.constant});
        cemp.emplace_back(s.id, std::move(curve));
        recs.insert(recs.end(), fam_recs.begin(), fam_recs.end());

        recs.push_back(s.radial ? check_boundary_bound(s.rsol, ac.rho, s.id)
                                : check_boundary_bound(s.u, ac.rho, s.id));
        recs.push_back(s.radial ? check_lower_bound(s.rsol, ws.g, s.lambda, s.id)
                                : check_lower_bound(s.u, ws.g, s.lambda, s.id));

        // Random test functions keep the planar quadratic form honest.
        if (!s.radial)
            for (int q = 0; q < 8; ++q) {
                auto xi = random_test_function(s.u.mask_ptr(), rng);
                double mass = 0;
                const auto& w = s.u.mask().node_weights();
                for (std::size_t n = 0; n < w.size(); ++n)
                    mass += w[n] * xi.values()[n] * xi.values()[n];
                double qf = quadratic_form(s.u, ws.g, s.lambda, xi);
                auto rec = make_record("quadratic_form_sample", s.id, q, 0.0,
                                       mass > 0 ? qf / mass : 0.0);
                recs.push_back(rec);
            }

        last_profiles = std::move(fam);
    }
    man.wall_clock["audit"] = seconds_since(t0);

    if (ws.want_csv) record_artifact(man, ws, "audit.csv", audit_to_csv(recs));
    if (ws.want_json) record_artifact(man, ws, "audit.json", audit_to_json(recs));
    if (ws.want_svg) {
        PlotSpec prof;
        prof.title = "level profiles";
        prof.xlabel = "s";
        prof.ylabel = "h1, h2";
        PlotSeries h1s, h2s;
        for (const auto& p : last_profiles) {
            if (!p.regular) continue;
            h1s.x.push_back(p.s);
            h1s.y.push_back(p.h1);
            h2s.x.push_back(p.s);
            h2s.y.push_back(p.h2);
        }
        h1s.label = "h1";
        h2s.label = "h2";
        h2s.color = "#b06a10";
        prof.series = {h1s, h2s};
        record_artifact(man, ws, "profiles.svg", render_svg_plot(prof));

        PlotSpec ce;
        ce.title = "empirical constant of the main estimate";
        ce.xlabel = "t";
        ce.ylabel = "C_emp";
        static const char* palette[] = {"#1f6fb2", "#b06a10", "#2a8f4a", "#c23a3a", "#6a4ab0"};
        int ci = 0;
        for (const auto& [label, pts] : cemp) {
            PlotSeries s;
            for (const auto& xy : pts) {
                s.x.push_back(xy[0]);
                s.y.push_back(xy[1]);
            }
            s.label = label;
            s.color = palette[ci++ % 5];
            ce.series.push_back(std::move(s));
        }
        record_artifact(man, ws, "c_emp.svg", render_svg_plot(ce));
    }
    save_manifest(ws.dir, man);

    std::size_t held = 0;
    for (const auto& r : recs) held += r.holds;
    std::printf("audit: %zu solution(s), %zu records, %zu hold -> %s\n", picks.size(),
                recs.size(), held, ws.dir.c_str());
    return held == recs.size() ? 0 : 1;
}

int run_levels(const RunOptions& opts) {
    Workspace ws(opts);
    Manifest man = open_manifest(ws);
    Branch b = ensure_branch(ws, man, opts.threads);
    auto picks = select_points(b, opts.selector);
    const auto& ac = ws.cfg.audit;

    auto t0 = clock_type::now();
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t pi = 0; pi < picks.size(); ++pi) {
        Solved s = materialize(ws, b, picks[pi], opts.threads);
        auto fam = profiles_of(s, ac.n_levels, opts.threads);
        std::string suffix = picks.size() > 1 ? "_" + std::to_string(pi) : "";

        if (ws.want_csv)
            record_artifact(man, ws, "profiles" + suffix + ".csv", profiles_to_csv(fam));
        CoareaResult co = s.radial ? radial_coarea_check(s.rsol, ac.n_levels)
                                   : coarea_check(s.u, ac.n_levels);
        summary.push_back({{"solution", s.id},
                           {"coarea_lhs", co.lhs},
                           {"coarea_rhs", co.rhs},
                           {"coarea_gap", co.gap},
                           {"excluded_fraction", co.excluded_fraction}});

        if (!s.radial && ws.want_json) {
            std::vector<LevelCurve> curves;
            for (int j = 1; j <= 8; ++j) curves.push_back(extract_level(s.u, s.sup * j / 9.0));
            record_artifact(man, ws, "curves" + suffix + ".json", curves_to_json(curves));
        }
        if (ws.want_svg) {
            PlotSpec spec;
            spec.title = "level profiles " + s.id;
            spec.xlabel = "s";
            spec.ylabel = "h1, h2, V";
            PlotSeries h1s, h2s, vs;
            for (const auto& p : fam) {
                if (p.regular) {
                    h1s.x.push_back(p.s);
                    h1s.y.push_back(p.h1);
                    h2s.x.push_back(p.s);
                    h2s.y.push_back(p.h2);
                }
                vs.x.push_back(p.s);
                vs.y.push_back(p.V);
            }
            h1s.label = "h1";
            h2s.label = "h2";
            h2s.color = "#b06a10";
            vs.label = "V";
            vs.color = "#2a8f4a";
            vs.dashed = true;
            spec.series = {h1s, h2s, vs};
            record_artifact(man, ws, "profiles" + suffix + ".svg", render_svg_plot(spec));
        }
        std::printf("levels %s: coarea lhs %s rhs %s gap %s\n", s.id.c_str(),
                    format_double(co.lhs).c_str(), format_double(co.rhs).c_str(),
                    format_double(co.gap).c_str());
    }
    man.wall_clock["levels"] = seconds_since(t0);
    if (ws.want_json)
        record_artifact(man, ws, "levels.json", summary.dump(2) + "\n");
    save_manifest(ws.dir, man);
    return 0;
}

int run_extremal(const RunOptions& opts) {
    Workspace ws(opts);
    Manifest man = open_manifest(ws);
    auto t0 = clock_type::now();

    nlohmann::json out;
    if (radial_problem(ws.cfg)) {
        Branch b = ws.cfg.branch.m_grid.empty() ? scan_branch(ws, opts.threads)
                                                : ensure_branch(ws, man, opts.threads);
        auto est = extremal_parameter(b);
        out = {{"lambda_star", est.lambda_star},
               {"m_at_max", est.m_at_max},
               {"m_lo", est.m_lo},
               {"m_hi", est.m_hi}};
        std::printf("extremal: lambda* ~ %s at m ~ %s (bracket [%s, %s])\n",
                    format_double(est.lambda_star).c_str(), format_double(est.m_at_max).c_str(),
                    format_double(est.m_lo).c_str(), format_double(est.m_hi).c_str());
    } else {
        Branch b = ensure_branch(ws, man, opts.threads);
        if (b.points.empty())
            throw NoSolutionError("extremal: the planar branch has no converged points");
        const auto& last = b.points.back();
        double next = b.gaps.empty() ? last.lambda : b.gaps.front().m;
        out = {{"lambda_star", last.lambda},
               {"lambda_last_good", last.lambda},
               {"lambda_first_failed", next},
               {"sup_at_last", last.sup_norm}};
        std::printf("extremal: lambda* in [%s, %s] (planar continuation)\n",
                    format_double(last.lambda).c_str(), format_double(next).c_str());
    }
    man.wall_clock["extremal"] = seconds_since(t0);
    if (ws.want_json)
        record_artifact(man, ws, "extremal.json", out.dump(2) + "\n");
    save_manifest(ws.dir, man);
    return 0;
}

}  // namespace gelfand
