#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gelfand/audit.hpp"
#include "gelfand/commands.hpp"
#include "gelfand/config.hpp"
#include "gelfand/io.hpp"
#include "gelfand/svg.hpp"

using namespace gelfand;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_tmp") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_cfg(const fs::path& dir, const std::string& body) {
    fs::path p = dir / "exp.cfg";
    write_text_file(p.string(), body);
    return p.string();
}

RunOptions opts_for(const std::string& cfg, const fs::path& out) {
    RunOptions o;
    o.config_path = cfg;
    o.out_dir = out.string();
    o.threads = 2;
    return o;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

const std::string radial_cfg =
    "problem.n = 2\n"
    "problem.shape = ball\n"
    "problem.g = exp\n"
    "branch.m_grid = 0.5 1\n"
    "branch.uniform_nodes = 1024\n"
    "audit.n_levels = 48\n";

}  // namespace

TEST_CASE("config: parsing, defaults and collected validation errors") {
    std::string text = "# experiment\nproblem.n = 2\nproblem.shape = ball # radial\n";
    auto cfg = parse_config_text(text);
    CHECK(cfg.problem.n == 2);
    CHECK(cfg.problem.h == 1.0 / 128);
    CHECK(cfg.branch.uniform_nodes == 4096);
    CHECK(cfg.audit.phi == "both");
    CHECK(cfg.audit.t_fractions == std::vector<double>{0.25, 0.5, 0.75});
    CHECK(cfg.audit.k_list == std::vector<int>{1, 4, 16, 64});
    CHECK(cfg.output.formats == std::vector<std::string>{"csv", "json", "svg"});
    CHECK(cfg.source_hash == fnv1a64_hex(text));
    CHECK(cfg.source_hash.size() == 16);
    CHECK(radial_problem(cfg));

    // Dimension >= 3 only has the radial pipeline.
    try {
        parse_config_text("problem.n = 3\nproblem.shape = disk\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.bad_fields.size() == 1);
        CHECK(contains(e.bad_fields[0], "problem.shape"));
        CHECK(contains(e.what(), "n >= 3"));
    }

    // An empty fraction list is a config error, not a runtime surprise.
    CHECK_THROWS_AS(parse_config_text("audit.t_fractions =\n"), ConfigError);

    // Everything wrong at once is reported at once.
    try {
        parse_config_text(
            "problem.bogus = 1\n"
            "problem.h = abc\n"
            "problem.h = 0.5\n"
            "branch.m_grid = 1 2\n"
            "branch.lambda_grid = 0.5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        CHECK(contains(msg, "problem.bogus: unknown key"));
        CHECK(contains(msg, "not a number"));
        CHECK(contains(msg, "duplicate key"));
        CHECK(contains(msg, "not both"));
        CHECK(e.bad_fields.size() >= 4);
    }

    // Grids must be positive and strictly increasing.
    CHECK_THROWS_AS(parse_config_text("branch.m_grid = 2 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("branch.m_grid = -1 2\n"), ConfigError);
    CHECK(validate_config(ExperimentConfig{}).empty());
}

TEST_CASE("io: branch tables round trip exactly") {
    Branch b;
    b.n = 7;
    b.g_id = "exp";
    BranchPoint p1{1.0 / 3.0, 1e-17, 6.02e23, -0.125, 3.141592653589793};
    BranchPoint p2{2.5, 1.9999999999999998, 0.0, -1e-300, 42.0};
    b.points = {p1, p2};
    b.gaps.push_back({8.0, "beyond the extremal parameter estimate"});

    Branch c = branch_from_csv(branch_to_csv(b));
    REQUIRE(c.points.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(c.points[i].m == b.points[i].m);
        CHECK(c.points[i].lambda == b.points[i].lambda);
        CHECK(c.points[i].sup_norm == b.points[i].sup_norm);
        CHECK(c.points[i].lambda1 == b.points[i].lambda1);
        CHECK(c.points[i].l1_norm == b.points[i].l1_norm);
    }

    Branch j = branch_from_json(branch_to_json(b));
    CHECK(j.n == 7);
    CHECK(j.g_id == "exp");
    REQUIRE(j.points.size() == 2);
    CHECK(j.points[1].lambda == b.points[1].lambda);
    CHECK(j.points[1].lambda1 == b.points[1].lambda1);
    REQUIRE(j.gaps.size() == 1);
    CHECK(j.gaps[0].m == 8.0);
    CHECK(j.gaps[0].reason == "beyond the extremal parameter estimate");

    CHECK_THROWS_AS(branch_from_csv("wrong,header\n1,2\n"), DataError);
    CHECK_THROWS_AS(branch_from_csv("m,lambda,sup_norm,lambda1,l1_norm\n1,2,3\n"), DataError);
    CHECK_THROWS_AS(branch_from_json("{"), DataError);
}

TEST_CASE("io: radial solutions and planar fields survive a disk round trip") {
    auto dir = fresh_dir("io_field");

    ShootingControl ctrl;
    ctrl.uniform_nodes = 128;
    auto [lam, sol] = solve_shooting(2, Nonlinearity::exponential(), 1.0, ctrl);
    RadialSolution back = radial_from_csv(radial_to_csv(sol), radial_sidecar_json(sol, "exp"));
    CHECK(back.n == sol.n);
    CHECK(back.lambda == sol.lambda);
    REQUIRE(back.r_nodes.size() == sol.r_nodes.size());
    CHECK(back.r_nodes == sol.r_nodes);
    CHECK(back.u == sol.u);
    CHECK(back.du == sol.du);

    auto mask = std::make_shared<const DomainMask>(DomainMask::disk(0.25));
    auto u = ScalarField2D::from_function(
        mask, [](double x, double y) { return (1 - x * x - y * y) * (1 + 0.5 * y); });
    std::string bin = (dir / "f.bin").string(), hdr = (dir / "f.json").string();
    write_field(bin, hdr, u, 1.5, "exp");
    double lam2 = 0;
    std::string gid;
    ScalarField2D v = load_field(bin, hdr, &lam2, &gid);
    CHECK(lam2 == 1.5);
    CHECK(gid == "exp");
    CHECK(v.mask().same_grid(*mask));
    CHECK(v.values() == u.values());

    write_text_file(hdr, "not json");
    CHECK_THROWS_AS(load_field(bin, hdr), DataError);
    write_field(bin, hdr, u, 1.5, "exp");
    std::string bytes = read_text_file(bin);
    write_text_file(bin, bytes.substr(0, bytes.size() - 8));
    CHECK_THROWS_AS(load_field(bin, hdr), DataError);
}

TEST_CASE("io: audit and profile tables serialize with stable columns") {
    auto ok = make_record("stability", "m=1", 0.25, 1.0, 2.0, 0.5);
    auto bad = make_record("stability", "m=1", 0.5, 2.0, 1.0);
    std::string csv = audit_to_csv({ok, bad});
    CHECK(contains(csv, "check_id,solution,param,lhs,rhs,slack,holds,constant\n"));
    CHECK(contains(csv, "stability,m=1,0.25,1,2,1,1,0.5\n"));
    CHECK(contains(csv, "stability,m=1,0.5,2,1,-1,0,0\n"));

    auto arr = nlohmann::json::parse(audit_to_json({ok, bad}));
    REQUIRE(arr.size() == 2);
    CHECK(arr[0]["holds"] == true);
    CHECK(arr[1]["holds"] == false);
    CHECK(arr[0]["vacuous"] == false);
    CHECK(arr[0]["excluded_fraction"] == 0.0);

    LevelProfile p;
    p.s = 0.5;
    p.length = 2.0;
    p.h1 = 1.0;
    p.h2 = 3.0;
    p.V = 0.7;
    p.min_grad = 0.1;
    p.regular = true;
    std::string pcsv = profiles_to_csv({p});
    CHECK(contains(pcsv, "s,length,h1,h2,V,min_grad,regular\n"));
    CHECK(contains(pcsv, "0.5,2,1,3,0.7,0.1,1\n"));
}

TEST_CASE("io: manifest vouches for artifacts and rejects tampering") {
    auto dir = fresh_dir("io_manifest");
    write_text_file((dir / "a.csv").string(), "hello");
    Manifest m;
    m.config_hash = "abc123";
    m.artifacts["a.csv"] = fnv1a64_hex("hello");
    m.wall_clock["branch"] = 1.5;
    save_manifest(dir.string(), m);

    Manifest l = load_manifest(dir.string());
    CHECK(l.config_hash == "abc123");
    CHECK(l.version == tool_version);
    CHECK(l.artifacts == m.artifacts);
    CHECK(l.wall_clock.at("branch") == 1.5);

    verify_artifact(dir.string(), l, "a.csv");
    CHECK_THROWS_AS(verify_artifact(dir.string(), l, "missing.csv"), DataError);
    write_text_file((dir / "a.csv").string(), "hEllo");
    CHECK_THROWS_AS(verify_artifact(dir.string(), l, "a.csv"), DataError);

    CHECK_THROWS_AS(load_manifest((dir / "nowhere").string()), DataError);
    write_text_file((dir / "manifest.json").string(), "{]");
    CHECK_THROWS_AS(load_manifest(dir.string()), DataError);
}

TEST_CASE("run_branch: artifacts are deterministic and the cache re-solves exactly") {
    auto dir = fresh_dir("branch_det");
    std::string cfg = write_cfg(dir, radial_cfg + "output.formats = csv json svg\n");

    auto a = dir / "out_a";
    auto b = dir / "out_b";
    CHECK(run_branch(opts_for(cfg, a)) == 0);
    CHECK(run_branch(opts_for(cfg, b)) == 0);

    Manifest man = load_manifest(a.string());
    for (const char* f : {"branch.csv", "branch.json", "branch.svg"}) {
        verify_artifact(a.string(), man, f);
        CHECK(read_text_file((a / f).string()) == read_text_file((b / f).string()));
    }
    CHECK(man.wall_clock.count("branch") == 1);

    Manifest man_b = load_manifest(b.string());
    CHECK(man.config_hash == man_b.config_hash);
    CHECK(man.artifacts == man_b.artifacts);

    // A cached point re-solved from scratch agrees to solver tolerance.
    Branch cached = branch_from_csv(read_text_file((a / "branch.csv").string()));
    REQUIRE(cached.points.size() == 2);
    ShootingControl ctrl;
    ctrl.uniform_nodes = 1024;
    auto [lam, sol] = solve_shooting(2, Nonlinearity::exponential(), cached.points[1].m, ctrl);
    CHECK(std::abs(lam - cached.points[1].lambda) <= 1e-10);
    CHECK(std::abs(sol.sup_norm() - cached.points[1].sup_norm) <= 1e-10);

    std::string svg = read_text_file((a / "branch.svg").string());
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "</svg>"));
    CHECK(contains(svg, "polyline"));
    CHECK(contains(svg, "lambda* estimate"));

    Branch json_branch = branch_from_json(read_text_file((a / "branch.json").string()));
    CHECK(json_branch.n == 2);
    CHECK(json_branch.g_id == "exponential");
    CHECK(json_branch.points[1].lambda == cached.points[1].lambda);
}

TEST_CASE("run_audit: selectors, corrupt caches and transparent recompute") {
    auto dir = fresh_dir("audit_cache");
    std::string cfg = write_cfg(dir, radial_cfg + "output.formats = csv\n");
    auto out = dir / "out";
    REQUIRE(run_branch(opts_for(cfg, out)) == 0);

    auto o = opts_for(cfg, out);
    o.selector = "m=0.5";
    CHECK(run_audit(o) == 0);
    std::string audit = read_text_file((out / "audit.csv").string());
    std::size_t rows = 0, held = 0;
    std::istringstream in(audit);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        // holds is the seventh column
        std::size_t pos = 0;
        for (int c = 0; c < 6; ++c) pos = line.find(',', pos) + 1;
        held += line[pos] == '1';
    }
    CHECK(rows >= 12);
    CHECK(held == rows);

    // Selectors that miss list what is available.
    o.selector = "m=3";
    try {
        run_audit(o);
        FAIL("expected selector error");
    } catch (const std::runtime_error& e) {
        CHECK(contains(e.what(), "available m:"));
        CHECK(contains(e.what(), "0.5"));
    }
    o.selector = "lambda=9";
    try {
        run_audit(o);
        FAIL("expected selector error");
    } catch (const std::runtime_error& e) {
        CHECK(contains(e.what(), "available lambda:"));
    }
    o.selector = "q=1";
    CHECK_THROWS_AS(run_audit(o), std::runtime_error);
    o.selector = "m=abc";
    CHECK_THROWS_AS(run_audit(o), std::runtime_error);

    // A corrupt cache is a hard error; a missing one is recomputed.
    o.selector = "last";
    std::string cache = read_text_file((out / "branch.csv").string());
    write_text_file((out / "branch.csv").string(), cache + "tampered");
    CHECK_THROWS_AS(run_audit(o), DataError);
    fs::remove(out / "branch.csv");
    CHECK(run_audit(o) == 0);
    CHECK(fs::exists(out / "branch.csv"));
    CHECK(read_text_file((out / "branch.csv").string()) == cache);
}

TEST_CASE("run_branch: a non-superlinear nonlinearity warns but still runs") {
    auto dir = fresh_dir("branch_const");
    std::string cfg = write_cfg(dir,
                                "problem.n = 2\n"
                                "problem.shape = ball\n"
                                "problem.g = constant\n"
                                "problem.g_c = 1\n"
                                "branch.m_grid = 0.25 0.5\n"
                                "branch.uniform_nodes = 1024\n"
                                "output.formats = csv\n");
    auto out = dir / "out";
    CHECK(run_branch(opts_for(cfg, out)) == 0);
    Branch b = branch_from_csv(read_text_file((out / "branch.csv").string()));
    REQUIRE(b.points.size() == 2);
    // -laplace u = lambda on the disk: u = m (1 - r^2 / (4 m / lambda)), lambda = 4 m.
    CHECK(b.points[0].lambda == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(b.points[1].lambda == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("planar pipeline: branch fields, audited records, levels and extremal") {
    auto dir = fresh_dir("planar_cli");
    std::string cfg = write_cfg(dir,
                                "problem.n = 2\n"
                                "problem.shape = disk\n"
                                "problem.h = 0.015625\n"
                                "problem.g = exp\n"
                                "branch.lambda_grid = 0.5 1\n"
                                "audit.n_levels = 48\n"
                                "output.formats = csv json svg bin\n");
    auto out = dir / "out";
    auto o = opts_for(cfg, out);
    o.seed = 11;
    REQUIRE(run_branch(o) == 0);

    for (const char* f : {"branch.csv", "branch.json", "branch.svg", "field_0.bin",
                          "field_0.json", "field_1.bin", "field_1.json"})
        CHECK(fs::exists(out / f));
    double lam = 0;
    std::string gid;
    ScalarField2D u = load_field((out / "field_1.bin").string(), (out / "field_1.json").string(),
                                 &lam, &gid);
    CHECK(lam == 1.0);
    CHECK(gid == "exponential");
    CHECK(u.max_value() > 0.2);
    Manifest man = load_manifest(out.string());
    verify_artifact(out.string(), man, "field_1.bin");

    o.selector = "last";
    CHECK(run_audit(o) == 0);
    auto arr = nlohmann::json::parse(read_text_file((out / "audit.json").string()));
    std::size_t qsamples = 0;
    bool has_min = false, has_ms = false;
    for (const auto& r : arr) {
        CHECK(r.at("holds") == true);
        std::string id = r.at("check_id");
        qsamples += id == "quadratic_form_sample";
        has_min = has_min || id == "main_estimate_min";
        has_ms = has_ms || contains(id, "michael");
    }
    CHECK(arr.size() >= 15);
    CHECK(qsamples == 8);
    CHECK(has_min);
    CHECK(has_ms);

    // Same seed, same cache: the audit reruns byte-identically.
    std::string first = read_text_file((out / "audit.json").string());
    CHECK(run_audit(o) == 0);
    CHECK(read_text_file((out / "audit.json").string()) == first);

    o.selector = "all";
    CHECK(run_levels(o) == 0);
    for (const char* f : {"profiles_0.csv", "profiles_1.csv", "curves_0.json", "curves_1.json",
                          "profiles_0.svg", "levels.json"})
        CHECK(fs::exists(out / f));
    auto levels = nlohmann::json::parse(read_text_file((out / "levels.json").string()));
    REQUIRE(levels.size() == 2);
    for (const auto& e : levels) CHECK(e.at("coarea_gap").get<double>() < 0.05);
    auto curves = nlohmann::json::parse(read_text_file((out / "curves_1.json").string()));
    CHECK(curves.size() == 8);
    CHECK(curves[0].at("components").size() >= 1);

    CHECK(run_extremal(o) == 0);
    auto ext = nlohmann::json::parse(read_text_file((out / "extremal.json").string()));
    CHECK(ext.at("lambda_last_good").get<double>() == 1.0);
    CHECK(ext.contains("lambda_star"));
}

TEST_CASE("run_extremal: the radial fold is bracketed from the branch grid") {
    auto dir = fresh_dir("extremal_radial");
    std::string cfg = write_cfg(dir,
                                "problem.n = 2\n"
                                "problem.shape = ball\n"
                                "problem.g = exp\n"
                                "branch.m_grid = 0.5 1 1.5 2 2.5 3\n"
                                "branch.uniform_nodes = 1024\n"
                                "output.formats = json\n");
    auto out = dir / "out";
    CHECK(run_extremal(opts_for(cfg, out)) == 0);
    auto ext = nlohmann::json::parse(read_text_file((out / "extremal.json").string()));
    double star = ext.at("lambda_star").get<double>();
    double m_at = ext.at("m_at_max").get<double>();
    CHECK(star > 1.8);
    CHECK(star <= 2.0 + 1e-9);
    CHECK(ext.at("m_lo").get<double>() < m_at);
    CHECK(ext.at("m_hi").get<double>() > m_at);
}

TEST_CASE("run_verify: a bad config fails validation before any computation") {
    auto dir = fresh_dir("verify_cfg");
    std::string cfg = write_cfg(dir, "problem.n = 3\nproblem.shape = disk\n");
    RunOptions o;
    o.config_path = cfg;
    CHECK_THROWS_AS(run_verify(o), ConfigError);
}

TEST_CASE("svg: identical specs render identical bytes") {
    PlotSpec spec;
    spec.title = "test";
    spec.xlabel = "x";
    spec.ylabel = "y";
    PlotSeries s;
    for (int i = 0; i <= 10; ++i) {
        s.x.push_back(0.1 * i);
        s.y.push_back(0.01 * i * i);
    }
    s.label = "quadratic";
    spec.series.push_back(s);
    spec.markers.push_back({0.5, 0.025, "#c23a3a", "peak"});
    spec.vlines.push_back(0.5);

    std::string one = render_svg_plot(spec);
    std::string two = render_svg_plot(spec);
    CHECK(one == two);
    CHECK(contains(one, "<svg"));
    CHECK(contains(one, "</svg>"));
    CHECK(contains(one, "polyline"));
    CHECK(contains(one, "quadratic"));
    CHECK(contains(one, "peak"));

    // Non-finite samples are dropped, not emitted.
    spec.series[0].y[5] = std::nan("");
    std::string three = render_svg_plot(spec);
    CHECK(!contains(three, "nan"));
    CHECK(!contains(three, "inf"));
}
