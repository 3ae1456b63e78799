#include "gelfand/io.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gelfand {

using nlohmann::json;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("short write: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string checksum_file(const std::string& path) { return fnv1a64_hex(read_text_file(path)); }

Manifest load_manifest(const std::string& dir) {
    json j;
    try {
        j = json::parse(read_text_file(dir + "/manifest.json"));
    } catch (const json::exception& e) {
        throw DataError("manifest.json: " + std::string(e.what()));
    }
    Manifest m;
    try {
        m.config_hash = j.at("config_hash").get<std::string>();
        m.version = j.at("tool_version").get<std::string>();
        for (const auto& a : j.at("artifacts"))
            m.artifacts[a.at("file").get<std::string>()] = a.at("checksum").get<std::string>();
        if (j.contains("wall_clock"))
            for (auto it = j["wall_clock"].begin(); it != j["wall_clock"].end(); ++it)
                m.wall_clock[it.key()] = it.value().get<double>();
    } catch (const json::exception& e) {
        throw DataError("manifest.json: " + std::string(e.what()));
    }
    return m;
}

void save_manifest(const std::string& dir, const Manifest& m) {
    json arts = json::array();
    for (const auto& [file, sum] : m.artifacts) arts.push_back({{"file", file}, {"checksum", sum}});
    json j = {{"config_hash", m.config_hash},
              {"tool_version", m.version},
              {"artifacts", arts},
              {"wall_clock", m.wall_clock}};
    write_text_file(dir + "/manifest.json", j.dump(2) + "\n");
}

void verify_artifact(const std::string& dir, const Manifest& m, const std::string& file) {
    auto it = m.artifacts.find(file);
    if (it == m.artifacts.end()) throw DataError("not in manifest: " + file);
    std::string sum = checksum_file(dir + "/" + file);
    if (sum != it->second)
        throw DataError("checksum mismatch for " + file + ": manifest " + it->second +
                        ", file " + sum);
}

namespace {

double parse_num(const std::string& tok, const std::string& where) {
    char* end = nullptr;
    double x = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw DataError("bad number in " + where + ": '" + tok + "'");
    return x;
}

std::string trimmed_header(std::string line) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return line;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string branch_to_csv(const Branch& b) {
    std::string out = "m,lambda,sup_norm,lambda1,l1_norm\n";
    for (const auto& p : b.points) {
        out += format_double(p.m) + ',' + format_double(p.lambda) + ',' +
               format_double(p.sup_norm) + ',' + format_double(p.lambda1) + ',' +
               format_double(p.l1_norm) + '\n';
    }
    return out;
}

Branch branch_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || trimmed_header(line) != "m,lambda,sup_norm,lambda1,l1_norm")
        throw DataError("branch csv: bad header");
    Branch b;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split(line, ',');
        if (cols.size() != 5) throw DataError("branch csv: expected 5 columns");
        BranchPoint p;
        p.m = parse_num(cols[0], "branch csv");
        p.lambda = parse_num(cols[1], "branch csv");
        p.sup_norm = parse_num(cols[2], "branch csv");
        p.lambda1 = parse_num(cols[3], "branch csv");
        p.l1_norm = parse_num(cols[4], "branch csv");
        b.points.push_back(p);
    }
    return b;
}

std::string branch_to_json(const Branch& b) {
    json pts = json::array();
    for (const auto& p : b.points)
        pts.push_back({{"m", p.m},
                       {"lambda", p.lambda},
                       {"sup_norm", p.sup_norm},
                       {"lambda1", p.lambda1},
                       {"l1_norm", p.l1_norm}});
    json gaps = json::array();
    for (const auto& g : b.gaps) gaps.push_back({{"m", g.m}, {"reason", g.reason}});
    json j = {{"n", b.n}, {"g_id", b.g_id}, {"points", pts}, {"gaps", gaps}};
    return j.dump(2) + "\n";
}

Branch branch_from_json(const std::string& text) {
    Branch b;
    try {
        json j = json::parse(text);
        b.n = j.at("n").get<int>();
        b.g_id = j.at("g_id").get<std::string>();
        for (const auto& p : j.at("points")) {
            BranchPoint q;
            q.m = p.at("m").get<double>();
            q.lambda = p.at("lambda").get<double>();
            q.sup_norm = p.at("sup_norm").get<double>();
            q.lambda1 = p.at("lambda1").get<double>();
            q.l1_norm = p.at("l1_norm").get<double>();
            b.points.push_back(q);
        }
        for (const auto& g : j.at("gaps")) {
            BranchGap gap;
            gap.m = g.at("m").get<double>();
            gap.reason = g.at("reason").get<std::string>();
            b.gaps.push_back(gap);
        }
    } catch (const json::exception& e) {
        throw DataError("branch json: " + std::string(e.what()));
    }
    return b;
}

std::string radial_to_csv(const RadialSolution& sol) {
    std::string out = "r,u,du\n";
    for (std::size_t i = 0; i < sol.r_nodes.size(); ++i)
        out += format_double(sol.r_nodes[i]) + ',' + format_double(sol.u[i]) + ',' +
               format_double(sol.du[i]) + '\n';
    return out;
}

std::string radial_sidecar_json(const RadialSolution& sol, const std::string& g_id) {
    json j = {{"n", sol.n}, {"lambda", sol.lambda}, {"g_id", g_id}};
    return j.dump(2) + "\n";
}

RadialSolution radial_from_csv(const std::string& csv, const std::string& sidecar) {
    RadialSolution sol;
    try {
        json j = json::parse(sidecar);
        sol.n = j.at("n").get<int>();
        sol.lambda = j.at("lambda").get<double>();
    } catch (const json::exception& e) {
        throw DataError("radial sidecar: " + std::string(e.what()));
    }
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || trimmed_header(line) != "r,u,du")
        throw DataError("radial csv: bad header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cols = split(line, ',');
        if (cols.size() != 3) throw DataError("radial csv: expected 3 columns");
        sol.r_nodes.push_back(parse_num(cols[0], "radial csv"));
        sol.u.push_back(parse_num(cols[1], "radial csv"));
        sol.du.push_back(parse_num(cols[2], "radial csv"));
    }
    if (sol.r_nodes.size() < 2) throw DataError("radial csv: too few rows");
    return sol;
}

std::string profiles_to_csv(const std::vector<LevelProfile>& fam) {
    std::string out = "s,length,h1,h2,V,min_grad,regular\n";
    for (const auto& p : fam)
        out += format_double(p.s) + ',' + format_double(p.length) + ',' + format_double(p.h1) +
               ',' + format_double(p.h2) + ',' + format_double(p.V) + ',' +
               format_double(p.min_grad) + ',' + (p.regular ? '1' : '0') + '\n';
    return out;
}

std::string curves_to_json(const std::vector<LevelCurve>& curves) {
    json arr = json::array();
    for (const auto& c : curves) {
        json comps = json::array();
        for (const auto& comp : c.components)
            comps.push_back({{"x", comp.x}, {"y", comp.y}});
        arr.push_back({{"s", c.s}, {"components", comps}});
    }
    return arr.dump(2) + "\n";
}

std::string audit_to_csv(const std::vector<AuditRecord>& recs) {
    std::string out = "check_id,solution,param,lhs,rhs,slack,holds,constant\n";
    for (const auto& r : recs)
        out += r.check_id + ',' + r.solution + ',' + format_double(r.param) + ',' +
               format_double(r.lhs) + ',' + format_double(r.rhs) + ',' + format_double(r.slack) +
               ',' + (r.holds ? '1' : '0') + ',' + format_double(r.constant) + '\n';
    return out;
}

std::string audit_to_json(const std::vector<AuditRecord>& recs) {
    json arr = json::array();
    for (const auto& r : recs)
        arr.push_back({{"check_id", r.check_id},
                       {"solution", r.solution},
                       {"param", r.param},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"slack", r.slack},
                       {"holds", r.holds},
                       {"constant", r.constant},
                       {"vacuous", r.vacuous},
                       {"excluded_fraction", r.excluded_fraction}});
    return arr.dump(2) + "\n";
}

void write_field(const std::string& bin_path, const std::string& json_path,
                 const ScalarField2D& u, double lambda, const std::string& g_id) {
    if (u.empty()) throw DataError("write_field: empty field");
    const auto& m = u.mask();
    json hdr = {{"nx", m.nx()},     {"ny", m.ny()},
                {"h", m.h()},       {"shape", m.shape_name()},
                {"params", m.shape_params()}, {"lambda", lambda},
                {"g_id", g_id}};
    write_text_file(json_path, hdr.dump(2) + "\n");

    std::ofstream out(bin_path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + bin_path);
    const auto& v = u.values();
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!out) throw DataError("short write: " + bin_path);
}

ScalarField2D load_field(const std::string& bin_path, const std::string& json_path,
                         double* lambda, std::string* g_id) {
    json hdr;
    try {
        hdr = json::parse(read_text_file(json_path));
    } catch (const json::exception& e) {
        throw DataError("field header: " + std::string(e.what()));
    }
    int nx, ny;
    double h, lam;
    std::string shape, gid;
    std::vector<double> params;
    try {
        nx = hdr.at("nx").get<int>();
        ny = hdr.at("ny").get<int>();
        h = hdr.at("h").get<double>();
        shape = hdr.at("shape").get<std::string>();
        params = hdr.at("params").get<std::vector<double>>();
        lam = hdr.at("lambda").get<double>();
        gid = hdr.at("g_id").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError("field header: " + std::string(e.what()));
    }

    std::shared_ptr<const DomainMask> mask;
    if (shape == "disk" && params.size() == 1)
        mask = std::make_shared<const DomainMask>(DomainMask::disk(h, params[0]));
    else if (shape == "square" && params.size() == 1)
        mask = std::make_shared<const DomainMask>(DomainMask::square(h, params[0]));
    else if (shape == "ellipse" && params.size() == 2)
        mask = std::make_shared<const DomainMask>(DomainMask::ellipse(h, params[0], params[1]));
    else if (shape == "polygon" && params.size() >= 6 && params.size() % 2 == 0) {
        std::vector<std::array<double, 2>> vs(params.size() / 2);
        for (std::size_t i = 0; i < vs.size(); ++i) vs[i] = {params[2 * i], params[2 * i + 1]};
        mask = std::make_shared<const DomainMask>(DomainMask::polygon(h, vs));
    } else {
        throw DataError("field header: unknown shape '" + shape + "'");
    }
    if (mask->nx() != nx || mask->ny() != ny)
        throw DataError("field header: grid size does not match the rebuilt mask");

    std::string bytes = read_text_file(bin_path);
    std::size_t want = static_cast<std::size_t>(nx) * ny * sizeof(double);
    if (bytes.size() != want)
        throw DataError("field data: expected " + std::to_string(want) + " bytes, got " +
                        std::to_string(bytes.size()));
    std::vector<double> v(static_cast<std::size_t>(nx) * ny);
    std::memcpy(v.data(), bytes.data(), want);
    if (lambda) *lambda = lam;
    if (g_id) *g_id = gid;
    return ScalarField2D(mask, std::move(v));
}

}  // namespace gelfand
