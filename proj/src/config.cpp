#include "pbmem/config.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pbmem/force.hpp"
#include "pbmem/lipid.hpp"
#include "pbmem/verify.hpp"

namespace pbmem {
namespace {

using nlohmann::json;

// ---- validation helpers: every violation is collected with its path ----

struct Errors {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& msg) {
        list.push_back(path + ": " + msg);
    }
    void raise_if_any() const {
        if (list.empty()) return;
        std::string all = "invalid configuration:";
        for (const auto& e : list) all += "\n  - " + e;
        throw std::runtime_error(all);
    }
};

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed, Errors& errs) {
    if (!j.is_object()) {
        errs.add(path, "expected an object");
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return it.key() == k;
            }) == allowed.end()) {
            errs.add(path + "." + it.key(), "unknown key");
        }
    }
}

double get_num(const json& j, const std::string& path, const char* key,
               double fallback, Errors& errs) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) {
        errs.add(path + "." + key, "expected a number");
        return fallback;
    }
    return j[key].get<double>();
}

int get_int(const json& j, const std::string& path, const char* key,
            int fallback, Errors& errs) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) {
        errs.add(path + "." + key, "expected an integer");
        return fallback;
    }
    return j[key].get<int>();
}

bool get_bool(const json& j, const std::string& path, const char* key,
              bool fallback, Errors& errs) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) {
        errs.add(path + "." + key, "expected a boolean");
        return fallback;
    }
    return j[key].get<bool>();
}

Vec3 get_vec3(const json& j, const std::string& path, const char* key,
              const Vec3& fallback, Errors& errs) {
    if (!j.contains(key)) return fallback;
    const auto& v = j[key];
    if (!v.is_array() || v.size() != 3 ||
        !std::all_of(v.begin(), v.end(),
                     [](const json& x) { return x.is_number(); })) {
        errs.add(path + "." + key, "expected an array of 3 numbers");
        return fallback;
    }
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

void parse_geometry(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "geometry";
    std::string kind = j.value("kind", std::string("spherical"));
    if (kind == "spherical") {
        cfg.kind = GeometryKind::spherical;
        expect_keys(j, path,
                    {"kind", "R_c", "R_e", "R_outer", "node_count", "grading"},
                    errs);
        cfg.radial.R_c = get_num(j, path, "R_c", cfg.radial.R_c, errs);
        cfg.radial.R_e = get_num(j, path, "R_e", cfg.radial.R_e, errs);
        cfg.radial.R_outer = get_num(j, path, "R_outer", cfg.radial.R_outer, errs);
        cfg.radial.node_count =
            get_int(j, path, "node_count", cfg.radial.node_count, errs);
        cfg.radial.grading = get_num(j, path, "grading", cfg.radial.grading, errs);
    } else if (kind == "planar") {
        cfg.kind = GeometryKind::planar;
        expect_keys(j, path, {"kind", "z_c", "z_e", "L", "node_count", "grading"},
                    errs);
        cfg.planar.z_c = get_num(j, path, "z_c", cfg.planar.z_c, errs);
        cfg.planar.z_e = get_num(j, path, "z_e", cfg.planar.z_e, errs);
        cfg.planar.L = get_num(j, path, "L", cfg.planar.L, errs);
        cfg.planar.node_count =
            get_int(j, path, "node_count", cfg.planar.node_count, errs);
        cfg.planar.grading = get_num(j, path, "grading", cfg.planar.grading, errs);
    } else if (kind == "sdf3d") {
        cfg.kind = GeometryKind::sdf3d;
        expect_keys(j, path, {"kind", "R_c", "R_e", "box_half", "n"}, errs);
        cfg.radial.R_c = get_num(j, path, "R_c", cfg.radial.R_c, errs);
        cfg.radial.R_e = get_num(j, path, "R_e", cfg.radial.R_e, errs);
        cfg.box_half = get_num(j, path, "box_half", cfg.box_half, errs);
        cfg.grid_n = get_int(j, path, "n", cfg.grid_n, errs);
    } else {
        errs.add(path + ".kind",
                 "expected one of \"spherical\", \"planar\", \"sdf3d\"");
    }
}

void parse_physics(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "physics";
    expect_keys(j, path,
                {"beta", "eps_s", "eps_m", "eps_p", "ions", "lipid_charge",
                 "lipid_pool_c", "lipid_pool_e", "shared_lipid_pool",
                 "diffusion"},
                errs);
    auto& p = cfg.physics;
    p.beta = get_num(j, path, "beta", p.beta, errs);
    p.eps_s = get_num(j, path, "eps_s", p.eps_s, errs);
    p.eps_m = get_num(j, path, "eps_m", p.eps_m, errs);
    p.eps_p = get_num(j, path, "eps_p", p.eps_p, errs);
    p.lipid_charge = get_num(j, path, "lipid_charge", p.lipid_charge, errs);
    p.lipid_pool_c = get_num(j, path, "lipid_pool_c", p.lipid_pool_c, errs);
    p.lipid_pool_e = get_num(j, path, "lipid_pool_e", p.lipid_pool_e, errs);
    p.shared_lipid_pool =
        get_bool(j, path, "shared_lipid_pool", p.shared_lipid_pool, errs);
    p.diffusion = get_num(j, path, "diffusion", p.diffusion, errs);
    if (j.contains("ions")) {
        if (!j["ions"].is_array()) {
            errs.add(path + ".ions", "expected an array");
            return;
        }
        p.ions.clear();
        int i = 0;
        for (const auto& ion : j["ions"]) {
            const std::string ip = path + ".ions[" + std::to_string(i++) + "]";
            expect_keys(ion, ip, {"charge", "concentration"}, errs);
            IonSpecies s;
            s.charge = get_num(ion, ip, "charge", 0.0, errs);
            s.bulk_concentration = get_num(ion, ip, "concentration", 0.0, errs);
            p.ions.push_back(s);
        }
    }
}

void parse_source(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "source";
    expect_keys(j, path, {"charges"}, errs);
    if (!j.contains("charges")) return;
    if (!j["charges"].is_array()) {
        errs.add(path + ".charges", "expected an array");
        return;
    }
    cfg.source.charges.clear();
    int i = 0;
    for (const auto& c : j["charges"]) {
        const std::string cp = path + ".charges[" + std::to_string(i++) + "]";
        expect_keys(c, cp, {"center", "magnitude", "width"}, errs);
        SourceCharge::Gaussian g;
        g.center = get_vec3(c, cp, "center", g.center, errs);
        g.magnitude = get_num(c, cp, "magnitude", g.magnitude, errs);
        g.width = get_num(c, cp, "width", g.width, errs);
        cfg.source.charges.push_back(g);
    }
}

void parse_boundary(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "boundary";
    std::string kind = j.value("kind", std::string("zero"));
    auto& b = cfg.boundary;
    if (kind == "zero") {
        expect_keys(j, path, {"kind"}, errs);
    } else if (kind == "constant") {
        expect_keys(j, path, {"kind", "value"}, errs);
        b.value = get_num(j, path, "value", 0.0, errs);
    } else if (kind == "affine") {
        expect_keys(j, path, {"kind", "a", "b"}, errs);
        b.a = get_vec3(j, path, "a", Vec3::Zero(), errs);
        b.b = get_num(j, path, "b", 0.0, errs);
    } else {
        errs.add(path + ".kind",
                 "expected one of \"zero\", \"constant\", \"affine\"");
    }
    b.kind = kind;
}

void parse_numerics(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "numerics";
    expect_keys(j, path,
                {"newton_tol", "max_newton", "fp_tol", "max_fp", "fp_damping",
                 "linearized", "max_cg", "coarse_levels"},
                errs);
    auto& n = cfg.numerics;
    n.newton_tol = get_num(j, path, "newton_tol", n.newton_tol, errs);
    n.max_newton = get_int(j, path, "max_newton", n.max_newton, errs);
    n.fp_tol = get_num(j, path, "fp_tol", n.fp_tol, errs);
    n.max_fp = get_int(j, path, "max_fp", n.max_fp, errs);
    n.fp_damping = get_num(j, path, "fp_damping", n.fp_damping, errs);
    n.linearized = get_bool(j, path, "linearized", n.linearized, errs);
    auto& n3 = cfg.numerics3d;
    n3.newton_tol = n.newton_tol > 1e-8 ? n.newton_tol : 1e-8;
    if (j.contains("newton_tol")) n3.newton_tol = n.newton_tol;
    n3.max_newton = n.max_newton;
    n3.linearized = n.linearized;
    n3.max_cg = get_int(j, path, "max_cg", n3.max_cg, errs);
    n3.coarse_levels = get_int(j, path, "coarse_levels", n3.coarse_levels, errs);
}

void parse_sweep(const json& j, RunConfig& cfg, Errors& errs) {
    const std::string path = "sweep";
    expect_keys(j, path, {"key", "values"}, errs);
    if (!j.contains("key") || !j["key"].is_string()) {
        errs.add(path + ".key", "required string");
        return;
    }
    cfg.sweep_key = j["key"].get<std::string>();
    if (!j.contains("values") || !j["values"].is_array() ||
        j["values"].empty() ||
        !std::all_of(j["values"].begin(), j["values"].end(),
                     [](const json& x) { return x.is_number(); })) {
        errs.add(path + ".values", "required non-empty array of numbers");
        return;
    }
    for (const auto& v : j["values"]) cfg.sweep_values.push_back(v.get<double>());
}

// ---- output helpers ----

std::string num17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text,
                bool quiet) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
    if (!quiet) std::printf("wrote %s\n", p.string().c_str());
}

std::filesystem::path out_path(const CliOptions& opt, const std::string& name) {
    std::filesystem::create_directories(opt.out_dir);
    return std::filesystem::path(opt.out_dir) / name;
}

PotentialSolution solve_1d(const RunConfig& cfg) {
    const BoundaryData bc = cfg.boundary.make();
    if (cfg.kind == GeometryKind::spherical)
        return solve_spherical(cfg.physics, cfg.radial, cfg.source, bc,
                               cfg.numerics);
    return solve_planar(cfg.physics, cfg.planar, bc, cfg.numerics);
}

json energy_json(const EnergyBreakdown& e) {
    return json{{"field_term", e.field_term},
                {"source_term", e.source_term},
                {"ionic_term", e.ionic_term},
                {"surface_entropy_c", e.surface_entropy_c},
                {"surface_entropy_e", e.surface_entropy_e},
                {"bending_c", e.bending_c},
                {"bending_e", e.bending_e},
                {"G", e.G},
                {"Pi", e.Pi}};
}

json traces_json(const InterfaceTraces& t) {
    return json{{"phi", t.phi},
                {"grad_s_n", t.grad_s_n},
                {"grad_m_n", t.grad_m_n},
                {"rho", t.rho},
                {"jump_residual", t.jump_residual}};
}

struct FaceForces {
    InterfaceTraces traces;
    double sd = 0.0, alt = 0.0, mst = 0.0;
};

FaceForces face_forces(const PotentialSolution& sol, Face f) {
    FaceForces out;
    out.traces = enforce_jump_condition(extract_traces(sol, f), sol.params);
    out.sd = force_sd(sol.params, out.traces);
    out.alt = force_alt(sol.params, out.traces);
    out.mst = force_mst(sol.params, out.traces);
    return out;
}

// Apply a dotted sweep key to a copy of the configuration.
RunConfig apply_sweep_value(const RunConfig& base, const std::string& key,
                            double v) {
    RunConfig c = base;
    if (key == "physics.lipid_pool_c") c.physics.lipid_pool_c = v;
    else if (key == "physics.lipid_pool_e") c.physics.lipid_pool_e = v;
    else if (key == "physics.lipid_charge") c.physics.lipid_charge = v;
    else if (key == "physics.eps_m") c.physics.eps_m = v;
    else if (key == "geometry.R_c") c.radial.R_c = v;
    else if (key == "geometry.R_e") c.radial.R_e = v;
    else if (key == "source.magnitude" && !c.source.charges.empty())
        c.source.charges[0].magnitude = v;
    else
        throw std::runtime_error("unsupported sweep key: " + key);
    return c;
}

}  // namespace

BoundaryData BoundarySpec::make() const {
    if (kind == "constant") {
        const double c = value;
        return BoundaryData{[c](const Vec3&) { return c; }};
    }
    if (kind == "affine") {
        const Vec3 aa = a;
        const double bb = b;
        return BoundaryData{[aa, bb](const Vec3& x) { return aa.dot(x) + bb; }};
    }
    return BoundaryData{};
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("configuration is not valid JSON: ") +
                                 e.what());
    }
    Errors errs;
    expect_keys(j, "(root)",
                {"geometry", "physics", "source", "boundary", "numerics",
                 "quadrature", "bending", "sweep"},
                errs);
    RunConfig cfg;
    if (j.contains("geometry")) parse_geometry(j["geometry"], cfg, errs);
    if (j.contains("physics")) parse_physics(j["physics"], cfg, errs);
    if (j.contains("source")) parse_source(j["source"], cfg, errs);
    if (j.contains("boundary")) parse_boundary(j["boundary"], cfg, errs);
    if (j.contains("numerics")) parse_numerics(j["numerics"], cfg, errs);
    if (j.contains("bending")) {
        expect_keys(j["bending"], "bending", {"K_C", "K_G", "C0"}, errs);
        cfg.bending.K_C = get_num(j["bending"], "bending", "K_C", 0.0, errs);
        cfg.bending.K_G = get_num(j["bending"], "bending", "K_G", 0.0, errs);
        cfg.bending.C0 = get_num(j["bending"], "bending", "C0", 0.0, errs);
    }
    if (j.contains("quadrature")) {
        const auto& q = j["quadrature"];
        if (!q.is_array() || q.size() != 2 || !q[0].is_number_integer() ||
            !q[1].is_number_integer())
            errs.add("quadrature", "expected an array of 2 integers");
        else {
            cfg.quad_u = q[0].get<int>();
            cfg.quad_v = q[1].get<int>();
        }
    }
    if (j.contains("sweep")) parse_sweep(j["sweep"], cfg, errs);
    errs.raise_if_any();

    // semantic checks from the domain structs, reported with paths too
    try {
        cfg.physics.validate();
    } catch (const std::exception& e) {
        errs.add("physics", e.what());
    }
    try {
        cfg.source.validate();
    } catch (const std::exception& e) {
        errs.add("source", e.what());
    }
    try {
        if (cfg.kind == GeometryKind::spherical) cfg.radial.validate();
        if (cfg.kind == GeometryKind::planar) cfg.planar.validate();
        if (cfg.kind == GeometryKind::sdf3d &&
            !(cfg.radial.R_c > 0 && cfg.radial.R_e > cfg.radial.R_c &&
              cfg.box_half > cfg.radial.R_e && cfg.grid_n >= 17))
            throw std::runtime_error(
                "need 0 < R_c < R_e < box_half and n >= 17");
    } catch (const std::exception& e) {
        errs.add("geometry", e.what());
    }
    errs.raise_if_any();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_fingerprint(const RunConfig& cfg) {
    std::string s;
    s += std::to_string(static_cast<int>(cfg.kind));
    for (double v : {cfg.radial.R_c, cfg.radial.R_e, cfg.radial.R_outer,
                     cfg.planar.z_c, cfg.planar.z_e, cfg.planar.L, cfg.box_half,
                     cfg.physics.beta, cfg.physics.eps_s, cfg.physics.eps_m,
                     cfg.physics.eps_p, cfg.physics.lipid_charge,
                     cfg.physics.lipid_pool_c, cfg.physics.lipid_pool_e,
                     cfg.bending.K_C, cfg.bending.K_G, cfg.bending.C0})
        s += "," + num17(v);
    for (const auto& ion : cfg.physics.ions)
        s += ";" + num17(ion.charge) + ":" + num17(ion.bulk_concentration);
    for (const auto& c : cfg.source.charges)
        s += ";" + num17(c.magnitude) + "@" + num17(c.width);
    s += ";" + std::to_string(cfg.radial.node_count) + "," +
         std::to_string(cfg.grid_n);
    // FNV-1a
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_solve(const RunConfig& cfg, const CliOptions& opt) {
    if (cfg.kind == GeometryKind::sdf3d) {
        Grid3D grid;
        grid.n = cfg.grid_n;
        grid.origin = Vec3::Constant(-cfg.box_half);
        grid.h = 2.0 * cfg.box_half / (cfg.grid_n - 1);
        auto region = RegionSdf::concentric(cfg.radial.R_c, cfg.radial.R_e);
        auto sol = assemble_and_solve_3d(cfg.physics, grid, region, cfg.source,
                                         cfg.boundary.make(), cfg.numerics3d);
        if (sol.final_residual > cfg.numerics3d.newton_tol) {
            std::fprintf(stderr, "solver did not converge: residual %.3e\n",
                         sol.final_residual);
            return 2;
        }
        // axial profile through the box center plus run metadata
        std::string csv = "# schema=pbmem-solution3d-1\nx,phi\n";
        const int mid = cfg.grid_n / 2;
        for (int i = 0; i < cfg.grid_n; ++i) {
            const Vec3 x = grid.x(i, mid, mid);
            csv += num17(x[0]) + "," + num17(sol.phi[grid.idx(i, mid, mid)]) +
                   "\n";
        }
        write_file(out_path(opt, "solution.csv"), csv, opt.quiet);
        json meta{{"schema_version", 1},
                  {"config_fingerprint", config_fingerprint(cfg)},
                  {"grid_n", cfg.grid_n},
                  {"h", grid.h},
                  {"rho_c", sol.rho_c},
                  {"rho_e", sol.rho_e},
                  {"newton_iterations", sol.newton_iterations},
                  {"cg_iterations", sol.cg_iterations},
                  {"final_residual", sol.final_residual}};
        write_file(out_path(opt, "solution.json"), meta.dump(2) + "\n",
                   opt.quiet);
        return 0;
    }
    auto sol = solve_1d(cfg);
    if (sol.final_residual > cfg.numerics.newton_tol) {
        std::fprintf(stderr, "solver did not converge: residual %.3e\n",
                     sol.final_residual);
        return 2;
    }
    std::string csv = "# schema=pbmem-solution-1\n";
    csv += sol.spherical ? "r,phi\n" : "z,phi\n";
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        csv += num17(sol.r[i]) + "," + num17(sol.phi[i]) + "\n";
    write_file(out_path(opt, "solution.csv"), csv, opt.quiet);
    json meta{{"schema_version", 1},
              {"config_fingerprint", config_fingerprint(cfg)},
              {"nodes", sol.r.size()},
              {"rho_c", sol.rho_c},
              {"rho_e", sol.rho_e},
              {"newton_iterations", sol.newton_iterations},
              {"fixed_point_iterations", sol.fixed_point_iterations},
              {"final_residual", sol.final_residual}};
    write_file(out_path(opt, "solution.json"), meta.dump(2) + "\n", opt.quiet);
    return 0;
}

int run_energy(const RunConfig& cfg, const CliOptions& opt) {
    auto sol = solve_1d(cfg);
    if (sol.final_residual > cfg.numerics.newton_tol) return 2;
    auto e = total_energy(sol, cfg.bending, cfg.quad_u, cfg.quad_v);
    json out = energy_json(e);
    out["schema_version"] = 1;
    out["config_fingerprint"] = config_fingerprint(cfg);
    write_file(out_path(opt, "energy.json"), out.dump(2) + "\n", opt.quiet);
    if (!opt.quiet)
        std::printf("G = %s   Pi = %s\n", num17(e.G).c_str(),
                    num17(e.Pi).c_str());
    return 0;
}

int run_force(const RunConfig& cfg, const CliOptions& opt) {
    auto sol = solve_1d(cfg);
    if (sol.final_residual > cfg.numerics.newton_tol) return 2;
    std::string csv =
        "# schema=pbmem-force-1\n"
        "face,phi,grad_s_n,grad_m_n,rho,F_sd,F_alt,F_mst\n";
    json faces = json::array();
    for (Face f : {Face::cytosolic, Face::exoplasmic}) {
        const auto ff = face_forces(sol, f);
        const char* name = f == Face::cytosolic ? "cytosolic" : "exoplasmic";
        csv += std::string(name) + "," + num17(ff.traces.phi) + "," +
               num17(ff.traces.grad_s_n) + "," + num17(ff.traces.grad_m_n) +
               "," + num17(ff.traces.rho) + "," + num17(ff.sd) + "," +
               num17(ff.alt) + "," + num17(ff.mst) + "\n";
        json fj = traces_json(ff.traces);
        fj["face"] = name;
        fj["F_sd"] = ff.sd;
        fj["F_alt"] = ff.alt;
        fj["F_mst"] = ff.mst;
        faces.push_back(fj);
    }
    write_file(out_path(opt, "force.csv"), csv, opt.quiet);
    json out{{"schema_version", 1},
             {"config_fingerprint", config_fingerprint(cfg)},
             {"faces", faces}};
    write_file(out_path(opt, "force.json"), out.dump(2) + "\n", opt.quiet);
    return 0;
}

int run_verify(const RunConfig& cfg, const CliOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    VerificationReport rep;
    rep.config_fingerprint = config_fingerprint(cfg);
    auto sol = solve_1d(cfg);
    const unsigned seed = static_cast<unsigned>(opt.seed);

    rep.checks.push_back(
        make_check("solver_residual", sol.final_residual, 0.0, 1e-10));
    rep.checks.push_back(make_check(
        "weak_form", check_weak_form(sol, 20, seed + 1), 0.0, 1e-8));
    rep.checks.push_back(make_check(
        "maximizer", std::max(0.0, check_maximizer(sol, 20, seed + 2, 1e-3)),
        0.0, 1e-12));
    rep.checks.push_back(make_check(
        "force_equivalence", check_mst_equivalence(sol), 0.0, 1e-10));
    // lipid conservation on both faces
    const double cons_c =
        std::abs(sol.rho_c * sol.face_area_c - (cfg.physics.shared_lipid_pool
                                                    ? sol.rho_c * sol.face_area_c
                                                    : cfg.physics.lipid_pool_c));
    rep.checks.push_back(make_check("lipid_conservation_c", cons_c, 0.0, 1e-10));
    if (cfg.kind == GeometryKind::spherical) {
        auto sd = fd_shape_derivative(
            cfg.physics, cfg.radial, cfg.source, cfg.boundary.make(),
            [](double) { return 1.0; }, 1e-3, cfg.numerics);
        rep.checks.push_back(
            make_check("shape_derivative_rel", sd.rel_discrepancy, 0.0, 1e-2));
    }
    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    json checks = json::array();
    for (const auto& c : rep.checks) {
        if (!opt.quiet)
            std::printf("%-24s %12.5e  (tol %.1e)  %s\n", c.name.c_str(),
                        c.abs_error, c.tolerance, c.pass ? "pass" : "FAIL");
        checks.push_back(json{{"name", c.name},
                              {"value", c.value},
                              {"reference", c.reference},
                              {"abs_error", c.abs_error},
                              {"tolerance", c.tolerance},
                              {"pass", c.pass}});
    }
    json out{{"schema_version", 1},
             {"config_fingerprint", rep.config_fingerprint},
             {"runtime_seconds", rep.runtime_seconds},
             {"all_pass", rep.all_pass()},
             {"checks", checks}};
    write_file(out_path(opt, "verify.json"), out.dump(2) + "\n", opt.quiet);
    return rep.all_pass() ? 0 : 3;
}

int run_sweep(const RunConfig& cfg, const CliOptions& opt) {
    if (cfg.sweep_key.empty())
        throw std::runtime_error("config has no \"sweep\" block");
    struct Row {
        double value = 0.0, G = 0.0, Pi = 0.0;
        double F_sd_c = 0.0, F_sd_e = 0.0;
        double rho_c = 0.0, rho_e = 0.0;
        bool ok = false;
    };
    const int n = static_cast<int>(cfg.sweep_values.size());
    std::vector<Row> rows(n);
    auto work = [&](int i) {
        Row r;
        r.value = cfg.sweep_values[i];
        auto c = apply_sweep_value(cfg, cfg.sweep_key, r.value);
        auto sol = solve_1d(c);
        r.ok = sol.final_residual <= c.numerics.newton_tol;
        auto e = total_energy(sol, c.bending, c.quad_u, c.quad_v);
        r.G = e.G;
        r.Pi = e.Pi;
        r.rho_c = sol.rho_c;
        r.rho_e = sol.rho_e;
        r.F_sd_c = face_forces(sol, Face::cytosolic).sd;
        r.F_sd_e = face_forces(sol, Face::exoplasmic).sd;
        return r;
    };
    // deterministic regardless of worker count: results land by index
    const int workers = std::max(1, opt.workers);
    std::vector<std::future<Row>> futures;
    for (int start = 0; start < n; start += workers) {
        futures.clear();
        const int stop = std::min(n, start + workers);
        for (int i = start; i < stop; ++i)
            futures.push_back(std::async(std::launch::async, work, i));
        for (int i = start; i < stop; ++i) rows[i] = futures[i - start].get();
    }
    std::string csv =
        "# schema=pbmem-sweep-1\n# key=" + cfg.sweep_key +
        "\nvalue,G,Pi,rho_c,rho_e,F_sd_c,F_sd_e,converged\n";
    bool all_ok = true;
    for (const auto& r : rows) {
        csv += num17(r.value) + "," + num17(r.G) + "," + num17(r.Pi) + "," +
               num17(r.rho_c) + "," + num17(r.rho_e) + "," +
               num17(r.F_sd_c) + "," + num17(r.F_sd_e) + "," +
               (r.ok ? "1" : "0") + "\n";
        all_ok = all_ok && r.ok;
    }
    write_file(out_path(opt, "sweep.csv"), csv, opt.quiet);
    return all_ok ? 0 : 2;
}

}  // namespace pbmem
