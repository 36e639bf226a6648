#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pbmem/core.hpp"
#include "pbmem/energy.hpp"
#include "pbmem/solver1d.hpp"
#include "pbmem/solver3d.hpp"

// Run configuration: JSON with strict schema validation (unknown keys
// rejected, every violation reported with its path), and the subcommand
// runners used by the command-line tool.

namespace pbmem {

enum class GeometryKind { spherical, planar, sdf3d };

struct BoundarySpec {
    // kind: "zero" | "constant" | "affine"  (g = b + a . x)
    std::string kind = "zero";
    double value = 0.0;
    Vec3 a = Vec3::Zero();
    double b = 0.0;

    BoundaryData make() const;
};

struct RunConfig {
    GeometryKind kind = GeometryKind::spherical;
    RadialGeometry radial;
    PlanarGeometry planar;
    double box_half = 5.0;  // sdf3d
    int grid_n = 65;        // sdf3d

    PhysicalParams physics;
    SourceCharge source;
    BoundarySpec boundary;
    SolverOptions numerics;
    Solver3dOptions numerics3d;
    int quad_u = 128, quad_v = 128;
    BendingParams bending;

    // sweep block (optional): dotted key plus the values to visit
    std::string sweep_key;
    std::vector<double> sweep_values;
};

/// Parse and validate; throws std::runtime_error whose message lists
/// every violation with its JSON path.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Stable fingerprint of the parsed config (hex digest of the
/// canonical serialization).
std::string config_fingerprint(const RunConfig& cfg);

struct CliOptions {
    std::string out_dir = ".";
    unsigned long long seed = 0;
    int workers = 1;
    bool quiet = false;
};

// Runners; return process exit code (0 ok, 2 solver failure,
// 3 verification failure).
int run_solve(const RunConfig& cfg, const CliOptions& opt);
int run_force(const RunConfig& cfg, const CliOptions& opt);
int run_energy(const RunConfig& cfg, const CliOptions& opt);
int run_verify(const RunConfig& cfg, const CliOptions& opt);
int run_sweep(const RunConfig& cfg, const CliOptions& opt);

}  // namespace pbmem
