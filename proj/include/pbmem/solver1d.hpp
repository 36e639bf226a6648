#pragma once

#include <array>
#include <vector>

#include "pbmem/core.hpp"

// Reference solvers for planar-slab and concentric-spherical geometries:
// nonlinear Newton solve of the Poisson-Boltzmann equation with the
// charged-interface jump condition and a self-consistent lipid density,
// plus closed-form linearized oracles.
//
// Discretization: conservative finite volumes on an interface-fitted
// node mesh.  Spherical segment conductances are the exact two-point
// resistances 4*pi*eps / (1/r_i - 1/r_{i+1}), so piecewise-Coulomb
// solutions are reproduced to roundoff outside the source support.

namespace pbmem {

enum class Face { cytosolic, exoplasmic };

struct RadialGeometry {
    double R_c = 2.0;
    double R_e = 3.0;
    double R_outer = 13.0;
    int node_count = 2048;  // total segment count, split across regions
    double grading = 1.0;   // >1 clusters nodes toward region ends
    // Explicit per-region segment counts; 0 = derive from node_count.
    std::array<int, 3> region_segments{0, 0, 0};

    void validate() const;
    std::array<int, 3> resolve_segments() const;
};

struct PlanarGeometry {
    double z_c = 10.0;
    double z_e = 20.0;
    double L = 30.0;
    int node_count = 2048;
    double grading = 1.0;
    std::array<int, 3> region_segments{0, 0, 0};

    void validate() const;
    std::array<int, 3> resolve_segments() const;
};

struct SolverOptions {
    double newton_tol = 1e-12;   // scaled residual, see PotentialSolution
    int max_newton = 60;
    double fp_tol = 1e-10;       // |delta rho| between fixed-point sweeps
    int max_fp = 200;
    double fp_damping = 0.5;
    bool linearized = false;     // replace B'(phi) by B''(0) phi
};

// Region code per cell.
inline constexpr int kRegionSolvent = 0;
inline constexpr int kRegionMembrane = 1;

struct PotentialSolution {
    bool spherical = true;
    std::vector<double> r;            // node coordinates
    std::vector<double> phi;          // potential per node
    std::vector<int> cell_region;     // per segment
    int idx_c = -1, idx_e = -1;       // interface node indices

    // Discrete operator data (fixed by mesh + params; reused by the
    // energy functional and the weak-form residual so that discrete
    // duality is exact).
    std::vector<double> conductance;      // per segment
    std::vector<double> solvent_volume;   // per node (ionic term support)
    std::vector<double> source;           // per node: enclosed-charge increment
    double face_area_c = 0.0, face_area_e = 0.0;

    double rho_c = 0.0, rho_e = 0.0;  // converged lipid densities
    int newton_iterations = 0;
    double final_residual = 0.0;      // max_i |R_i / J_ii| at convergence
    std::vector<double> residual_history;
    int fixed_point_iterations = 0;
    double fixed_point_delta = 0.0;

    PhysicalParams params;

    double face_area(Face f) const {
        return f == Face::cytosolic ? face_area_c : face_area_e;
    }
    double face_rho(Face f) const { return f == Face::cytosolic ? rho_c : rho_e; }
    int face_index(Face f) const { return f == Face::cytosolic ? idx_c : idx_e; }
};

PotentialSolution solve_spherical(const PhysicalParams& params,
                                  const RadialGeometry& geom,
                                  const SourceCharge& source,
                                  const BoundaryData& bc,
                                  const SolverOptions& opts = {});

PotentialSolution solve_planar(const PhysicalParams& params,
                               const PlanarGeometry& geom,
                               const BoundaryData& bc,
                               const SolverOptions& opts = {});

/// Residual of the discrete weak form at an arbitrary nodal field
/// (Dirichlet rows excluded); zero at the converged solution.
std::vector<double> discrete_residual(const PotentialSolution& sol,
                                      const std::vector<double>& phi);

// Closed-form linearized spherical solution: screened Coulomb in the
// solvent regions, harmonic a + b/r in the membrane, assembled from the
// 6x6 continuity/flux matching system.  Oracle for solve_spherical in
// the linear regime.
struct LinearizedSphericalSolution {
    double kappa = 0.0;
    double R_c = 0.0, R_e = 0.0, R_outer = 0.0;
    // inner solvent: c0 * u_reg + c1 * u_sing + phi_p (exact particular
    // solution for the Gaussian source in the screened medium);
    // membrane: c2 + c3 / r;
    // outer solvent: c4 * e^{-kr}/r + c5 * e^{+kr}/r  (k = 0: c4 + c5/r)
    std::array<double, 6> coef{};
    SourceCharge source;
    double eps_s = 0.0;
    double max_matching_residual = 0.0;

    double eval(double r) const;
    double deriv(double r) const;
};

LinearizedSphericalSolution solve_linearized_spherical(
    const PhysicalParams& params, const RadialGeometry& geom,
    const SourceCharge& source, const BoundaryData& bc);

// Closed-form linearized planar solution (transfer-matrix style):
// exp(+-kz) in the solvent slabs, linear in the membrane.
struct LinearizedPlanarSolution {
    double kappa = 0.0;
    double z_c = 0.0, z_e = 0.0, L = 0.0;
    std::array<double, 6> coef{};
    double max_matching_residual = 0.0;

    double eval(double z) const;
    double deriv(double z) const;
};

LinearizedPlanarSolution solve_linearized_planar(const PhysicalParams& params,
                                                 const PlanarGeometry& geom,
                                                 const BoundaryData& bc,
                                                 double rho_c, double rho_e);

struct InterfaceTraces {
    double phi = 0.0;
    double grad_s_n = 0.0;       // solvent-side normal derivative
    double grad_m_n = 0.0;       // membrane-side normal derivative
    double tangential_sq = 0.0;  // |tangential gradient|^2 (0 in 1D)
    double rho = 0.0;
    double jump_residual = 0.0;  // eps_s g_s - eps_m g_m + q_l rho
};

/// One-sided second-order finite-difference traces at a face.
InterfaceTraces extract_traces(const PotentialSolution& sol, Face face);

/// Minimal-norm correction of (grad_s_n, grad_m_n) so the discrete jump
/// condition holds exactly; used when evaluating the algebraic force
/// identities.
InterfaceTraces enforce_jump_condition(const InterfaceTraces& tr,
                                       const PhysicalParams& params);

}  // namespace pbmem
