#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pbmem/energy.hpp"
#include "pbmem/force.hpp"
#include "pbmem/geometry.hpp"
#include "pbmem/solver1d.hpp"

// Oracle harness: finite-difference validation of the shape derivative,
// surface-Jacobian and incompressibility diagnostics, Maxwell-stress
// equivalence sweeps, weak-form residuals, and the maximizer property.

namespace pbmem {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CheckResult make_check(const std::string& name, double value, double reference,
                       double tolerance);

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::string config_fingerprint;
    double runtime_seconds = 0.0;

    bool all_pass() const;
};

struct ShapeDerivativeCheck {
    double fd_value = 0.0;       // (G(+tau) - G(-tau)) / (2 tau)
    double formula_value = 0.0;  // sum over faces of int -F_n (V.n) dS
    double abs_discrepancy = 0.0;
    double rel_discrepancy = 0.0;
};

/// Central-difference shape derivative on a spherical 1D configuration.
/// The faces move radially by tau * v(R); each perturbed geometry keeps
/// the base per-region segment counts so G(tau) is smooth in tau.
ShapeDerivativeCheck fd_shape_derivative(
    const PhysicalParams& params, const RadialGeometry& geom,
    const SourceCharge& source, const BoundaryData& bc,
    const std::function<double(double)>& v_radial, double tau,
    const SolverOptions& opts = {});

/// Max over quadrature nodes of |FD_tau(J_s) - div_s V|.
double check_jacobian_rate(const ParametricSurface& s, const VelocityField& v,
                        double tau, int nu, int nv);

struct LemmaDiagnostic {
    double divergence_integral = 0.0;  // int_Gamma div_s F dS
    double curvature_integral = 0.0;   // int_Gamma 2 H (F.n) dS
};

LemmaDiagnostic lemma_diagnostic(const ParametricSurface& s,
                                 const VelocityField& f, int nu, int nv);

/// Max relative |F_sd - F_mst| and |F_sd - F_alt| over both faces,
/// traces corrected onto the discrete jump condition.
double check_mst_equivalence(const PotentialSolution& sol);

/// Max normalized residual of the discrete weak form against n_tests
/// seeded cubic B-spline test functions supported >= 2 cells away from
/// the interfaces and boundaries.
double check_weak_form(const PotentialSolution& sol, int n_tests,
                       unsigned seed, const std::vector<double>* phi = nullptr);

/// Max of G[phi + delta] - G[phi] over n seeded bump perturbations of
/// the given scale (<= 0 up to roundoff at the solved potential).
double check_maximizer(const PotentialSolution& sol, int n, unsigned seed,
                       double scale);

/// Named (surface, velocity) pairs exercising the surface Jacobian rate.
struct CorpusPair {
    std::string name;
    std::shared_ptr<const ParametricSurface> surface;
    VelocityField velocity;
};

std::vector<CorpusPair> geometry_corpus();

}  // namespace pbmem
