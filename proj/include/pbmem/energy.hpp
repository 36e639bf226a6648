#pragma once

#include <vector>

#include "pbmem/geometry.hpp"
#include "pbmem/solver1d.hpp"

// Electrostatic free energy G, Canham-Helfrich bending energy E, and the
// total potential energy Pi = E + G.  The discrete G is assembled as the
// exact antiderivative of the solver residual (same conductances, source
// increments, and ionic volumes), so the solved potential maximizes G_h
// over nodal fields with fixed boundary values to roundoff.

namespace pbmem {

struct BendingParams {
    double K_C = 0.0;  // bending modulus
    double K_G = 0.0;  // Gaussian saddle-splay modulus
    double C0 = 0.0;   // spontaneous curvature
};

struct EnergyBreakdown {
    double field_term = 0.0;        // -1/2 int eps |grad phi|^2
    double source_term = 0.0;       // int f phi
    double ionic_term = 0.0;        // -int_solvent B(phi)
    double surface_entropy_c = 0.0; // face entropy terms; a shared pool
    double surface_entropy_e = 0.0; //   reports its joint term under _c
    double bending_c = 0.0;
    double bending_e = 0.0;
    double G = 0.0;   // field + source + ionic + entropies
    double Pi = 0.0;  // G + bending
};

/// G evaluated at the converged potential of a 1D solution.
EnergyBreakdown electrostatic_energy(const PotentialSolution& sol);

/// G evaluated at an arbitrary nodal field on the same mesh (the lipid
/// densities re-enter through the entropy term, so this is the exact
/// functional whose critical point the solver computes).
double energy_at_field(const PotentialSolution& sol,
                       const std::vector<double>& phi);

/// int_Gamma [ (1/2) K_C (2H - C0)^2 + K_G K ] dS by surface quadrature.
double bending_energy(const ParametricSurface& s, double K_C, double K_G,
                      double C0, int nu = 128, int nv = 128);

/// Pi = G + bending over both faces.  Spherical solutions use spheres of
/// the face radii; planar faces are flat (only the C0^2 offset survives,
/// taken per unit area).
EnergyBreakdown total_energy(const PotentialSolution& sol,
                             const BendingParams& bp, int nu = 128,
                             int nv = 128);

}  // namespace pbmem
