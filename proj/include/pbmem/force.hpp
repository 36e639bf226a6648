#pragma once

#include <functional>
#include <vector>

#include "pbmem/geometry.hpp"
#include "pbmem/solver1d.hpp"

// Normal dielectric boundary force on a membrane face in three
// algebraically equivalent forms, and the shape-derivative surface
// integral delta_Gamma G = int -F_n (V.n) dS.
//
// Conventions: n points from the membrane into the solvent; |grad psi|^2
// per side is |tangential gradient|^2 + (normal trace)^2, the tangential
// part being shared across the interface; B(psi) uses the (continuous)
// potential trace.

namespace pbmem {

double force_sd(const PhysicalParams& params, const InterfaceTraces& tr);
double force_alt(const PhysicalParams& params, const InterfaceTraces& tr);
double force_mst(const PhysicalParams& params, const InterfaceTraces& tr);

struct ForceProfile {
    Face face = Face::cytosolic;
    std::vector<InterfaceTraces> traces;  // per node
    std::vector<double> F_sd, F_alt, F_mst;
};

/// All three force forms from a set of per-node traces.
ForceProfile force_profile(const PhysicalParams& params, Face face,
                           const std::vector<InterfaceTraces>& traces);

/// delta_Gamma G = int_Gamma -F_n (V.n) dS with F_n sampled on the
/// face's quadrature grid (u-major layout, nu x nv values).
double shape_derivative_integral(const ParametricSurface& s,
                                 const std::vector<double>& F_n,
                                 const VelocityField& velocity, int nu,
                                 int nv);

}  // namespace pbmem
