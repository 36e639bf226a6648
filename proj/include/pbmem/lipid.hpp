#pragma once

#include <functional>
#include <vector>

#include "pbmem/core.hpp"
#include "pbmem/geometry.hpp"

// Charged-lipid surface density rho = C w(phi) / int_Gamma w dS with the
// normalized Boltzmann weight w = e^{-q_l beta phi} (or a user-supplied
// gamma), plus the steady-state surface electrodiffusion residual
// div_s(D grad_s rho + D beta q_l rho grad_s phi).

namespace pbmem {

// Scalar field on a chart; must extend smoothly a little beyond the
// parameter rectangle (analytic formulas in (u,v) do).
using ChartScalar = std::function<double(double u, double v)>;

struct SurfaceChargeDensity {
    const ParametricSurface* surface = nullptr;
    SurfaceQuadrature quad;                 // node layout
    std::vector<double> rho;                // quad node values, u-major
    double pool = 0.0;                      // the face's C
    GammaKind kind = GammaKind::boltzmann;
};

SurfaceChargeDensity lipid_density(const PhysicalParams& params,
                                   const ParametricSurface& s,
                                   const ChartScalar& phi_trace, double pool,
                                   int nu, int nv);

/// int_Gamma rho dS at the density's own quadrature; equals pool to
/// roundoff by construction.
double lipid_conservation(const SurfaceChargeDensity& d);

/// Residual of the steady surface electrodiffusion operator at every
/// quadrature node.  Derivatives use nested chart-based central
/// differences with step tied to the quadrature spacing, so the residual
/// of a Boltzmann density converges to zero at second order.
std::vector<double> electrodiffusion_residual(const PhysicalParams& params,
                                              const ParametricSurface& s,
                                              const ChartScalar& rho,
                                              const ChartScalar& phi_trace,
                                              int nu, int nv);

}  // namespace pbmem
