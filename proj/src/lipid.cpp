#include "pbmem/lipid.hpp"

#include <cmath>
#include <stdexcept>

namespace pbmem {

namespace {

double gamma_val(const PhysicalParams& p, double phi) {
    if (p.gamma_kind == GammaKind::custom) return p.custom_gamma->gamma(phi);
    return lipid_weight(phi, p);
}

// Fold an out-of-rectangle chart point back into the chart: periodic
// dimensions wrap; a closed polar chart (non-periodic u, periodic v)
// continues through the pole via u -> 2 u_pole - u, v -> v + half
// period.  The reflection reverses the chart's u-direction, so
// contravariant u-components evaluated there pick up the sign `su`.
struct ChartPoint {
    double u, v;
    double su;
};

ChartPoint canonical(const ParametricSurface& s, double u, double v) {
    ChartPoint p{u, v, 1.0};
    if (s.periodic_u) {
        const double per = s.u1 - s.u0;
        p.u = s.u0 + std::fmod(std::fmod(u - s.u0, per) + per, per);
    } else if (s.closed && s.periodic_v) {
        const double half_v = 0.5 * (s.v1 - s.v0);
        if (p.u < s.u0) {
            p.u = 2.0 * s.u0 - p.u;
            p.v += half_v;
            p.su = -p.su;
        } else if (p.u > s.u1) {
            p.u = 2.0 * s.u1 - p.u;
            p.v += half_v;
            p.su = -p.su;
        }
    }
    if (s.periodic_v) {
        const double per = s.v1 - s.v0;
        p.v = s.v0 + std::fmod(std::fmod(p.v - s.v0, per) + per, per);
    }
    return p;
}

// contravariant components of grad_s g at (u,v), derivatives by central
// differences with steps (hu, hv); evaluation points are folded into the
// chart first
void grad_contra(const ParametricSurface& s, const ChartScalar& g, double u,
                 double v, double hu, double hv, double& fu, double& fv) {
    auto ev = [&](double uu, double vv) {
        const ChartPoint p = canonical(s, uu, vv);
        return g(p.u, p.v);
    };
    const double gu = (ev(u + hu, v) - ev(u - hu, v)) / (2.0 * hu);
    const double gv = (ev(u, v + hv) - ev(u, v - hv)) / (2.0 * hv);
    const SurfaceMetric m = s.metric(u, v);
    fu = m.inv_uu * gu + m.inv_uv * gv;
    fv = m.inv_uv * gu + m.inv_vv * gv;
}

}  // namespace

SurfaceChargeDensity lipid_density(const PhysicalParams& params,
                                   const ParametricSurface& s,
                                   const ChartScalar& phi_trace, double pool,
                                   int nu, int nv) {
    SurfaceChargeDensity d;
    d.surface = &s;
    d.quad = surface_quadrature(s, nu, nv);
    d.pool = pool;
    d.kind = params.gamma_kind;

    std::vector<double> w(static_cast<size_t>(nu) * nv);
    double norm = 0.0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = d.quad.u[i], v = d.quad.v[j];
            const double wv = gamma_val(params, phi_trace(u, v));
            w[static_cast<size_t>(i) * nv + j] = wv;
            norm += d.quad.wu[i] * d.quad.wv[j] * s.frame(u, v).area_weight * wv;
        }
    if (!(norm > 0.0))
        throw std::domain_error("lipid_density: nonpositive weight normalization");

    d.rho.resize(w.size());
    for (size_t k = 0; k < w.size(); ++k) d.rho[k] = d.pool * w[k] / norm;
    return d;
}

double lipid_conservation(const SurfaceChargeDensity& d) {
    const int nu = static_cast<int>(d.quad.u.size());
    const int nv = static_cast<int>(d.quad.v.size());
    double total = 0.0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j)
            total += d.quad.wu[i] * d.quad.wv[j] *
                     d.surface->frame(d.quad.u[i], d.quad.v[j]).area_weight *
                     d.rho[static_cast<size_t>(i) * nv + j];
    return total;
}

std::vector<double> electrodiffusion_residual(const PhysicalParams& params,
                                              const ParametricSurface& s,
                                              const ChartScalar& rho,
                                              const ChartScalar& phi_trace,
                                              int nu, int nv) {
    const SurfaceQuadrature q = surface_quadrature(s, nu, nv);
    const double hu = (s.u1 - s.u0) / (2.0 * nu);
    const double hv = (s.v1 - s.v0) / (2.0 * nv);
    const double D = params.diffusion;
    const double drift = params.beta * params.lipid_charge;

    // sqrt(a)-scaled contravariant flux components of
    // D grad_s rho + D beta q_l rho grad_s phi, folded into the chart
    auto flux = [&](double u, double v, double& sa_Fu, double& sa_Fv) {
        const ChartPoint p = canonical(s, u, v);
        double ru, rv, pu, pv;
        grad_contra(s, rho, p.u, p.v, hu, hv, ru, rv);
        grad_contra(s, phi_trace, p.u, p.v, hu, hv, pu, pv);
        const double r = rho(p.u, p.v);
        const double sa = s.metric(p.u, p.v).sqrt_a;
        sa_Fu = p.su * sa * D * (ru + drift * r * pu);
        sa_Fv = sa * D * (rv + drift * r * pv);
    };

    std::vector<double> out(static_cast<size_t>(nu) * nv);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = q.u[i], v = q.v[j];
            double Fu_p, Fv_p, Fu_m, Fv_m, dummy;
            flux(u + hu, v, Fu_p, dummy);
            flux(u - hu, v, Fu_m, dummy);
            flux(u, v + hv, dummy, Fv_p);
            flux(u, v - hv, dummy, Fv_m);
            const double sa = s.metric(u, v).sqrt_a;
            out[static_cast<size_t>(i) * nv + j] =
                ((Fu_p - Fu_m) / (2.0 * hu) + (Fv_p - Fv_m) / (2.0 * hv)) / sa;
        }
    return out;
}

}  // namespace pbmem
