#include "pbmem/force.hpp"

#include <stdexcept>

namespace pbmem {

namespace {

double grad_sq(const InterfaceTraces& tr, double normal) {
    return tr.tangential_sq + normal * normal;
}

}  // namespace

double force_sd(const PhysicalParams& p, const InterfaceTraces& tr) {
    const double gs = tr.grad_s_n, gm = tr.grad_m_n;
    return -0.5 * p.eps_s * grad_sq(tr, gs) + 0.5 * p.eps_m * grad_sq(tr, gm) -
           p.eps_m * gm * gm + p.eps_m * gs * gm - b_energy(tr.phi, p) -
           p.lipid_charge * tr.rho * gs;
}

double force_alt(const PhysicalParams& p, const InterfaceTraces& tr) {
    const double gs = tr.grad_s_n, gm = tr.grad_m_n;
    return -0.5 * p.eps_s * grad_sq(tr, gs) + 0.5 * p.eps_m * grad_sq(tr, gm) +
           p.eps_s * gs * gs - p.eps_s * gs * gm - b_energy(tr.phi, p) -
           p.lipid_charge * tr.rho * gm;
}

double force_mst(const PhysicalParams& p, const InterfaceTraces& tr) {
    // n.M n with M = eps E (x) E - (eps/2)|E|^2 I - chi_s B(psi) I, E = -grad
    // psi; the tangential-squared parts enter via |E|^2.
    const double gs = tr.grad_s_n, gm = tr.grad_m_n;
    const double s_side =
        p.eps_s * gs * gs - 0.5 * p.eps_s * grad_sq(tr, gs) - b_energy(tr.phi, p);
    const double m_side = p.eps_m * gm * gm - 0.5 * p.eps_m * grad_sq(tr, gm);
    return s_side - m_side;
}

ForceProfile force_profile(const PhysicalParams& params, Face face,
                           const std::vector<InterfaceTraces>& traces) {
    ForceProfile pr;
    pr.face = face;
    pr.traces = traces;
    pr.F_sd.reserve(traces.size());
    pr.F_alt.reserve(traces.size());
    pr.F_mst.reserve(traces.size());
    for (const auto& tr : traces) {
        pr.F_sd.push_back(force_sd(params, tr));
        pr.F_alt.push_back(force_alt(params, tr));
        pr.F_mst.push_back(force_mst(params, tr));
    }
    return pr;
}

double shape_derivative_integral(const ParametricSurface& s,
                                 const std::vector<double>& F_n,
                                 const VelocityField& velocity, int nu,
                                 int nv) {
    if (F_n.size() != static_cast<size_t>(nu) * nv)
        throw std::invalid_argument(
            "shape_derivative_integral: F_n size does not match nu x nv");
    const SurfaceQuadrature q = surface_quadrature(s, nu, nv);
    double acc = 0.0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const SurfaceFrame fr = s.frame(q.u[i], q.v[j]);
            const double vn = velocity.value(fr.r).dot(fr.n);
            acc += q.wu[i] * q.wv[j] * fr.area_weight *
                   (-F_n[static_cast<size_t>(i) * nv + j] * vn);
        }
    return acc;
}

}  // namespace pbmem
