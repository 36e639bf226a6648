#include "pbmem/solver3d.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace pbmem {

namespace {

double cosine_delta(double d, double h) {
    const double w = 2.0 * h;  // half-support
    if (std::abs(d) >= w) return 0.0;
    return (1.0 + std::cos(M_PI * d / w)) / (2.0 * w);
}

// exact integral of one ion... of a 1D Gaussian over [a, b]
double gauss_mass_1d(double c, double sigma, double a, double b) {
    const double s = sigma * M_SQRT2;
    return 0.5 * (std::erf((b - c) / s) - std::erf((a - c) / s));
}

struct Assembly3D {
    Grid3D grid;
    std::vector<std::uint8_t> region;
    std::vector<double> gx, gy, gz;   // face conductances, stored at low node
    std::vector<double> vs;           // solvent volume per node
    std::vector<double> src;          // source + face charge per node
    std::vector<double> gval;         // Dirichlet values (boundary nodes)
    double face_area_c = 0.0, face_area_e = 0.0;
    double rho_c = 0.0, rho_e = 0.0;

    int n() const { return grid.n; }
    bool boundary(int i, int j, int k) const {
        return i == 0 || j == 0 || k == 0 || i == grid.n - 1 ||
               j == grid.n - 1 || k == grid.n - 1;
    }
};

void build_assembly(Assembly3D& a, const PhysicalParams& p,
                    const RegionSdf& regions, const SourceCharge& source,
                    const BoundaryData& bc) {
    const int n = a.grid.n;
    const double h = a.grid.h;
    const long total = static_cast<long>(n) * n * n;
    a.region.resize(total);
    std::vector<double> eps(total);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Vec3 x = a.grid.x(i, j, k);
                const std::uint8_t r = regions.label(x);
                a.region[a.grid.idx(i, j, k)] = r;
                eps[a.grid.idx(i, j, k)] = r == kNodeSolvent  ? p.eps_s
                                           : r == kNodeMembrane ? p.eps_m
                                                                : p.eps_p;
            }

    // harmonic mean weighted by the sub-cell interface fraction: if the
    // segment between two nodes crosses a level set at fraction theta
    // (from the low node), the series conductance is
    // 1 / (theta/eps_a + (1-theta)/eps_b)
    auto harm = [&](const Vec3& xa, const Vec3& xb, double ea, double eb) {
        if (ea == eb) return h * ea;
        double theta = 0.5;
        for (const auto* sdf : {&regions.sdf_c, &regions.sdf_e, &regions.sdf_p}) {
            if (!*sdf) continue;
            const double da = (*sdf)(xa), db = (*sdf)(xb);
            if ((da < 0.0) != (db < 0.0)) {
                theta = std::clamp(std::abs(da) / (std::abs(da) + std::abs(db)),
                                   1e-6, 1.0 - 1e-6);
                break;
            }
        }
        return h / (theta / ea + (1.0 - theta) / eb);
    };
    a.gx.assign(total, 0.0);
    a.gy.assign(total, 0.0);
    a.gz.assign(total, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const long id = a.grid.idx(i, j, k);
                const Vec3 x = a.grid.x(i, j, k);
                if (i + 1 < n)
                    a.gx[id] = harm(x, a.grid.x(i + 1, j, k), eps[id], eps[id + 1]);
                if (j + 1 < n)
                    a.gy[id] = harm(x, a.grid.x(i, j + 1, k), eps[id], eps[id + n]);
                if (k + 1 < n)
                    a.gz[id] = harm(x, a.grid.x(i, j, k + 1), eps[id],
                                    eps[id + static_cast<long>(n) * n]);
            }

    a.vs.assign(total, 0.0);
    a.src.assign(total, 0.0);
    a.gval.assign(total, 0.0);
    const double cell = h * h * h;

    // separable exact Gaussian cell masses
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const long id = a.grid.idx(i, j, k);
                if (a.region[id] == kNodeSolvent) a.vs[id] = cell;
                const Vec3 x = a.grid.x(i, j, k);
                for (const auto& c : source.charges) {
                    a.src[id] += c.magnitude *
                                 gauss_mass_1d(c.center.x(), c.width,
                                               x.x() - h / 2, x.x() + h / 2) *
                                 gauss_mass_1d(c.center.y(), c.width,
                                               x.y() - h / 2, x.y() + h / 2) *
                                 gauss_mass_1d(c.center.z(), c.width,
                                               x.z() - h / 2, x.z() + h / 2);
                }
                if (a.boundary(i, j, k)) a.gval[id] = bc.g(x);
            }

    // lipid surface charge: cosine delta along each face level set,
    // normalized so the discrete pool equals C exactly
    auto spread = [&](const std::function<double(const Vec3&)>& sdf,
                      double pool, double& area, double& rho) {
        if (!sdf) return;
        std::vector<std::pair<long, double>> w;
        double wsum = 0.0;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const double d = sdf(a.grid.x(i, j, k));
                    const double dw = cosine_delta(d, h) * cell;
                    if (dw > 0.0) {
                        w.emplace_back(a.grid.idx(i, j, k), dw);
                        wsum += dw;
                    }
                }
        area = wsum;  // integral of the delta over the box
        if (wsum <= 0.0 || pool == 0.0) {
            rho = 0.0;
            return;
        }
        rho = pool / wsum;
        for (const auto& [id, dw] : w)
            a.src[id] += p.lipid_charge * pool * dw / wsum;
    };
    spread(regions.sdf_c, p.lipid_pool_c, a.face_area_c, a.rho_c);
    spread(regions.sdf_e, p.lipid_pool_e, a.face_area_e, a.rho_e);
}

struct Operator {
    const Assembly3D* a;
    const PhysicalParams* p;
    bool linearized;
    double kappa2;

    double ion_slope(double phi) const {
        return linearized ? kappa2 : b_second(phi, *p);
    }
    double ion_value(double phi) const {
        return linearized ? kappa2 * phi : b_prime(phi, *p);
    }

    // residual and diagonal of the Jacobian (for scaling)
    void residual(const std::vector<double>& phi, std::vector<double>& R,
                  std::vector<double>& diag) const {
        const int n = a->grid.n;
        const long nn = static_cast<long>(n) * n;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const long id = a->grid.idx(i, j, k);
                    if (a->boundary(i, j, k)) {
                        R[id] = 0.0;
                        diag[id] = 1.0;
                        continue;
                    }
                    double r = a->src[id] - ion_value(phi[id]) * a->vs[id];
                    double d = ion_slope(phi[id]) * a->vs[id];
                    r += a->gx[id] * (phi[id + 1] - phi[id]);
                    r += a->gx[id - 1] * (phi[id - 1] - phi[id]);
                    r += a->gy[id] * (phi[id + n] - phi[id]);
                    r += a->gy[id - n] * (phi[id - n] - phi[id]);
                    r += a->gz[id] * (phi[id + nn] - phi[id]);
                    r += a->gz[id - nn] * (phi[id - nn] - phi[id]);
                    d += a->gx[id] + a->gx[id - 1] + a->gy[id] + a->gy[id - n] +
                         a->gz[id] + a->gz[id - nn];
                    R[id] = r;
                    diag[id] = d;
                }
    }

    // y = K z with K = -J (symmetric positive definite); z zero on boundary
    void apply(const std::vector<double>& lin_diag, const std::vector<double>& z,
               std::vector<double>& y) const {
        const int n = a->grid.n;
        const long nn = static_cast<long>(n) * n;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    const long id = a->grid.idx(i, j, k);
                    if (a->boundary(i, j, k)) {
                        y[id] = z[id];
                        continue;
                    }
                    double acc = lin_diag[id] * z[id];
                    acc -= a->gx[id] * z[id + 1] + a->gx[id - 1] * z[id - 1];
                    acc -= a->gy[id] * z[id + n] + a->gy[id - n] * z[id - n];
                    acc -= a->gz[id] * z[id + nn] + a->gz[id - nn] * z[id - nn];
                    y[id] = acc;
                }
    }
};

// Jacobi-preconditioned CG for K d = R; d starts at zero, boundary rows
// are identity with zero right-hand side.
long pcg(const Operator& op, const std::vector<double>& lin_diag,
         const std::vector<double>& R, std::vector<double>& d, double rel_tol,
         int max_iter) {
    const size_t N = R.size();
    d.assign(N, 0.0);
    std::vector<double> r = R, z(N), q(N), s(N);
    for (size_t i = 0; i < N; ++i) z[i] = r[i] / lin_diag[i];
    s = z;
    double rz = 0.0, r0 = 0.0;
    for (size_t i = 0; i < N; ++i) {
        rz += r[i] * z[i];
        r0 += r[i] * r[i];
    }
    r0 = std::sqrt(r0);
    if (r0 == 0.0) return 0;
    long it = 0;
    for (; it < max_iter; ++it) {
        op.apply(lin_diag, s, q);
        double sq = 0.0;
        for (size_t i = 0; i < N; ++i) sq += s[i] * q[i];
        const double alpha = rz / sq;
        double rr = 0.0;
        for (size_t i = 0; i < N; ++i) {
            d[i] += alpha * s[i];
            r[i] -= alpha * q[i];
            rr += r[i] * r[i];
        }
        if (std::sqrt(rr) <= rel_tol * r0) {
            ++it;
            break;
        }
        double rz_new = 0.0;
        for (size_t i = 0; i < N; ++i) {
            z[i] = r[i] / lin_diag[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < N; ++i) s[i] = z[i] + beta * s[i];
    }
    return it;
}

Solution3D solve_on_grid(const PhysicalParams& params, const Grid3D& grid,
                         const RegionSdf& regions, const SourceCharge& source,
                         const BoundaryData& bc, const Solver3dOptions& opts) {
    Solution3D sol;
    sol.grid = grid;
    sol.params = params;

    // coarse-grid warm start (same box, half resolution)
    std::vector<double> phi;
    if (opts.coarse_levels > 0 && (grid.n - 1) % 2 == 0 && grid.n >= 33) {
        Grid3D coarse = grid;
        coarse.n = (grid.n - 1) / 2 + 1;
        coarse.h = grid.h * 2.0;
        Solver3dOptions copts = opts;
        copts.coarse_levels = opts.coarse_levels - 1;
        const Solution3D cs =
            solve_on_grid(params, coarse, regions, source, bc, copts);
        phi.assign(static_cast<long>(grid.n) * grid.n * grid.n, 0.0);
        for (int k = 0; k < grid.n; ++k)
            for (int j = 0; j < grid.n; ++j)
                for (int i = 0; i < grid.n; ++i)
                    phi[grid.idx(i, j, k)] = cs.value_at(grid.x(i, j, k));
    } else {
        phi.assign(static_cast<long>(grid.n) * grid.n * grid.n, 0.0);
    }

    Assembly3D a;
    a.grid = grid;
    build_assembly(a, params, regions, source, bc);
    const int n = grid.n;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (a.boundary(i, j, k))
                    phi[grid.idx(i, j, k)] = a.gval[grid.idx(i, j, k)];

    Operator op{&a, &params, opts.linearized, debye_kappa_sq(params)};

    const size_t N = phi.size();
    std::vector<double> R(N), diag(N), d(N);
    op.residual(phi, R, diag);
    auto scaled = [&]() {
        double mx = 0.0;
        for (size_t i = 0; i < N; ++i)
            mx = std::max(mx, std::abs(R[i]) / diag[i]);
        return mx;
    };
    double res = scaled();
    int it = 0;
    long cg_total = 0;
    while (res > opts.newton_tol && it < opts.max_newton) {
        // inexact Newton forcing, tightened near convergence
        const double eta =
            std::clamp(0.01 * opts.newton_tol / res, 1e-11, 1e-3);
        cg_total += pcg(op, diag, R, d, eta, opts.max_cg);
        for (size_t i = 0; i < N; ++i) phi[i] += d[i];
        op.residual(phi, R, diag);
        const double next = scaled();
        if (next >= res)
            throw std::runtime_error("3D Newton stagnated at scaled residual " +
                                     std::to_string(next));
        res = next;
        ++it;
    }
    if (res > opts.newton_tol)
        throw std::runtime_error("3D Newton did not converge: " +
                                 std::to_string(res));

    sol.region = std::move(a.region);
    sol.phi = std::move(phi);
    sol.rho_c = a.rho_c;
    sol.rho_e = a.rho_e;
    sol.face_area_c = a.face_area_c;
    sol.face_area_e = a.face_area_e;
    sol.newton_iterations = it;
    sol.cg_iterations = cg_total;
    sol.final_residual = res;
    return sol;
}

}  // namespace

std::uint8_t RegionSdf::label(const Vec3& x) const {
    if (sdf_p && sdf_p(x) < 0.0) return kNodeProtein;
    if (sdf_c && sdf_e && sdf_c(x) >= 0.0 && sdf_e(x) < 0.0)
        return kNodeMembrane;
    return kNodeSolvent;
}

RegionSdf RegionSdf::concentric(double R_c, double R_e) {
    RegionSdf r;
    r.sdf_c = [R_c](const Vec3& x) { return x.norm() - R_c; };
    r.sdf_e = [R_e](const Vec3& x) { return x.norm() - R_e; };
    return r;
}

void RegionSdf::validate(const Grid3D& grid) const {
    if (!sdf_c || !sdf_e)
        throw std::invalid_argument("RegionSdf requires sdf_c and sdf_e");
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> pick(0.0, grid.extent());
    const double fd = 1e-5;
    int near = 0;
    for (int trial = 0; trial < 20000 && near < 200; ++trial) {
        const Vec3 x = grid.origin + Vec3(pick(rng), pick(rng), pick(rng));
        for (const auto* sdf : {&sdf_c, &sdf_e}) {
            const double d = (*sdf)(x);
            if (std::abs(d) > 2.0 * grid.h) continue;
            ++near;
            Vec3 g;
            for (int c = 0; c < 3; ++c) {
                Vec3 e = Vec3::Zero();
                e[c] = fd;
                g[c] = ((*sdf)(x + e) - (*sdf)(x - e)) / (2.0 * fd);
            }
            if (std::abs(g.norm() - 1.0) > 0.2)
                throw std::invalid_argument(
                    "RegionSdf: |grad sdf| deviates from 1 near an interface");
            // shell thickness along the normal
            if (sdf == &sdf_c && sdf_e(x) > d - 3.0 * grid.h)
                throw std::invalid_argument(
                    "RegionSdf: membrane shell thinner than 3h");
        }
    }
}

double Solution3D::value_at(const Vec3& x) const {
    const int n = grid.n;
    const Vec3 rel = (x - grid.origin) / grid.h;
    int i = static_cast<int>(std::floor(rel.x()));
    int j = static_cast<int>(std::floor(rel.y()));
    int k = static_cast<int>(std::floor(rel.z()));
    i = std::clamp(i, 0, n - 2);
    j = std::clamp(j, 0, n - 2);
    k = std::clamp(k, 0, n - 2);
    const double fx = std::clamp(rel.x() - i, 0.0, 1.0);
    const double fy = std::clamp(rel.y() - j, 0.0, 1.0);
    const double fz = std::clamp(rel.z() - k, 0.0, 1.0);
    double acc = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                const double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy) *
                                 (dk ? fz : 1.0 - fz);
                acc += w * phi[grid.idx(i + di, j + dj, k + dk)];
            }
    return acc;
}

Solution3D assemble_and_solve_3d(const PhysicalParams& params,
                                 const Grid3D& grid, const RegionSdf& regions,
                                 const SourceCharge& source,
                                 const BoundaryData& bc,
                                 const Solver3dOptions& opts) {
    params.validate();
    if (grid.n < 9) throw std::invalid_argument("grid too small");
    regions.validate(grid);
    return solve_on_grid(params, grid, regions, source, bc, opts);
}

std::vector<InterfaceTraces> extract_traces_3d(const Solution3D& sol,
                                               const ParametricSurface& s,
                                               Face face, int nu, int nv) {
    const double h = sol.grid.h;
    const SurfaceQuadrature q = surface_quadrature(s, nu, nv);
    std::vector<InterfaceTraces> out;
    out.reserve(static_cast<size_t>(nu) * nv);

    // quadratic extrapolation weights for nodes at t = (2.5, 3.5, 4.5) h,
    // outside the 2h mollification band of the surface charge
    const double v0[3] = {7.875, -11.25, 4.375};          // value at t = 0
    const double d0[3] = {-4.0 / h, 7.0 / h, -3.0 / h};   // d/dt at t = 0

    const double rho = sol.params.lipid_charge == 0.0
                           ? 0.0
                           : (face == Face::cytosolic ? sol.rho_c : sol.rho_e);

    // chart FD step sized so the arc step is about one grid cell
    auto face_phi = [&](double uu, double vv) {
        const SurfaceFrame fr = s.frame(uu, vv);
        const Vec3 ns = (face == Face::exoplasmic ? 1.0 : -1.0) * fr.n;
        double vals[3];
        for (int m = 0; m < 3; ++m)
            vals[m] = sol.value_at(fr.r + (2.5 + m) * h * ns);
        return v0[0] * vals[0] + v0[1] * vals[1] + v0[2] * vals[2];
    };

    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const double u = q.u[i], v = q.v[j];
            const SurfaceFrame fr = s.frame(u, v);
            const Vec3 ns = (face == Face::exoplasmic ? 1.0 : -1.0) * fr.n;

            double ps[3], pm[3];
            for (int m = 0; m < 3; ++m) {
                ps[m] = sol.value_at(fr.r + (2.5 + m) * h * ns);
                pm[m] = sol.value_at(fr.r - (2.5 + m) * h * ns);
            }
            InterfaceTraces tr;
            tr.phi = v0[0] * ps[0] + v0[1] * ps[1] + v0[2] * ps[2];
            tr.grad_s_n = d0[0] * ps[0] + d0[1] * ps[1] + d0[2] * ps[2];
            // membrane-side extrapolation runs along -ns, flip the sign
            tr.grad_m_n = -(d0[0] * pm[0] + d0[1] * pm[1] + d0[2] * pm[2]);
            tr.rho = rho;

            const double du = h / std::max(fr.r_u.norm(), 1e-12);
            const double dv = h / std::max(fr.r_v.norm(), 1e-12);
            const double gu = (face_phi(u + du, v) - face_phi(u - du, v)) /
                              (2.0 * du);
            const double gv = (face_phi(u, v + dv) - face_phi(u, v - dv)) /
                              (2.0 * dv);
            const SurfaceMetric mt = s.metric(u, v);
            const double fu = mt.inv_uu * gu + mt.inv_uv * gv;
            const double fv = mt.inv_uv * gu + mt.inv_vv * gv;
            // |grad_s phi|^2 = f^a a_ab f^b with covariant metric (E,F,G)
            tr.tangential_sq =
                fu * fu * mt.E + 2.0 * fu * fv * mt.F + fv * fv * mt.G;
            tr.jump_residual = sol.params.eps_s * tr.grad_s_n -
                               sol.params.eps_m * tr.grad_m_n +
                               sol.params.lipid_charge * tr.rho;
            out.push_back(tr);
        }
    return out;
}

}  // namespace pbmem
