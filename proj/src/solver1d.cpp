#include "pbmem/solver1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pbmem {

namespace {

std::array<int, 3> distribute_segments(int total, const std::array<double, 3>& len,
                                       const std::array<int, 3>& explicit_counts) {
    if (explicit_counts[0] > 0 && explicit_counts[1] > 0 && explicit_counts[2] > 0)
        return explicit_counts;
    const double L = len[0] + len[1] + len[2];
    std::array<int, 3> n{};
    int used = 0;
    // equal split per region: the regions carry distinct length scales
    // (source width, membrane thickness, Debye screening), and weighting
    // by geometric length starves the innermost one
    (void)len;
    (void)L;
    for (int k = 0; k < 2; ++k) {
        n[k] = std::max(8, total / 3);
        used += n[k];
    }
    n[2] = std::max(8, total - used);
    return n;
}

double grade(double s, double grading) {
    if (grading == 1.0) return s;
    const double t = 2.0 * s - 1.0;
    return 0.5 * (1.0 + std::copysign(std::pow(std::abs(t), grading), t));
}

std::vector<double> build_nodes(const std::array<double, 4>& breaks,
                                const std::array<int, 3>& seg, double grading) {
    std::vector<double> r;
    r.reserve(seg[0] + seg[1] + seg[2] + 1);
    for (int k = 0; k < 3; ++k) {
        const int i0 = (k == 0) ? 0 : 1;
        for (int i = i0; i <= seg[k]; ++i) {
            const double s = grade(static_cast<double>(i) / seg[k], grading);
            r.push_back(breaks[k] + (breaks[k + 1] - breaks[k]) * s);
        }
        // interfaces land exactly on nodes
        r.back() = breaks[k + 1];
    }
    return r;
}

struct IonTerm {
    const PhysicalParams* p;
    bool linearized;
    double kappa2;
    double value(double phi) const {
        return linearized ? kappa2 * phi : b_prime(*p, phi);
    }
    double slope(double phi) const {
        return linearized ? kappa2 : b_second(*p, phi);
    }

private:
    static double b_prime(const PhysicalParams& pp, double phi) {
        return ::pbmem::b_prime(phi, pp);
    }
    static double b_second(const PhysicalParams& pp, double phi) {
        return ::pbmem::b_second(phi, pp);
    }
};

void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper, std::vector<double>& rhs) {
    const size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        const double m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Quadratic-fit derivative at x0 from (x0,f0), (x1,f1), (x2,f2).
double one_sided_deriv(double x0, double f0, double x1, double f1,
                       double x2, double f2) {
    return f0 * (1.0 / (x0 - x1) + 1.0 / (x0 - x2)) +
           f1 * (x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (x0 - x1) / ((x2 - x0) * (x2 - x1));
}

struct System {
    PotentialSolution sol;          // carries mesh + operator arrays
    bool dirichlet_left = false;    // planar: both ends
    double g_left = 0.0, g_right = 0.0;

    int n() const { return static_cast<int>(sol.r.size()); }

    double vol(double a, double b) const {
        return sol.spherical ? 4.0 * M_PI / 3.0 * (b * b * b - a * a * a) : b - a;
    }

    bool is_dirichlet(int i) const {
        return i == n() - 1 || (dirichlet_left && i == 0);
    }

    std::vector<double> residual(const std::vector<double>& phi, const IonTerm& ion,
                                 double rho_c, double rho_e) const {
        const int N = n();
        std::vector<double> R(N);
        const auto& g = sol.conductance;
        for (int i = 0; i < N; ++i) {
            if (is_dirichlet(i)) {
                R[i] = phi[i] - (i == 0 ? g_left : g_right);
                continue;
            }
            double r = sol.source[i] - ion.value(phi[i]) * sol.solvent_volume[i];
            if (i > 0) r -= g[i - 1] * (phi[i] - phi[i - 1]);
            if (i < N - 1) r += g[i] * (phi[i + 1] - phi[i]);
            if (i == sol.idx_c)
                r += sol.params.lipid_charge * rho_c * sol.face_area_c;
            if (i == sol.idx_e)
                r += sol.params.lipid_charge * rho_e * sol.face_area_e;
            R[i] = r;
        }
        return R;
    }

    double scaled_norm(const std::vector<double>& R, const std::vector<double>& phi,
                       const IonTerm& ion) const {
        const int N = n();
        double mx = 0.0;
        for (int i = 0; i < N; ++i) {
            double d = 1.0;
            if (!is_dirichlet(i)) {
                d = ion.slope(phi[i]) * sol.solvent_volume[i];
                if (i > 0) d += sol.conductance[i - 1];
                if (i < N - 1) d += sol.conductance[i];
            }
            mx = std::max(mx, std::abs(R[i]) / d);
        }
        return mx;
    }

    void newton(std::vector<double>& phi, const IonTerm& ion, double rho_c,
                double rho_e, const SolverOptions& opts) {
        const int N = n();
        std::vector<double> lower(N), diag(N), upper(N), rhs(N);
        std::vector<double> R = residual(phi, ion, rho_c, rho_e);
        double res = scaled_norm(R, phi, ion);
        sol.residual_history.clear();
        sol.residual_history.push_back(res);
        // the Jacobi-scaled residual alone is not mesh-robust: the diagonal
        // grows like 1/h, so correlated per-cell residuals can pass the
        // tolerance while their collective far-field response still moves
        // the potential; gate on the last accepted update as well
        double upd = std::numeric_limits<double>::infinity();
        int it = 0;
        while ((res > opts.newton_tol || upd > opts.newton_tol) &&
               it < opts.max_newton) {
            for (int i = 0; i < N; ++i) {
                if (is_dirichlet(i)) {
                    lower[i] = upper[i] = 0.0;
                    diag[i] = 1.0;
                    rhs[i] = -R[i];
                    continue;
                }
                double d = -ion.slope(phi[i]) * sol.solvent_volume[i];
                lower[i] = upper[i] = 0.0;
                if (i > 0) {
                    lower[i] = sol.conductance[i - 1];
                    d -= sol.conductance[i - 1];
                }
                if (i < N - 1) {
                    upper[i] = sol.conductance[i];
                    d -= sol.conductance[i];
                }
                diag[i] = d;
                rhs[i] = -R[i];
            }
            thomas_solve(lower, diag, upper, rhs);

            double step = 1.0;
            std::vector<double> trial(N);
            for (int ls = 0; ls < 40; ++ls) {
                for (int i = 0; i < N; ++i) trial[i] = phi[i] + step * rhs[i];
                std::vector<double> Rt;
                double rt;
                try {
                    Rt = residual(trial, ion, rho_c, rho_e);
                    rt = scaled_norm(Rt, trial, ion);
                } catch (const std::range_error&) {
                    step *= 0.5;
                    continue;
                }
                if (rt < res || step < 1e-8) {
                    phi.swap(trial);
                    R.swap(Rt);
                    res = rt;
                    upd = 0.0;
                    for (int i = 0; i < N; ++i)
                        upd = std::max(upd, std::abs(step * rhs[i]));
                    break;
                }
                step *= 0.5;
            }
            sol.residual_history.push_back(res);
            ++it;
        }
        sol.newton_iterations = it;
        sol.final_residual = res;
        if (res > opts.newton_tol)
            throw std::runtime_error(
                "Newton did not converge: scaled residual " + std::to_string(res) +
                " after " + std::to_string(it) + " iterations");
    }
};

// Lipid densities from the normalized Boltzmann closed form; in 1D each
// face carries a single potential value so the face integrals collapse.
void update_rho(const PhysicalParams& p, double phi_c, double phi_e,
                double area_c, double area_e, double& rho_c, double& rho_e) {
    if (p.shared_lipid_pool) {
        const double C = p.lipid_pool_c + p.lipid_pool_e;
        const double wc = lipid_weight(phi_c, p), we = lipid_weight(phi_e, p);
        const double Z = area_c * wc + area_e * we;
        rho_c = C * wc / Z;
        rho_e = C * we / Z;
    } else {
        rho_c = p.lipid_pool_c / area_c;
        rho_e = p.lipid_pool_e / area_e;
    }
}

PotentialSolution run_solver(System& sys, const SolverOptions& opts) {
    const PhysicalParams& p = sys.sol.params;
    IonTerm ion{&p, opts.linearized, debye_kappa_sq(p)};

    std::vector<double> phi(sys.n(), 0.0);
    if (sys.dirichlet_left) phi[0] = sys.g_left;
    phi[sys.n() - 1] = sys.g_right;

    double rho_c, rho_e;
    update_rho(p, 0.0, 0.0, sys.sol.face_area_c, sys.sol.face_area_e, rho_c, rho_e);

    int fp = 0;
    double delta = 0.0;
    for (; fp < opts.max_fp; ++fp) {
        sys.newton(phi, ion, rho_c, rho_e, opts);
        double nc, ne;
        update_rho(p, phi[sys.sol.idx_c], phi[sys.sol.idx_e], sys.sol.face_area_c,
                   sys.sol.face_area_e, nc, ne);
        delta = std::max(std::abs(nc - rho_c), std::abs(ne - rho_e));
        if (delta <= opts.fp_tol) break;
        rho_c += opts.fp_damping * (nc - rho_c);
        rho_e += opts.fp_damping * (ne - rho_e);
    }
    if (delta > opts.fp_tol)
        throw std::runtime_error("lipid fixed point stagnated: delta = " +
                                 std::to_string(delta));

    sys.sol.phi = std::move(phi);
    sys.sol.rho_c = rho_c;
    sys.sol.rho_e = rho_e;
    sys.sol.fixed_point_iterations = fp + 1;
    sys.sol.fixed_point_delta = delta;
    return std::move(sys.sol);
}

}  // namespace

void RadialGeometry::validate() const {
    if (!(0.0 < R_c && R_c < R_e && R_e < R_outer))
        throw std::invalid_argument("geometry requires 0 < R_c < R_e < R_outer");
    if (node_count < 24) throw std::invalid_argument("geometry.node_count too small");
}

std::array<int, 3> RadialGeometry::resolve_segments() const {
    return distribute_segments(node_count, {R_c, R_e - R_c, R_outer - R_e},
                               region_segments);
}

void PlanarGeometry::validate() const {
    if (!(0.0 < z_c && z_c < z_e && z_e < L))
        throw std::invalid_argument("geometry requires 0 < z_c < z_e < L");
    if (node_count < 24) throw std::invalid_argument("geometry.node_count too small");
}

std::array<int, 3> PlanarGeometry::resolve_segments() const {
    return distribute_segments(node_count, {z_c, z_e - z_c, L - z_e},
                               region_segments);
}

PotentialSolution solve_spherical(const PhysicalParams& params,
                                  const RadialGeometry& geom,
                                  const SourceCharge& source,
                                  const BoundaryData& bc,
                                  const SolverOptions& opts) {
    params.validate();
    geom.validate();
    source.validate();
    for (const auto& c : source.charges)
        if (c.center.norm() > 1e-12)
            throw std::invalid_argument("solve_spherical requires a centered source");

    System sys;
    PotentialSolution& s = sys.sol;
    s.params = params;
    s.spherical = true;
    const auto seg = geom.resolve_segments();
    s.r = build_nodes({0.0, geom.R_c, geom.R_e, geom.R_outer}, seg, geom.grading);
    const int N = static_cast<int>(s.r.size());
    s.idx_c = seg[0];
    s.idx_e = seg[0] + seg[1];
    if (std::abs(s.r[s.idx_c] - geom.R_c) > 1e-12 ||
        std::abs(s.r[s.idx_e] - geom.R_e) > 1e-12)
        throw std::runtime_error("mesh not fitted to the interfaces");

    s.cell_region.resize(N - 1);
    for (int i = 0; i < N - 1; ++i)
        s.cell_region[i] =
            (i >= s.idx_c && i < s.idx_e) ? kRegionMembrane : kRegionSolvent;

    s.conductance.resize(N - 1);
    for (int i = 0; i < N - 1; ++i) {
        const double eps =
            s.cell_region[i] == kRegionMembrane ? params.eps_m : params.eps_s;
        if (i < s.idx_c && s.r[i + 1] <= source.support_radius()) {
            // inside the source support the solution is even and regular
            // in r, so the midpoint-face conductance (exact for quadratic
            // profiles) beats the harmonic-exact form, whose relative
            // flux error for even profiles blows up as h^2/r^2 near 0
            const double rm = 0.5 * (s.r[i] + s.r[i + 1]);
            s.conductance[i] =
                4.0 * M_PI * eps * rm * rm / (s.r[i + 1] - s.r[i]);
        } else if (s.r[i] < 1e-300) {
            s.conductance[i] = 0.0;  // no flux into the origin node from outside
        } else {
            // exact for a + b/r between the nodes: reproduces piecewise
            // Coulomb solutions to roundoff outside the charge support
            s.conductance[i] = 4.0 * M_PI * eps / (1.0 / s.r[i] - 1.0 / s.r[i + 1]);
        }
    }
    // regularize the origin segment with the standard second-order flux
    if (s.r[0] < 1e-300 && s.conductance[0] == 0.0) {
        const double rm = 0.5 * (s.r[0] + s.r[1]);
        s.conductance[0] = params.eps_s * 4.0 * M_PI * rm * rm / (s.r[1] - s.r[0]);
    }

    s.solvent_volume.assign(N, 0.0);
    s.source.assign(N, 0.0);
    double prev_b = 0.0;
    for (int i = 0; i < N; ++i) {
        const double b = (i < N - 1) ? 0.5 * (s.r[i] + s.r[i + 1]) : s.r[i];
        if (i > 0 && s.cell_region[i - 1] == kRegionSolvent)
            s.solvent_volume[i] += sys.vol(prev_b, s.r[i]);
        if (i < N - 1 && s.cell_region[i] == kRegionSolvent)
            s.solvent_volume[i] += sys.vol(s.r[i], b);
        s.source[i] = source.enclosed_central(b) - source.enclosed_central(prev_b);
        prev_b = b;
    }

    s.face_area_c = 4.0 * M_PI * geom.R_c * geom.R_c;
    s.face_area_e = 4.0 * M_PI * geom.R_e * geom.R_e;
    sys.g_right = bc.g(Vec3(0.0, 0.0, geom.R_outer));

    return run_solver(sys, opts);
}

PotentialSolution solve_planar(const PhysicalParams& params,
                               const PlanarGeometry& geom, const BoundaryData& bc,
                               const SolverOptions& opts) {
    params.validate();
    geom.validate();

    System sys;
    PotentialSolution& s = sys.sol;
    s.params = params;
    s.spherical = false;
    const auto seg = geom.resolve_segments();
    s.r = build_nodes({0.0, geom.z_c, geom.z_e, geom.L}, seg, geom.grading);
    const int N = static_cast<int>(s.r.size());
    s.idx_c = seg[0];
    s.idx_e = seg[0] + seg[1];

    s.cell_region.resize(N - 1);
    for (int i = 0; i < N - 1; ++i)
        s.cell_region[i] =
            (i >= s.idx_c && i < s.idx_e) ? kRegionMembrane : kRegionSolvent;

    s.conductance.resize(N - 1);
    for (int i = 0; i < N - 1; ++i) {
        const double eps =
            s.cell_region[i] == kRegionMembrane ? params.eps_m : params.eps_s;
        s.conductance[i] = eps / (s.r[i + 1] - s.r[i]);
    }

    s.solvent_volume.assign(N, 0.0);
    s.source.assign(N, 0.0);
    for (int i = 0; i < N; ++i) {
        if (i > 0 && s.cell_region[i - 1] == kRegionSolvent)
            s.solvent_volume[i] += 0.5 * (s.r[i] - s.r[i - 1]);
        if (i < N - 1 && s.cell_region[i] == kRegionSolvent)
            s.solvent_volume[i] += 0.5 * (s.r[i + 1] - s.r[i]);
    }

    s.face_area_c = 1.0;
    s.face_area_e = 1.0;
    sys.dirichlet_left = true;
    sys.g_left = bc.g(Vec3(0.0, 0.0, 0.0));
    sys.g_right = bc.g(Vec3(0.0, 0.0, geom.L));

    return run_solver(sys, opts);
}

std::vector<double> discrete_residual(const PotentialSolution& sol,
                                      const std::vector<double>& phi) {
    System sys;
    sys.sol = sol;
    sys.dirichlet_left = !sol.spherical;
    sys.g_left = sol.phi.empty() ? 0.0 : sol.phi.front();
    sys.g_right = sol.phi.empty() ? 0.0 : sol.phi.back();
    IonTerm ion{&sol.params, false, debye_kappa_sq(sol.params)};
    auto R = sys.residual(phi, ion, sol.rho_c, sol.rho_e);
    if (sys.dirichlet_left) R.front() = 0.0;
    R.back() = 0.0;
    return R;
}

namespace {

struct Basis {
    // pair of (value, derivative) functions selected by kappa
    double kappa;
    bool solvent;  // spherical: uses screened / Coulomb radial basis
    double v1(double r) const {
        if (kappa == 0.0) return 1.0;
        return std::sinh(kappa * r) / r;
    }
    double d1(double r) const {
        if (kappa == 0.0) return 0.0;
        return (kappa * std::cosh(kappa * r) * r - std::sinh(kappa * r)) / (r * r);
    }
    double v2(double r) const {
        if (kappa == 0.0) return 1.0 / r;
        return std::exp(-kappa * r) / r;
    }
    double d2(double r) const {
        if (kappa == 0.0) return -1.0 / (r * r);
        return -std::exp(-kappa * r) * (kappa * r + 1.0) / (r * r);
    }
    double v3(double r) const {
        if (kappa == 0.0) return 1.0;
        return std::exp(kappa * r) / r;
    }
    double d3(double r) const {
        if (kappa == 0.0) return 0.0;
        return std::exp(kappa * r) * (kappa * r - 1.0) / (r * r);
    }
};

// Exact particular solution of eps_s (Laplacian - kappa^2) phi = -f for a
// centered Gaussian source of total charge q and width sigma:
//   phi_p(r) = q e^{k^2 s^2 / 2} / (8 pi eps_s r)
//              * [e^{-kr} erfc(a - u) - e^{+kr} erfc(a + u)]
// with a = k s / sqrt(2), u = r / (s sqrt(2)); reduces to
// q erf(u) / (4 pi eps_s r) when kappa = 0.
struct ScreenedGaussian {
    double value, deriv;
};

ScreenedGaussian screened_gaussian(double r, double q, double sigma,
                                   double kappa, double eps_s) {
    if (r < 1e-9) r = 1e-9;
    const double s2 = sigma * M_SQRT2;
    const double u = r / s2;
    if (kappa == 0.0) {
        const double pref = q / (4.0 * M_PI * eps_s);
        const double gauss = 2.0 / std::sqrt(M_PI) * std::exp(-u * u) / s2;
        return {pref * std::erf(u) / r,
                pref * (gauss / r - std::erf(u) / (r * r))};
    }
    const double a = kappa * sigma / M_SQRT2;
    const double A = q * std::exp(a * a) / (8.0 * M_PI * eps_s);
    const double t1 = std::exp(-kappa * r) * std::erfc(a - u);
    const double t2 = std::exp(kappa * r) * std::erfc(a + u);
    // the Gaussian parts of d(t1)/dr and -d(t2)/dr coincide:
    // exp(-+kr) exp(-(a-+u)^2) = exp(-a^2 - u^2)
    const double gauss =
        2.0 * (2.0 / std::sqrt(M_PI)) * std::exp(-a * a - u * u) / s2;
    const double dsum = -kappa * (t1 + t2) + gauss;
    return {A * (t1 - t2) / r, A * (dsum / r - (t1 - t2) / (r * r))};
}

ScreenedGaussian inner_particular(const SourceCharge& src, double r,
                                  double kappa, double eps_s) {
    ScreenedGaussian out{0.0, 0.0};
    for (const auto& c : src.charges) {
        auto g = screened_gaussian(r, c.magnitude, c.width, kappa, eps_s);
        out.value += g.value;
        out.deriv += g.deriv;
    }
    return out;
}

}  // namespace

double LinearizedSphericalSolution::eval(double r) const {
    Basis b{kappa, true};
    if (r <= R_c) {
        if (r < 1e-12) r = 1e-12;
        return coef[0] * b.v1(r) + coef[1] * b.v2(r) +
               inner_particular(source, r, kappa, eps_s).value;
    }
    if (r <= R_e) return coef[2] + coef[3] / r;
    if (kappa == 0.0) return coef[4] + coef[5] / r;
    return coef[4] * b.v2(r) + coef[5] * b.v3(r);
}

double LinearizedSphericalSolution::deriv(double r) const {
    Basis b{kappa, true};
    if (r <= R_c)
        return coef[0] * b.d1(r) + coef[1] * b.d2(r) +
               inner_particular(source, r, kappa, eps_s).deriv;
    if (r <= R_e) return -coef[3] / (r * r);
    if (kappa == 0.0) return -coef[5] / (r * r);
    return coef[4] * b.d2(r) + coef[5] * b.d3(r);
}

LinearizedSphericalSolution solve_linearized_spherical(
    const PhysicalParams& params, const RadialGeometry& geom,
    const SourceCharge& source, const BoundaryData& bc) {
    params.validate();
    geom.validate();
    if (params.shared_lipid_pool)
        throw std::invalid_argument("linearized oracle supports independent pools only");

    for (const auto& c : source.charges)
        if (c.center.norm() > 1e-12 || c.center.norm() + 8.0 * c.width > geom.R_c)
            throw std::invalid_argument(
                "linearized oracle requires a centered source supported inside R_c");

    LinearizedSphericalSolution L;
    L.kappa = std::sqrt(debye_kappa_sq(params) / params.eps_s);
    L.R_c = geom.R_c;
    L.R_e = geom.R_e;
    L.R_outer = geom.R_outer;
    L.source = source;
    L.eps_s = params.eps_s;
    Basis b{L.kappa, true};

    const double rho_c = params.lipid_pool_c / (4.0 * M_PI * geom.R_c * geom.R_c);
    const double rho_e = params.lipid_pool_e / (4.0 * M_PI * geom.R_e * geom.R_e);
    const double ql = params.lipid_charge;
    const double g_out = bc.g(Vec3(0.0, 0.0, geom.R_outer));

    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();

    // unknowns: c0 (inner regular), c1 (inner singular, zero since the
    // Gaussian particular solution already carries the source),
    // c2 + c3/r (membrane), c4, c5 (outer)
    M(0, 1) = 1.0;

    const double Rc = geom.R_c, Re = geom.R_e, Ro = geom.R_outer;
    const auto pc = inner_particular(source, Rc, L.kappa, params.eps_s);
    // continuity at R_c
    M(1, 0) = b.v1(Rc);
    M(1, 1) = b.v2(Rc);
    M(1, 2) = -1.0;
    M(1, 3) = -1.0 / Rc;
    rhs(1) = -pc.value;
    // flux jump at R_c: eps_s phi_s' - eps_m phi_m' = + rho_c q_l
    M(2, 0) = params.eps_s * b.d1(Rc);
    M(2, 1) = params.eps_s * b.d2(Rc);
    M(2, 3) = params.eps_m / (Rc * Rc);
    rhs(2) = rho_c * ql - params.eps_s * pc.deriv;
    // continuity at R_e
    M(3, 2) = 1.0;
    M(3, 3) = 1.0 / Re;
    if (L.kappa == 0.0) {
        M(3, 4) = -1.0;
        M(3, 5) = -1.0 / Re;
        M(4, 5) = -params.eps_s / (Re * Re);
        M(5, 4) = 1.0;
        M(5, 5) = 1.0 / Ro;
    } else {
        M(3, 4) = -b.v2(Re);
        M(3, 5) = -b.v3(Re);
        M(4, 4) = params.eps_s * b.d2(Re);
        M(4, 5) = params.eps_s * b.d3(Re);
        M(5, 4) = b.v2(Ro);
        M(5, 5) = b.v3(Ro);
    }
    // flux jump at R_e: eps_s phi_s' - eps_m phi_m' = - rho_e q_l
    if (L.kappa == 0.0) {
        // M(4,5) set above
    }
    M(4, 3) = params.eps_m / (Re * Re);
    rhs(4) = -rho_e * ql;
    rhs(5) = g_out;

    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(M);
    if (!lu.isInvertible())
        throw std::runtime_error("linearized matching system is singular");
    Eigen::Matrix<double, 6, 1> x = lu.solve(rhs);
    // pin the singular coefficient exactly: LU roundoff of O(1e-19) here
    // gets amplified by v2(r) = e^{-kr}/r near the origin
    x(1) = 0.0;
    for (int i = 0; i < 6; ++i) L.coef[i] = x(i);
    L.max_matching_residual = (M * x - rhs).cwiseAbs().maxCoeff();
    return L;
}

double LinearizedPlanarSolution::eval(double z) const {
    auto sv = [&](double c1, double c2, double zz) {
        if (kappa == 0.0) return c1 + c2 * zz;
        return c1 * std::exp(-kappa * zz) + c2 * std::exp(kappa * zz);
    };
    if (z <= z_c) return sv(coef[0], coef[1], z);
    if (z <= z_e) return coef[2] + coef[3] * z;
    return sv(coef[4], coef[5], z);
}

double LinearizedPlanarSolution::deriv(double z) const {
    auto sd = [&](double c1, double c2, double zz) {
        if (kappa == 0.0) return c2;
        return kappa * (-c1 * std::exp(-kappa * zz) + c2 * std::exp(kappa * zz));
    };
    if (z <= z_c) return sd(coef[0], coef[1], z);
    if (z <= z_e) return coef[3];
    return sd(coef[4], coef[5], z);
}

LinearizedPlanarSolution solve_linearized_planar(const PhysicalParams& params,
                                                 const PlanarGeometry& geom,
                                                 const BoundaryData& bc,
                                                 double rho_c, double rho_e) {
    params.validate();
    geom.validate();

    LinearizedPlanarSolution L;
    L.kappa = std::sqrt(debye_kappa_sq(params) / params.eps_s);
    L.z_c = geom.z_c;
    L.z_e = geom.z_e;
    L.L = geom.L;

    auto sv = [&](double zz, int which) {
        if (L.kappa == 0.0) return which == 0 ? 1.0 : zz;
        return which == 0 ? std::exp(-L.kappa * zz) : std::exp(L.kappa * zz);
    };
    auto sd = [&](double zz, int which) {
        if (L.kappa == 0.0) return which == 0 ? 0.0 : 1.0;
        return which == 0 ? -L.kappa * std::exp(-L.kappa * zz)
                          : L.kappa * std::exp(L.kappa * zz);
    };

    const double ql = params.lipid_charge;
    Eigen::Matrix<double, 6, 6> M = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();

    // phi(0) = g0
    M(0, 0) = sv(0.0, 0);
    M(0, 1) = sv(0.0, 1);
    rhs(0) = bc.g(Vec3(0, 0, 0));
    // continuity at z_c
    M(1, 0) = sv(geom.z_c, 0);
    M(1, 1) = sv(geom.z_c, 1);
    M(1, 2) = -1.0;
    M(1, 3) = -geom.z_c;
    // jump at z_c: eps_s phi_s'(z_c-) - eps_m phi_m' = rho_c q_l
    M(2, 0) = params.eps_s * sd(geom.z_c, 0);
    M(2, 1) = params.eps_s * sd(geom.z_c, 1);
    M(2, 3) = -params.eps_m;
    rhs(2) = rho_c * ql;
    // continuity at z_e
    M(3, 2) = 1.0;
    M(3, 3) = geom.z_e;
    M(3, 4) = -sv(geom.z_e, 0);
    M(3, 5) = -sv(geom.z_e, 1);
    // jump at z_e: eps_s phi_s'(z_e+) - eps_m phi_m' = -rho_e q_l
    M(4, 4) = params.eps_s * sd(geom.z_e, 0);
    M(4, 5) = params.eps_s * sd(geom.z_e, 1);
    M(4, 3) = -params.eps_m;
    rhs(4) = -rho_e * ql;
    // phi(L) = gL
    M(5, 4) = sv(geom.L, 0);
    M(5, 5) = sv(geom.L, 1);
    rhs(5) = bc.g(Vec3(0, 0, geom.L));

    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(M);
    if (!lu.isInvertible())
        throw std::runtime_error("linearized planar matching system is singular");
    Eigen::Matrix<double, 6, 1> x = lu.solve(rhs);
    for (int i = 0; i < 6; ++i) L.coef[i] = x(i);
    L.max_matching_residual = (M * x - rhs).cwiseAbs().maxCoeff();
    return L;
}

InterfaceTraces extract_traces(const PotentialSolution& sol, Face face) {
    const int i = sol.face_index(face);
    const int N = static_cast<int>(sol.r.size());
    if (i < 2 || i > N - 3)
        throw std::runtime_error("extract_traces: fewer than 3 nodes on one side");

    const auto& r = sol.r;
    const auto& f = sol.phi;
    const double dl =
        one_sided_deriv(r[i], f[i], r[i - 1], f[i - 1], r[i - 2], f[i - 2]);
    const double dr =
        one_sided_deriv(r[i], f[i], r[i + 1], f[i + 1], r[i + 2], f[i + 2]);

    InterfaceTraces tr;
    tr.phi = f[i];
    tr.rho = sol.face_rho(face);
    if (face == Face::cytosolic) {
        // solvent inside, n = -r_hat
        tr.grad_s_n = -dl;
        tr.grad_m_n = -dr;
    } else {
        // solvent outside, n = +r_hat
        tr.grad_s_n = dr;
        tr.grad_m_n = dl;
    }
    tr.jump_residual = sol.params.eps_s * tr.grad_s_n -
                       sol.params.eps_m * tr.grad_m_n +
                       sol.params.lipid_charge * tr.rho;
    return tr;
}

InterfaceTraces enforce_jump_condition(const InterfaceTraces& tr,
                                       const PhysicalParams& params) {
    InterfaceTraces out = tr;
    const double es = params.eps_s, em = params.eps_m;
    const double res = tr.jump_residual;
    const double denom = es * es + em * em;
    out.grad_s_n -= res * es / denom;
    out.grad_m_n += res * em / denom;
    out.jump_residual = es * out.grad_s_n - em * out.grad_m_n +
                        params.lipid_charge * out.rho;
    return out;
}

}  // namespace pbmem
