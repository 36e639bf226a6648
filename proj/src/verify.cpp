#include "pbmem/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pbmem {

CheckResult make_check(const std::string& name, double value, double reference,
                       double tolerance) {
    CheckResult c;
    c.name = name;
    c.value = value;
    c.reference = reference;
    c.tolerance = tolerance;
    c.abs_error = std::abs(value - reference);
    c.rel_error = reference != 0.0 ? c.abs_error / std::abs(reference)
                                   : c.abs_error;
    c.pass = c.abs_error <= tolerance;
    return c;
}

bool VerificationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.pass; });
}

ShapeDerivativeCheck fd_shape_derivative(
    const PhysicalParams& params, const RadialGeometry& geom,
    const SourceCharge& source, const BoundaryData& bc,
    const std::function<double(double)>& v_radial, double tau,
    const SolverOptions& opts) {
    RadialGeometry base = geom;
    base.region_segments = geom.resolve_segments();

    auto energy_at = [&](double t) {
        RadialGeometry g = base;
        g.R_c = base.R_c + t * v_radial(base.R_c);
        g.R_e = base.R_e + t * v_radial(base.R_e);
        g.validate();
        return electrostatic_energy(solve_spherical(params, g, source, bc, opts))
            .G;
    };

    ShapeDerivativeCheck out;
    if (tau > 0.0)
        out.fd_value = (energy_at(tau) - energy_at(-tau)) / (2.0 * tau);

    const PotentialSolution sol = solve_spherical(params, base, source, bc, opts);
    const auto tc =
        enforce_jump_condition(extract_traces(sol, Face::cytosolic), params);
    const auto te =
        enforce_jump_condition(extract_traces(sol, Face::exoplasmic), params);
    // n points into the solvent: -r_hat on the cytosolic face, +r_hat on
    // the exoplasmic face, so V.n = -v(R_c) and +v(R_e).
    out.formula_value =
        -force_sd(params, tc) * (-v_radial(base.R_c)) * sol.face_area_c -
        force_sd(params, te) * (+v_radial(base.R_e)) * sol.face_area_e;

    out.abs_discrepancy = std::abs(out.fd_value - out.formula_value);
    const double scale = std::max(std::abs(out.fd_value), 1e-300);
    out.rel_discrepancy = out.abs_discrepancy / scale;
    return out;
}

double check_jacobian_rate(const ParametricSurface& s, const VelocityField& v,
                        double tau, int nu, int nv) {
    const SurfaceQuadrature q = surface_quadrature(s, nu, nv);
    double worst = 0.0;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const SurfaceFrame fr = s.frame(q.u[i], q.v[j]);
            const TransformState plus{tau, &v}, minus{-tau, &v};
            const double fd =
                (surface_jacobian(plus, fr) - surface_jacobian(minus, fr)) /
                (2.0 * tau);
            worst = std::max(worst, std::abs(fd - surface_divergence(v, fr)));
        }
    return worst;
}

LemmaDiagnostic lemma_diagnostic(const ParametricSurface& s,
                                 const VelocityField& f, int nu, int nv) {
    LemmaDiagnostic d;
    d.divergence_integral = closed_surface_integral(
        s, nu, nv, [&](double, double, const SurfaceFrame& fr) {
            return surface_divergence(f, fr);
        });
    d.curvature_integral = closed_surface_integral(
        s, nu, nv, [&](double, double, const SurfaceFrame& fr) {
            return 2.0 * fr.H * f.value(fr.r).dot(fr.n);
        });
    return d;
}

double check_mst_equivalence(const PotentialSolution& sol) {
    double worst = 0.0;
    for (Face face : {Face::cytosolic, Face::exoplasmic}) {
        const auto tr =
            enforce_jump_condition(extract_traces(sol, face), sol.params);
        const double fp = force_sd(sol.params, tr);
        const double fm = force_mst(sol.params, tr);
        const double fa = force_alt(sol.params, tr);
        const double denom = 1.0 + std::abs(fm);
        worst = std::max(worst, std::abs(fp - fm) / denom);
        worst = std::max(worst, std::abs(fp - fa) / denom);
    }
    return worst;
}

namespace {

// cubic B-spline kernel, support |x| < 2
double bspline3(double x) {
    x = std::abs(x);
    if (x >= 2.0) return 0.0;
    if (x >= 1.0) {
        const double t = 2.0 - x;
        return t * t * t / 6.0;
    }
    return (4.0 - 6.0 * x * x + 3.0 * x * x * x) / 6.0;
}

std::vector<double> seeded_bump(const PotentialSolution& sol, std::mt19937& rng) {
    const int N = static_cast<int>(sol.r.size());
    std::uniform_int_distribution<int> w_dist(4, 16);
    std::uniform_int_distribution<int> c_dist(0, N - 1);
    for (;;) {
        const int w = w_dist(rng);
        const int c = c_dist(rng);
        const int lo = c - 2 * w, hi = c + 2 * w;
        // keep the support >= 2 cells away from interfaces and boundaries
        auto clear = [&](int k) { return lo > k + 2 || hi < k - 2; };
        if (lo < 2 || hi > N - 3) continue;
        if (!clear(sol.idx_c) || !clear(sol.idx_e)) continue;
        std::vector<double> t(N, 0.0);
        for (int i = std::max(0, lo); i <= std::min(N - 1, hi); ++i)
            t[i] = bspline3(static_cast<double>(i - c) / w);
        return t;
    }
}

}  // namespace

double check_weak_form(const PotentialSolution& sol, int n_tests, unsigned seed,
                       const std::vector<double>* phi) {
    const std::vector<double>& field = phi ? *phi : sol.phi;
    const std::vector<double> R = discrete_residual(sol, field);
    const int N = static_cast<int>(sol.r.size());

    // diagonal scales of the discrete operator
    std::vector<double> diag(N, 1.0);
    for (int i = 0; i < N; ++i) {
        double d = b_second(field[i], sol.params) * sol.solvent_volume[i];
        if (i > 0) d += sol.conductance[i - 1];
        if (i < N - 1) d += sol.conductance[i];
        diag[i] = d;
    }

    std::mt19937 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < n_tests; ++k) {
        const std::vector<double> t = seeded_bump(sol, rng);
        double acc = 0.0, norm = 0.0;
        for (int i = 0; i < N; ++i) {
            acc += (R[i] / diag[i]) * t[i];
            norm += std::abs(t[i]);
        }
        worst = std::max(worst, std::abs(acc) / norm);
    }
    return worst;
}

double check_maximizer(const PotentialSolution& sol, int n, unsigned seed,
                       double scale) {
    const double G0 = energy_at_field(sol, sol.phi);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    double worst = -1e300;
    for (int k = 0; k < n; ++k) {
        const std::vector<double> t = seeded_bump(sol, rng);
        const double a = scale * amp(rng);
        std::vector<double> phi = sol.phi;
        for (size_t i = 0; i < phi.size(); ++i) phi[i] += a * t[i];
        worst = std::max(worst, energy_at_field(sol, phi) - G0);
    }
    return worst;
}

std::vector<CorpusPair> geometry_corpus() {
    std::vector<CorpusPair> corpus;

    auto add = [&](const std::string& name,
                   std::unique_ptr<ParametricSurface> s, VelocityField v) {
        corpus.push_back({name, std::shared_ptr<const ParametricSurface>(
                                    std::move(s)),
                          std::move(v)});
    };

    add("sphere_radial", make_sphere(1.0), VelocityField::radial());
    add("sphere_translation", make_sphere(1.0),
        VelocityField::translation(Vec3(0.3, -0.2, 0.5)));
    add("sphere_rotation", make_sphere(1.0),
        VelocityField::rotation(Vec3(0.1, 0.7, -0.4)));

    Mat3 shear;
    shear << 0.0, 0.3, 0.0,  //
        0.0, 0.0, -0.2,      //
        0.1, 0.0, 0.0;
    add("ellipsoid_shear", make_ellipsoid(1.0, 1.5, 0.8),
        VelocityField::linear(shear));

    const Vec3 x0(2.5, 0.0, 0.4);
    const Vec3 dir(0.3, 0.2, 0.5);
    add("torus_normal_bump", make_torus(2.0, 0.7),
        VelocityField::from_function([x0, dir](const Vec3& x) {
            const Vec3 d = x - x0;
            return Vec3(std::exp(-0.5 * d.squaredNorm()) * dir);
        }));
    return corpus;
}

}  // namespace pbmem
