#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pbmem/solver1d.hpp"

using namespace pbmem;

namespace {

double linf_vs_oracle(const PotentialSolution& sol,
                      const LinearizedSphericalSolution& ora) {
    double err = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        err = std::max(err, std::abs(sol.phi[i] - ora.eval(sol.r[i])));
    return err;
}

}  // namespace

TEST_CASE("linearized spherical solver against the closed form") {
    auto p = ref::params();
    auto src = ref::source();
    auto bc = ref::zero_bc();
    SolverOptions lin;
    lin.linearized = true;

    auto ora = solve_linearized_spherical(p, ref::radial(), src, bc);
    CHECK(ora.max_matching_residual < 1e-12);
    CHECK(ora.kappa == doctest::Approx(std::sqrt(0.025)).epsilon(1e-14));

    // closed-form samples pinned against an independent evaluation
    CHECK(ora.eval(1.5) ==
          doctest::Approx(0.0091879875827705973).epsilon(1e-12));
    CHECK(ora.eval(2.5) ==
          doctest::Approx(0.0030264036840742456).epsilon(1e-12));
    CHECK(ora.eval(4.0) ==
          doctest::Approx(-0.00036376194735386711).epsilon(1e-12));

    auto fine = solve_spherical(p, ref::radial(4096), src, bc, lin);
    auto coarse = solve_spherical(p, ref::radial(2048), src, bc, lin);
    double phimax = 0.0;
    for (double v : fine.phi) phimax = std::max(phimax, std::abs(v));

    const double e_fine = linf_vs_oracle(fine, ora);
    const double e_coarse = linf_vs_oracle(coarse, ora);
    CHECK(e_fine / phimax < 1e-6);
    CHECK(std::log2(e_coarse / e_fine) > 1.9);  // second order
    CHECK(fine.final_residual < 1e-12);
}

TEST_CASE("linearized planar solver against the closed form") {
    auto p = ref::params();
    PlanarGeometry g;
    g.node_count = 4096;
    BoundaryData bc{[](const Vec3& x) { return x.z() < 15.0 ? 0.05 : -0.02; }};
    SolverOptions lin;
    lin.linearized = true;
    auto sol = solve_planar(p, g, bc, lin);
    auto ora = solve_linearized_planar(p, g, bc, sol.rho_c, sol.rho_e);
    CHECK(ora.max_matching_residual < 1e-12);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        err = std::max(err, std::abs(sol.phi[i] - ora.eval(sol.r[i])));
    CHECK(err < 1e-6);
}

TEST_CASE("nonlinear reference solution is reproducible") {
    auto sol = solve_spherical(ref::params(), ref::radial(), ref::source(),
                               ref::zero_bc());
    CHECK(sol.final_residual < 1e-12);
    CHECK(sol.rho_c == doctest::Approx(0.059683103659460751).epsilon(1e-10));
    CHECK(sol.rho_e == doctest::Approx(0.035367765131532301).epsilon(1e-10));
    CHECK(sol.phi[sol.idx_c] ==
          doctest::Approx(0.0084323507057951896).epsilon(1e-10));
    // each face conserves its own pool: rho * area = C
    CHECK(sol.rho_c * sol.face_area_c == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(sol.rho_e * sol.face_area_e == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("shared lipid pool conserves the joint total") {
    auto p = ref::params();
    p.shared_lipid_pool = true;
    p.lipid_pool_c = 7.0;
    p.lipid_pool_e = 0.0;
    auto sol = solve_spherical(p, ref::radial(), ref::source(), ref::zero_bc());
    CHECK(sol.rho_c * sol.face_area_c + sol.rho_e * sol.face_area_e ==
          doctest::Approx(7.0).epsilon(1e-12));
    CHECK(sol.rho_c == doctest::Approx(0.04323097644806663).epsilon(1e-9));
    CHECK(sol.rho_e == doctest::Approx(0.042679821669929695).epsilon(1e-9));
    // equal Boltzmann weights would split by area; the cytosolic face is
    // at higher potential with q_l < 0, so it holds more than C A_c/(A_c+A_e)
    CHECK(sol.rho_c > 7.0 / (sol.face_area_c + sol.face_area_e));
}

TEST_CASE("interface traces satisfy the flux jump") {
    auto p = ref::params();
    auto sol = solve_spherical(p, ref::radial(), ref::source(), ref::zero_bc());
    for (Face f : {Face::cytosolic, Face::exoplasmic}) {
        auto tr = extract_traces(sol, f);
        // eps_s g_s - eps_m g_m + q_l rho -> 0 with mesh refinement;
        // at N=4096 the defect is a small fraction of the larger flux
        const double scale = std::max(std::abs(p.eps_s * tr.grad_s_n),
                                      std::abs(p.eps_m * tr.grad_m_n));
        CHECK(std::abs(tr.jump_residual) < 1e-3 * scale + 1e-12);
        auto en = enforce_jump_condition(tr, p);
        CHECK(std::abs(en.jump_residual) < 1e-15);
        CHECK(en.phi == tr.phi);
        CHECK(en.rho == tr.rho);
    }
}

TEST_CASE("Dirichlet data is honored at the outer boundary") {
    auto p = ref::params();
    BoundaryData bc{[](const Vec3&) { return 0.013; }};
    auto sol = solve_spherical(p, ref::radial(1024), ref::source(), bc);
    CHECK(sol.phi.back() == doctest::Approx(0.013).epsilon(1e-14));
}

TEST_CASE("geometry validation") {
    RadialGeometry g;
    g.R_c = 3.0;
    g.R_e = 2.0;  // inverted
    CHECK_THROWS(g.validate());
    PlanarGeometry pg;
    pg.z_c = 20.0;
    pg.z_e = 10.0;
    CHECK_THROWS(pg.validate());
    CHECK_NOTHROW(ref::radial().validate());
}
