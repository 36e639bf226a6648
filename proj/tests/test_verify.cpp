#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pbmem/verify.hpp"

using namespace pbmem;

TEST_CASE("check bookkeeping") {
    auto c = make_check("x", 1.0 + 5e-7, 1.0, 1e-6);
    CHECK(c.pass);
    CHECK(c.abs_error == doctest::Approx(5e-7));
    CHECK_FALSE(make_check("y", 2.0, 1.0, 0.5).pass);
    VerificationReport r;
    r.checks = {c};
    CHECK(r.all_pass());
    r.checks.push_back(make_check("y", 2.0, 1.0, 0.5));
    CHECK_FALSE(r.all_pass());
}

TEST_CASE("surface Jacobian rate identity over the corpus") {
    for (const auto& c : geometry_corpus()) {
        const double err =
            check_jacobian_rate(*c.surface, c.velocity, 1e-5, 64, 64);
        INFO("pair ", c.name);
        CHECK(err < 1e-6);
    }
}

TEST_CASE("divergence-curvature identity") {
    auto sph = make_sphere(1.0);
    // tangential rotation field: both sides vanish
    auto l1 = lemma_diagnostic(*sph, VelocityField::rotation(Vec3(0, 0, 1)),
                               96, 96);
    CHECK(std::abs(l1.divergence_integral) < 1e-8);
    CHECK(std::abs(l1.curvature_integral) < 1e-8);
    // F(x) = x on the unit sphere: div_s x = 2, 2H (x.n) = 2, both 8 pi
    auto l2 = lemma_diagnostic(*sph, VelocityField::radial(), 96, 96);
    CHECK(l2.divergence_integral == doctest::Approx(8 * M_PI).epsilon(1e-10));
    CHECK(l2.curvature_integral == doctest::Approx(8 * M_PI).epsilon(1e-10));
    // localized bump on a torus: the two integrals agree
    auto tor = make_torus(2.0, 0.7);
    auto bump = VelocityField::from_function([](const Vec3& x) {
        const Vec3 d = x - Vec3(2.5, 0, 0.4);
        return Vec3(std::exp(-0.5 * d.squaredNorm()) * Vec3(0.3, 0.2, 0.5));
    });
    auto l3 = lemma_diagnostic(*tor, bump, 192, 192);
    CHECK(l3.divergence_integral ==
          doctest::Approx(l3.curvature_integral).epsilon(1e-8));
}

TEST_CASE("weak-form residual vanishes at the solution only") {
    auto sol = solve_spherical(ref::params(), ref::radial(2048), ref::source(),
                               ref::zero_bc());
    CHECK(check_weak_form(sol, 20, 42) < 1e-8);
    // a perturbed field must excite the residual
    auto wrong = sol.phi;
    for (auto& v : wrong) v *= 1.05;
    CHECK(check_weak_form(sol, 20, 42, &wrong) > 1e-8);
}

TEST_CASE("solution maximizes G over seeded perturbations") {
    auto sol = solve_spherical(ref::params(), ref::radial(2048), ref::source(),
                               ref::zero_bc());
    CHECK(check_maximizer(sol, 20, 43, 1e-3) <= 1e-14);
}

TEST_CASE("finite-difference shape derivative converges to the formula") {
    auto v = [](double) { return 1.0; };  // uniform radial motion
    auto coarse = fd_shape_derivative(ref::params(), ref::radial(1024),
                                      ref::source(), ref::zero_bc(), v, 1e-3);
    auto fine = fd_shape_derivative(ref::params(), ref::radial(4096),
                                    ref::source(), ref::zero_bc(), v, 1e-3);
    CHECK(fine.rel_discrepancy < 1e-2);
    CHECK(fine.rel_discrepancy < coarse.rel_discrepancy);
}
