#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pbmem/energy.hpp"

using namespace pbmem;

TEST_CASE("free-energy breakdown at the reference solution") {
    auto sol = solve_spherical(ref::params(), ref::radial(), ref::source(),
                               ref::zero_bc());
    BendingParams bp{1.0, 0.5, 0.0};
    auto e = total_energy(sol, bp, 64, 64);
    CHECK(e.G == doctest::Approx(0.037967163541648863).epsilon(1e-10));
    CHECK(e.field_term ==
          doctest::Approx(-0.034713572953350591).epsilon(1e-9));
    CHECK(e.source_term ==
          doctest::Approx(0.098920935843455432).epsilon(1e-9));
    CHECK(e.ionic_term ==
          doctest::Approx(-0.003253531242824419).epsilon(1e-9));
    CHECK(e.surface_entropy_c ==
          doctest::Approx(-0.025297052117385463).epsilon(1e-9));
    CHECK(e.surface_entropy_e ==
          doctest::Approx(0.0023103840117538999).epsilon(1e-9));
    CHECK(e.G == doctest::Approx(e.field_term + e.source_term + e.ionic_term +
                                 e.surface_entropy_c + e.surface_entropy_e)
                     .epsilon(1e-13));
    // each sphere contributes 8 pi K_C + 4 pi K_G, independent of radius
    CHECK(e.bending_c == doctest::Approx(10 * M_PI).epsilon(1e-10));
    CHECK(e.Pi == doctest::Approx(e.G + 20 * M_PI).epsilon(1e-12));
}

TEST_CASE("solved potential maximizes the discrete functional") {
    auto sol = solve_spherical(ref::params(), ref::radial(1024), ref::source(),
                               ref::zero_bc());
    const double G0 = energy_at_field(sol, sol.phi);
    auto perturbed = sol.phi;
    // interior bump away from interfaces and boundary
    for (std::size_t i = 5; i + 5 < perturbed.size(); i += 97)
        perturbed[i] += 1e-4;
    CHECK(energy_at_field(sol, perturbed) <= G0 + 1e-14);
    for (auto& v : perturbed) v = 0.0;
    CHECK(energy_at_field(sol, perturbed) <= G0);
}

TEST_CASE("bending energy on spheres and tori") {
    auto sph = make_sphere(1.9);
    // Helfrich sphere, C0 = 0: 8 pi K_C + 4 pi K_G for any radius
    CHECK(bending_energy(*sph, 1.0, 1.0, 0.0, 96, 96) ==
          doctest::Approx(12 * M_PI).epsilon(1e-10));
    CHECK(bending_energy(*sph, 2.0, 0.3, 0.0, 96, 96) ==
          doctest::Approx(16 * M_PI + 1.2 * M_PI).epsilon(1e-10));
    // spontaneous curvature C0 = 2/R kills the K_C term
    CHECK(bending_energy(*sph, 5.0, 0.0, 2.0 / 1.9, 96, 96) ==
          doctest::Approx(0.0).epsilon(1e-10));
    // torus: Gaussian term vanishes by Gauss-Bonnet
    CHECK(std::abs(bending_energy(*make_torus(2.0, 0.7), 0.0, 1.0, 0.0, 96,
                                  96)) < 1e-10);
}

TEST_CASE("entropy sign follows the density contrast") {
    // the cytosolic face sits at positive potential, so w = e^{phi} > 1
    // (q_l = -1) and the entropy term -C/beta ln(avg w) is negative
    auto sol = solve_spherical(ref::params(), ref::radial(1024), ref::source(),
                               ref::zero_bc());
    auto e = electrostatic_energy(sol);
    CHECK(e.surface_entropy_c < 0.0);
    CHECK(e.surface_entropy_e > 0.0);  // negative phi side
}
