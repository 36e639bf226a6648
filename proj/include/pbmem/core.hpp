#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Physical parameters, the ionic energy function B and its derivatives,
// and configuration validation shared by all solvers.
//
// Unit convention: every formula is evaluated in reduced (nondimensional)
// units exactly as written; the configuration supplies reduced numbers
// directly.  reduced_ion_concentration() is the one documented boundary
// for converting lab units.

namespace pbmem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct IonSpecies {
    double charge = 0.0;              // q_j, elementary-charge units
    double bulk_concentration = 0.0;  // c_j^inf, number density, reduced
};

enum class GammaKind { boltzmann, custom };

/// User-supplied gamma family: gamma and its derivative gamma'.
struct GammaFunctions {
    std::function<double(double)> gamma;
    std::function<double(double)> gamma_prime;
};

struct PhysicalParams {
    double beta = 1.0;  // inverse thermal energy
    double eps_s = 80.0;
    double eps_m = 2.0;
    double eps_p = 1.0;
    std::vector<IonSpecies> ions;
    double lipid_charge = 0.0;  // q_l, elementary-charge units
    double lipid_pool_c = 0.0;  // C on the cytosolic face
    double lipid_pool_e = 0.0;  // C on the exoplasmic face
    bool shared_lipid_pool = false;
    GammaKind gamma_kind = GammaKind::boltzmann;
    std::optional<GammaFunctions> custom_gamma;
    double diffusion = 1.0;  // D, surface diffusion coefficient

    void validate() const;
};

struct SourceCharge {
    struct Gaussian {
        Vec3 center = Vec3::Zero();
        double magnitude = 0.0;
        double width = 0.5;  // Gaussian spread, length units
    };
    std::vector<Gaussian> charges;

    void validate() const;

    /// Charge density at x: sum of normalized Gaussians.
    double density(const Vec3& x) const;

    /// Total charge enclosed in the centered ball of radius r.
    /// Valid only when every charge sits at the origin.
    double enclosed_central(double r) const;

    double total() const;

    /// Effective support radius around the charge centers
    /// (density below ~1e-16 of peak outside).
    double support_radius() const;
};

struct BoundaryData {
    std::function<double(const Vec3&)> g = [](const Vec3&) { return 0.0; };
};

/// B(phi) = beta^-1 sum_j c_j (e^{-beta q_j phi} - 1).  Zero species -> 0.
double b_energy(double phi, const PhysicalParams& p);

/// B'(phi) = -sum_j c_j q_j e^{-beta q_j phi}.
double b_prime(double phi, const PhysicalParams& p);

/// B''(phi) = beta sum_j c_j q_j^2 e^{-beta q_j phi}.
double b_second(double phi, const PhysicalParams& p);

/// B''(0) = beta sum_j c_j q_j^2; divide by eps_s for kappa^2.
double debye_kappa_sq(const PhysicalParams& p);

/// Boltzmann weight exp(-q_l beta phi) used by the lipid density.
double lipid_weight(double phi, const PhysicalParams& p);

/// Convert molar concentration to a reduced number density for a given
/// length unit in nanometers: 1 M = 0.602214076 nm^-3.
double reduced_ion_concentration(double molar, double length_unit_nm);

}  // namespace pbmem
