#include "pbmem/core.hpp"

namespace pbmem {

void PhysicalParams::validate() const {
    if (beta <= 0.0) throw std::invalid_argument("physics.beta must be > 0");
    if (eps_s <= 0.0) throw std::invalid_argument("physics.eps_s must be > 0");
    if (eps_m <= 0.0) throw std::invalid_argument("physics.eps_m must be > 0");
    if (eps_p <= 0.0) throw std::invalid_argument("physics.eps_p must be > 0");
    if (diffusion < 0.0) throw std::invalid_argument("physics.diffusion must be >= 0");
    if (lipid_pool_c < 0.0) throw std::invalid_argument("physics.lipid_pool_c must be >= 0");
    if (lipid_pool_e < 0.0) throw std::invalid_argument("physics.lipid_pool_e must be >= 0");
    for (size_t j = 0; j < ions.size(); ++j) {
        if (ions[j].bulk_concentration < 0.0)
            throw std::invalid_argument("physics.ions[" + std::to_string(j) +
                                        "].bulk_concentration must be >= 0");
    }
    if (gamma_kind == GammaKind::custom && !custom_gamma)
        throw std::invalid_argument("physics.gamma_kind=custom requires gamma functions");
}

void SourceCharge::validate() const {
    for (size_t i = 0; i < charges.size(); ++i) {
        if (charges[i].width <= 0.0)
            throw std::invalid_argument("source.charges[" + std::to_string(i) +
                                        "].width must be > 0");
    }
}

double SourceCharge::density(const Vec3& x) const {
    double f = 0.0;
    for (const auto& c : charges) {
        const double s2 = c.width * c.width;
        const double r2 = (x - c.center).squaredNorm();
        f += c.magnitude * std::exp(-r2 / (2.0 * s2)) /
             (std::pow(2.0 * M_PI * s2, 1.5));
    }
    return f;
}

double SourceCharge::enclosed_central(double r) const {
    double q = 0.0;
    for (const auto& c : charges) {
        if (c.center.norm() > 1e-12)
            throw std::invalid_argument("enclosed_central requires centered charges");
        const double a = r / (std::sqrt(2.0) * c.width);
        q += c.magnitude *
             (std::erf(a) - 2.0 / std::sqrt(M_PI) * a * std::exp(-a * a));
    }
    return q;
}

double SourceCharge::total() const {
    double q = 0.0;
    for (const auto& c : charges) q += c.magnitude;
    return q;
}

double SourceCharge::support_radius() const {
    double rmax = 0.0;
    for (const auto& c : charges)
        rmax = std::max(rmax, c.center.norm() + 9.0 * c.width);
    return rmax;
}

double b_energy(double phi, const PhysicalParams& p) {
    double b = 0.0;
    for (size_t j = 0; j < p.ions.size(); ++j) {
        const auto& ion = p.ions[j];
        const double a = -p.beta * ion.charge * phi;
        if (a > 700.0)
            throw std::range_error("b_energy: exponent overflow for ion species " +
                                   std::to_string(j));
        b += ion.bulk_concentration * (std::exp(a) - 1.0);
    }
    return b / p.beta;
}

double b_prime(double phi, const PhysicalParams& p) {
    double b = 0.0;
    for (size_t j = 0; j < p.ions.size(); ++j) {
        const auto& ion = p.ions[j];
        const double a = -p.beta * ion.charge * phi;
        if (a > 700.0)
            throw std::range_error("b_prime: exponent overflow for ion species " +
                                   std::to_string(j));
        b -= ion.bulk_concentration * ion.charge * std::exp(a);
    }
    return b;
}

double b_second(double phi, const PhysicalParams& p) {
    double b = 0.0;
    for (size_t j = 0; j < p.ions.size(); ++j) {
        const auto& ion = p.ions[j];
        const double a = -p.beta * ion.charge * phi;
        if (a > 700.0)
            throw std::range_error("b_second: exponent overflow for ion species " +
                                   std::to_string(j));
        b += ion.bulk_concentration * ion.charge * ion.charge * std::exp(a);
    }
    return p.beta * b;
}

double debye_kappa_sq(const PhysicalParams& p) {
    double s = 0.0;
    for (const auto& ion : p.ions)
        s += ion.bulk_concentration * ion.charge * ion.charge;
    return p.beta * s;
}

double lipid_weight(double phi, const PhysicalParams& p) {
    return std::exp(-p.lipid_charge * p.beta * phi);
}

double reduced_ion_concentration(double molar, double length_unit_nm) {
    const double per_nm3 = 0.602214076 * molar;
    return per_nm3 * length_unit_nm * length_unit_nm * length_unit_nm;
}

}  // namespace pbmem
