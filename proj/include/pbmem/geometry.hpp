#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pbmem/core.hpp"

// Parametric surfaces with quadrature, surface differential operators,
// curvature, and the deformation-map machinery (T_t = X + tV, volume and
// surface Jacobians, normal rate).
//
// Sign convention: H > 0 on a sphere with outward normal.

namespace pbmem {

struct SurfaceFrame {
    Vec3 r, r_u, r_v;
    Vec3 n;              // unit normal, oriented per surface flag
    double area_weight;  // |r_u x r_v|
    double H;            // mean curvature
    double K;            // Gaussian curvature
};

struct SurfaceMetric {
    double E, F, G;      // first fundamental form
    double inv_uu, inv_uv, inv_vv;  // contravariant metric a^{ij}
    double sqrt_a;       // area element
};

class ParametricSurface {
public:
    virtual ~ParametricSurface() = default;

    virtual Vec3 position(double u, double v) const = 0;
    virtual Vec3 d_u(double u, double v) const = 0;
    virtual Vec3 d_v(double u, double v) const = 0;
    virtual Vec3 d_uu(double u, double v) const = 0;
    virtual Vec3 d_uv(double u, double v) const = 0;
    virtual Vec3 d_vv(double u, double v) const = 0;

    double u0 = 0.0, u1 = 1.0, v0 = 0.0, v1 = 1.0;
    bool periodic_u = false, periodic_v = false;
    bool closed = false;
    bool flip_normal = false;  // flip so n points toward the solvent

    SurfaceFrame frame(double u, double v) const;
    SurfaceMetric metric(double u, double v) const;
};

std::unique_ptr<ParametricSurface> make_sphere(double radius, bool flip_normal = false);
std::unique_ptr<ParametricSurface> make_ellipsoid(double a, double b, double c);
std::unique_ptr<ParametricSurface> make_torus(double major, double minor);
std::unique_ptr<ParametricSurface> make_plane_patch(double lx, double ly);

/// Surface corpus lookup by name: "sphere", "ellipsoid", "torus", "plane".
std::unique_ptr<ParametricSurface> make_surface(const std::string& name);

// Tensor-product quadrature: Gauss-Legendre in non-periodic directions,
// midpoint (trapezoid on the torus) in periodic ones.  Nodes never touch
// chart poles.
struct SurfaceQuadrature {
    std::vector<double> u, wu;
    std::vector<double> v, wv;
};

SurfaceQuadrature surface_quadrature(const ParametricSurface& s, int nu, int nv);

/// Integral of integrand(u, v, frame) * area_weight over the chart.
double closed_surface_integral(
    const ParametricSurface& s, int nu, int nv,
    const std::function<double(double, double, const SurfaceFrame&)>& integrand);

/// Surface gradient of a chart scalar field: grad g - (grad g . n) n,
/// computed through the contravariant metric.  Chart partials of g are
/// taken by central differences with the given step.
Vec3 surface_gradient(const ParametricSurface& s,
                      const std::function<double(double, double)>& g,
                      double u, double v, double step = 1e-6);

struct VelocityField {
    std::function<Vec3(const Vec3&)> value;
    std::function<Mat3(const Vec3&)> jacobian;
    double support_distance = std::numeric_limits<double>::infinity();

    /// Wrap a field whose Jacobian is not available analytically;
    /// the Jacobian is formed by central differences with the given step.
    static VelocityField from_function(std::function<Vec3(const Vec3&)> f,
                                       double fd_step = 1e-6);

    static VelocityField radial();                      // V(x) = x
    static VelocityField translation(const Vec3& c);
    static VelocityField rotation(const Vec3& omega);   // V(x) = omega x x
    static VelocityField linear(const Mat3& A);         // V(x) = A x
};

struct TransformState {
    double t = 0.0;
    const VelocityField* velocity = nullptr;
};

/// Surface divergence of an ambient field at a surface point:
/// div F - n . (grad F) n.
double surface_divergence(const VelocityField& f, const SurfaceFrame& fr);

struct VolumeJacobian {
    double J_t;
    double dJ_t_dt;
};

/// J_t = det(I + t grad V) and its rate dJ_t/dt = J_t (div V) o T_t.
VolumeJacobian volume_jacobian(const TransformState& st, const Vec3& X);

struct TransformTensor {
    Mat3 A_t;       // J_t (grad T_t)^-1 (grad T_t)^-T
    Mat3 A_prime0;  // (div V) I - grad V - (grad V)^T
};

TransformTensor transform_tensor(const TransformState& st, const Vec3& X);

/// J_s = det(grad T_t) |grad T_t^-T n| at the chart point.
double surface_jacobian(const TransformState& st, const SurfaceFrame& fr);

/// dJ_s/dt at t = 0, i.e. the surface divergence of V at the node.
double surface_jacobian_rate0(const VelocityField& f, const SurfaceFrame& fr);

/// dn/dt at t = 0: (R - n (n.R)) / |r_u x r_v| with
/// R = (grad V r_u) x r_v + r_u x (grad V r_v).
Vec3 normal_rate0(const ParametricSurface& s, const VelocityField& f,
                  double u, double v);

}  // namespace pbmem
