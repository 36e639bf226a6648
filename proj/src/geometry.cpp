#include "pbmem/geometry.hpp"

#include <cmath>

namespace pbmem {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on the recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

void line_rule(double a, double b, int n, bool periodic,
               std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    if (periodic) {
        // midpoint = trapezoid on a periodic chart; spectrally accurate
        const double h = (b - a) / n;
        for (int i = 0; i < n; ++i) {
            x[i] = a + (i + 0.5) * h;
            w[i] = h;
        }
    } else {
        std::vector<double> xi, wi;
        gauss_legendre(n, xi, wi);
        for (int i = 0; i < n; ++i) {
            x[i] = 0.5 * (a + b) + 0.5 * (b - a) * xi[i];
            w[i] = 0.5 * (b - a) * wi[i];
        }
    }
}

}  // namespace

SurfaceFrame ParametricSurface::frame(double u, double v) const {
    SurfaceFrame f;
    f.r = position(u, v);
    f.r_u = d_u(u, v);
    f.r_v = d_v(u, v);
    const Vec3 raw = f.r_u.cross(f.r_v);
    f.area_weight = raw.norm();
    if (f.area_weight < 1e-12)
        throw std::domain_error("degenerate surface metric at (u,v)");
    const double sign = flip_normal ? -1.0 : 1.0;
    f.n = sign * raw / f.area_weight;

    const double E = f.r_u.dot(f.r_u);
    const double F = f.r_u.dot(f.r_v);
    const double G = f.r_v.dot(f.r_v);
    const double L = d_uu(u, v).dot(f.n);
    const double M = d_uv(u, v).dot(f.n);
    const double N = d_vv(u, v).dot(f.n);
    const double W = E * G - F * F;
    // H > 0 for a sphere with outward normal
    f.H = -(E * N - 2.0 * F * M + G * L) / (2.0 * W);
    f.K = (L * N - M * M) / W;
    return f;
}

SurfaceMetric ParametricSurface::metric(double u, double v) const {
    SurfaceMetric m;
    const Vec3 ru = d_u(u, v), rv = d_v(u, v);
    m.E = ru.dot(ru);
    m.F = ru.dot(rv);
    m.G = rv.dot(rv);
    const double W = m.E * m.G - m.F * m.F;
    if (W < 1e-24) throw std::domain_error("degenerate surface metric at (u,v)");
    m.inv_uu = m.G / W;
    m.inv_uv = -m.F / W;
    m.inv_vv = m.E / W;
    m.sqrt_a = std::sqrt(W);
    return m;
}

namespace {

class Sphere final : public ParametricSurface {
public:
    explicit Sphere(double R) : R_(R) {
        u0 = 0.0; u1 = M_PI;
        v0 = 0.0; v1 = 2.0 * M_PI;
        periodic_v = true;
        closed = true;
    }
    Vec3 position(double u, double v) const override {
        return R_ * Vec3(std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u));
    }
    Vec3 d_u(double u, double v) const override {
        return R_ * Vec3(std::cos(u) * std::cos(v), std::cos(u) * std::sin(v), -std::sin(u));
    }
    Vec3 d_v(double u, double v) const override {
        return R_ * Vec3(-std::sin(u) * std::sin(v), std::sin(u) * std::cos(v), 0.0);
    }
    Vec3 d_uu(double u, double v) const override { return -position(u, v); }
    Vec3 d_uv(double u, double v) const override {
        return R_ * Vec3(-std::cos(u) * std::sin(v), std::cos(u) * std::cos(v), 0.0);
    }
    Vec3 d_vv(double u, double v) const override {
        return R_ * Vec3(-std::sin(u) * std::cos(v), -std::sin(u) * std::sin(v), 0.0);
    }

private:
    double R_;
};

class Ellipsoid final : public ParametricSurface {
public:
    Ellipsoid(double a, double b, double c) : s_(a, b, c) {
        u0 = 0.0; u1 = M_PI;
        v0 = 0.0; v1 = 2.0 * M_PI;
        periodic_v = true;
        closed = true;
    }
    Vec3 position(double u, double v) const override {
        return s_.cwiseProduct(
            Vec3(std::sin(u) * std::cos(v), std::sin(u) * std::sin(v), std::cos(u)));
    }
    Vec3 d_u(double u, double v) const override {
        return s_.cwiseProduct(
            Vec3(std::cos(u) * std::cos(v), std::cos(u) * std::sin(v), -std::sin(u)));
    }
    Vec3 d_v(double u, double v) const override {
        return s_.cwiseProduct(Vec3(-std::sin(u) * std::sin(v), std::sin(u) * std::cos(v), 0.0));
    }
    Vec3 d_uu(double u, double v) const override { return -position(u, v); }
    Vec3 d_uv(double u, double v) const override {
        return s_.cwiseProduct(Vec3(-std::cos(u) * std::sin(v), std::cos(u) * std::cos(v), 0.0));
    }
    Vec3 d_vv(double u, double v) const override {
        return s_.cwiseProduct(Vec3(-std::sin(u) * std::cos(v), -std::sin(u) * std::sin(v), 0.0));
    }

private:
    Vec3 s_;
};

// u is the major (toroidal) angle, v the minor (poloidal) angle; this
// ordering makes r_u x r_v point outward.
class Torus final : public ParametricSurface {
public:
    Torus(double R, double r) : R_(R), r_(r) {
        u0 = 0.0; u1 = 2.0 * M_PI;
        v0 = 0.0; v1 = 2.0 * M_PI;
        periodic_u = periodic_v = true;
        closed = true;
    }
    Vec3 position(double u, double v) const override {
        const double w = R_ + r_ * std::cos(v);
        return Vec3(w * std::cos(u), w * std::sin(u), r_ * std::sin(v));
    }
    Vec3 d_u(double u, double v) const override {
        const double w = R_ + r_ * std::cos(v);
        return Vec3(-w * std::sin(u), w * std::cos(u), 0.0);
    }
    Vec3 d_v(double u, double v) const override {
        return Vec3(-r_ * std::sin(v) * std::cos(u), -r_ * std::sin(v) * std::sin(u),
                    r_ * std::cos(v));
    }
    Vec3 d_uu(double u, double v) const override {
        const double w = R_ + r_ * std::cos(v);
        return Vec3(-w * std::cos(u), -w * std::sin(u), 0.0);
    }
    Vec3 d_uv(double u, double v) const override {
        return Vec3(r_ * std::sin(v) * std::sin(u), -r_ * std::sin(v) * std::cos(u), 0.0);
    }
    Vec3 d_vv(double u, double v) const override {
        return Vec3(-r_ * std::cos(v) * std::cos(u), -r_ * std::cos(v) * std::sin(u),
                    -r_ * std::sin(v));
    }

private:
    double R_, r_;
};

class PlanePatch final : public ParametricSurface {
public:
    PlanePatch(double lx, double ly) {
        u0 = 0.0; u1 = lx;
        v0 = 0.0; v1 = ly;
    }
    Vec3 position(double u, double v) const override { return Vec3(u, v, 0.0); }
    Vec3 d_u(double, double) const override { return Vec3(1, 0, 0); }
    Vec3 d_v(double, double) const override { return Vec3(0, 1, 0); }
    Vec3 d_uu(double, double) const override { return Vec3::Zero(); }
    Vec3 d_uv(double, double) const override { return Vec3::Zero(); }
    Vec3 d_vv(double, double) const override { return Vec3::Zero(); }
};

}  // namespace

std::unique_ptr<ParametricSurface> make_sphere(double radius, bool flip_normal) {
    auto s = std::make_unique<Sphere>(radius);
    s->flip_normal = flip_normal;
    return s;
}

std::unique_ptr<ParametricSurface> make_ellipsoid(double a, double b, double c) {
    return std::make_unique<Ellipsoid>(a, b, c);
}

std::unique_ptr<ParametricSurface> make_torus(double major, double minor) {
    return std::make_unique<Torus>(major, minor);
}

std::unique_ptr<ParametricSurface> make_plane_patch(double lx, double ly) {
    return std::make_unique<PlanePatch>(lx, ly);
}

std::unique_ptr<ParametricSurface> make_surface(const std::string& name) {
    if (name == "sphere") return make_sphere(1.0);
    if (name == "ellipsoid") return make_ellipsoid(1.0, 1.5, 0.8);
    if (name == "torus") return make_torus(2.0, 0.7);
    if (name == "plane") return make_plane_patch(1.0, 1.0);
    throw std::invalid_argument("unknown surface: " + name);
}

SurfaceQuadrature surface_quadrature(const ParametricSurface& s, int nu, int nv) {
    SurfaceQuadrature q;
    line_rule(s.u0, s.u1, nu, s.periodic_u, q.u, q.wu);
    line_rule(s.v0, s.v1, nv, s.periodic_v, q.v, q.wv);
    return q;
}

double closed_surface_integral(
    const ParametricSurface& s, int nu, int nv,
    const std::function<double(double, double, const SurfaceFrame&)>& integrand) {
    const SurfaceQuadrature q = surface_quadrature(s, nu, nv);
    double sum = 0.0;
    for (int i = 0; i < nu; ++i) {
        double row = 0.0;
        for (int j = 0; j < nv; ++j) {
            const SurfaceFrame fr = s.frame(q.u[i], q.v[j]);
            row += integrand(q.u[i], q.v[j], fr) * fr.area_weight * q.wv[j];
        }
        sum += row * q.wu[i];
    }
    return sum;
}

Vec3 surface_gradient(const ParametricSurface& s,
                      const std::function<double(double, double)>& g,
                      double u, double v, double step) {
    const SurfaceMetric m = s.metric(u, v);
    const double gu = (g(u + step, v) - g(u - step, v)) / (2.0 * step);
    const double gv = (g(u, v + step) - g(u, v - step)) / (2.0 * step);
    const double cu = m.inv_uu * gu + m.inv_uv * gv;
    const double cv = m.inv_uv * gu + m.inv_vv * gv;
    return cu * s.d_u(u, v) + cv * s.d_v(u, v);
}

VelocityField VelocityField::from_function(std::function<Vec3(const Vec3&)> f,
                                           double fd_step) {
    VelocityField vf;
    vf.value = f;
    vf.jacobian = [f, fd_step](const Vec3& x) {
        Mat3 J;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = fd_step;
            J.col(j) = (f(x + e) - f(x - e)) / (2.0 * fd_step);
        }
        return J;
    };
    return vf;
}

VelocityField VelocityField::radial() {
    return linear(Mat3::Identity());
}

VelocityField VelocityField::translation(const Vec3& c) {
    VelocityField vf;
    vf.value = [c](const Vec3&) { return c; };
    vf.jacobian = [](const Vec3&) { return Mat3::Zero(); };
    return vf;
}

VelocityField VelocityField::rotation(const Vec3& omega) {
    VelocityField vf;
    vf.value = [omega](const Vec3& x) { return omega.cross(x); };
    Mat3 J;
    J << 0, -omega.z(), omega.y(),
         omega.z(), 0, -omega.x(),
        -omega.y(), omega.x(), 0;
    vf.jacobian = [J](const Vec3&) { return J; };
    return vf;
}

VelocityField VelocityField::linear(const Mat3& A) {
    VelocityField vf;
    vf.value = [A](const Vec3& x) { return Vec3(A * x); };
    vf.jacobian = [A](const Vec3&) { return A; };
    return vf;
}

double surface_divergence(const VelocityField& f, const SurfaceFrame& fr) {
    const Mat3 J = f.jacobian(fr.r);
    return J.trace() - fr.n.dot(J * fr.n);
}

VolumeJacobian volume_jacobian(const TransformState& st, const Vec3& X) {
    const Mat3 G = st.velocity->jacobian(X);
    const Mat3 F = Mat3::Identity() + st.t * G;
    VolumeJacobian vj;
    vj.J_t = F.determinant();
    if (vj.J_t <= 0.0)
        throw std::domain_error("volume_jacobian: transformation not invertible (det <= 0)");
    // d/dt det(I + t grad V) for the first-order map
    vj.dJ_t_dt = vj.J_t * (F.inverse() * G).trace();
    return vj;
}

TransformTensor transform_tensor(const TransformState& st, const Vec3& X) {
    const Mat3 G = st.velocity->jacobian(X);
    const Mat3 F = Mat3::Identity() + st.t * G;
    const double det = F.determinant();
    if (det <= 0.0)
        throw std::domain_error("transform_tensor: transformation not invertible (det <= 0)");
    const Mat3 Finv = F.inverse();
    TransformTensor tt;
    tt.A_t = det * Finv * Finv.transpose();
    tt.A_prime0 = G.trace() * Mat3::Identity() - G - G.transpose();
    return tt;
}

double surface_jacobian(const TransformState& st, const SurfaceFrame& fr) {
    const Mat3 G = st.velocity->jacobian(fr.r);
    const Mat3 F = Mat3::Identity() + st.t * G;
    const double det = F.determinant();
    if (det <= 0.0)
        throw std::domain_error("surface_jacobian: transformation not invertible (det <= 0)");
    const Vec3 a = F.inverse().transpose() * fr.n;
    return det * a.norm();
}

double surface_jacobian_rate0(const VelocityField& f, const SurfaceFrame& fr) {
    return surface_divergence(f, fr);
}

Vec3 normal_rate0(const ParametricSurface& s, const VelocityField& f,
                  double u, double v) {
    const SurfaceFrame fr = s.frame(u, v);
    const Mat3 J = f.jacobian(fr.r);
    const Vec3 su_t = J * fr.r_u;
    const Vec3 sv_t = J * fr.r_v;
    const Vec3 R = su_t.cross(fr.r_v) + fr.r_u.cross(sv_t);
    // rate of the raw chart normal; negate when the orientation is flipped
    const Vec3 n0 = fr.r_u.cross(fr.r_v) / fr.area_weight;
    const double sign = s.flip_normal ? -1.0 : 1.0;
    return sign * (R - n0 * n0.dot(R)) / fr.area_weight;
}

}  // namespace pbmem
