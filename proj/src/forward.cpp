#include "crt/forward.hpp"

#include <algorithm>
#include <cmath>

#include "crt/errors.hpp"
#include "crt/hash.hpp"
#include "crt/quadrature.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace crt {

namespace {

// Single smooth pieces never need more; the pieces are component chords.
constexpr int kMaxNodesPerPiece = 32;

double ipow(double b, int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
}

constexpr std::size_t kMaxComponents = 30;

// The integrand r -> f(u + r*w) r^k is smooth between consecutive
// support-ball entry/exit parameters; Gauss-Legendre per piece converges to
// machine precision there (and is exact for indicator balls).
double ray_transform_impl(const PhantomSpec& f, const Vec3& u, const Vec3& w, int k,
                          const QuadratureConfig& q) {
    if (f.components.size() > kMaxComponents) {
        throw OutOfRange("ray transform supports at most 30 phantom components");
    }
    double t0s[kMaxComponents], t1s[kMaxComponents];
    double bounds[2 * kMaxComponents];
    int ni = 0;
    for (const auto& comp : f.components) {
        if (auto iv = ray_support_interval(comp, u, w)) {
            t0s[ni] = iv->first;
            t1s[ni] = iv->second;
            bounds[2 * ni] = iv->first;
            bounds[2 * ni + 1] = iv->second;
            ++ni;
        }
    }
    if (ni == 0) return 0.0;
    std::sort(bounds, bounds + 2 * ni);
    const int n_nodes = std::min(q.n_ray, kMaxNodesPerPiece);
    const GaussLegendre& gl = gauss_legendre(n_nodes);
    double acc = 0.0;
    for (int p = 0; p + 1 < 2 * ni; ++p) {
        const double a = bounds[p];
        const double b = bounds[p + 1];
        if (!(b > a)) continue;
        const double rm = 0.5 * (a + b);
        bool active = false;
        for (int i = 0; i < ni && !active; ++i) active = t0s[i] <= rm && rm <= t1s[i];
        if (!active) continue;
        const double half = 0.5 * (b - a);
        double piece = 0.0;
        for (int i = 0; i < n_nodes; ++i) {
            const double r = rm + half * gl.x[i];
            piece += gl.w[i] * eval_phantom(f, u + w * r) * ipow(r, k);
        }
        acc += half * piece;
    }
    return acc;
}

struct ComponentCone {
    double dist;      // vertex-to-center distance
    Vec3 dir;         // unit direction vertex -> center
    double sin_gamma; // subtended half-angle (sin), 2 when vertex inside
};

ComponentCone component_cone(const PhantomComponent& comp, const Vec3& u) {
    ComponentCone cc;
    const Vec3 d = comp.center - u;
    cc.dist = norm(d);
    const double r = comp.support_radius();
    if (cc.dist <= r) {
        cc.dir = {0.0, 0.0, 1.0};
        cc.sin_gamma = 2.0; // vertex inside the support: every direction may hit
        return cc;
    }
    cc.dir = d * (1.0 / cc.dist);
    cc.sin_gamma = r / cc.dist;
    return cc;
}

// One cone-transform value given the precomputed axis frame.
double cone_value(const PhantomSpec& f, const Vec3& u, const Vec3& beta, const Frame& frame,
                  double s, int k, const QuadratureConfig& q) {
    const double rad = std::sqrt(std::max(0.0, 1.0 - s * s));
    double acc = 0.0;
    for (int j = 0; j < q.n_phi_cone; ++j) {
        const double phi = kTwoPi * j / q.n_phi_cone;
        const Vec3 alpha =
            beta * s + (frame.e1 * std::cos(phi) + frame.e2 * std::sin(phi)) * rad;
        acc += ray_transform_impl(f, u, alpha, k, q);
    }
    return acc * (kTwoPi / q.n_phi_cone);
}

} // namespace

WeightOrder::WeightOrder(int kk) : k(kk) {
    if (k < 1) throw OutOfRange("WeightOrder requires k >= 1");
}

void QuadratureConfig::validate() const {
    const int counts[] = {n_ray, n_phi_cone, n_plane, n_omega, n_phi_beta,
                          sphere_polar, sphere_azimuth, n_theta_gc};
    for (int c : counts) {
        if (c < 2) throw OutOfRange("QuadratureConfig: all node counts must be >= 2");
    }
    if (!(omega_cap > 1.0)) throw OutOfRange("QuadratureConfig: omega_cap must be > 1");
}

double ray_transform(const PhantomSpec& f, const Vec3& u, const Vec3& w, WeightOrder k,
                     const QuadratureConfig& q) {
    if (norm(w) < 1e-14) throw ZeroDirection("ray_transform: |w| < 1e-14");
    return ray_transform_impl(f, u, w, k.k, q);
}

double cone_transform(const PhantomSpec& f, const Vertex& v, double phi_axis, double s,
                      WeightOrder k, const QuadratureConfig& q) {
    if (std::abs(s) > 1.0) return 0.0;
    const Vec3 u = vertex_point(v);
    const Vec3 beta = axis_direction(v.arm, phi_axis);
    const Frame frame = great_circle_frame(beta);
    return cone_value(f, u, beta, frame, s, k.k, q);
}

double plane_transform(const PhantomSpec& f, const Vec3& n, double s, const QuadratureConfig& q) {
    const Vec3 center{0.5, 0.5, 0.5};
    const double half_diag = 0.5 * std::sqrt(3.0);
    const double off = s - dot(n, center);
    if (std::abs(off) > half_diag) return 0.0;
    const Vec3 q0 = center + n * off; // box center projected onto the plane
    const Frame frame = great_circle_frame(n);
    const GaussLegendre& gl = gauss_legendre(q.n_plane);
    double acc = 0.0;
    for (int i = 0; i < q.n_plane; ++i) {
        const double a = half_diag * gl.x[i];
        double row = 0.0;
        for (int j = 0; j < q.n_plane; ++j) {
            const double b = half_diag * gl.x[j];
            row += gl.w[j] * eval_phantom(f, q0 + frame.e1 * a + frame.e2 * b);
        }
        acc += gl.w[i] * row;
    }
    return acc * half_diag * half_diag;
}

ConeDataGrid simulate_cone_data(const PhantomSpec& f, const GridSet& grids, WeightOrder k,
                                const QuadratureConfig& q) {
    grids.validate(k.k);
    q.validate();
    ConeDataGrid g;
    g.grids = grids;
    g.k = k.k;
    g.phantom_hash = phantom_hash(f);
    g.allocate();

    const int n_y = grids.y.n_y;
    const int n_phi = grids.phi.n_phi;
    const int n_s = grids.s.n_s;
    const int n_lines = 3 * n_y * n_phi;
    const std::size_t ncomp = f.components.size();

#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
    for (int line = 0; line < n_lines; ++line) {
        const int arm_i = line / (n_y * n_phi);
        const int iy = (line / n_phi) % n_y;
        const int jphi = line % n_phi;
        const Arm arm = static_cast<Arm>(arm_i);
        const Vertex v{arm, grids.y.y(iy)};
        const Vec3 u = vertex_point(v);
        const Vec3 beta = axis_direction(arm, grids.phi.phi(jphi));
        const Frame frame = great_circle_frame(beta);

        // Opening-cosine window outside which every cone ray misses every
        // component: |angle(alpha, dir_c) - angle(beta, dir_c)| <= gamma_c.
        std::vector<std::pair<double, double>> windows;
        windows.reserve(ncomp);
        for (const auto& comp : f.components) {
            const ComponentCone cc = component_cone(comp, u);
            if (cc.sin_gamma >= 1.0) {
                windows.emplace_back(-1.0, 1.0);
                continue;
            }
            const double psi0 = std::acos(std::clamp(dot(beta, cc.dir), -1.0, 1.0));
            const double gamma = std::asin(cc.sin_gamma);
            // Widened by a hair so grazing cells are computed, never skipped.
            const double lo = std::cos(std::min(kPi, psi0 + gamma)) - 1e-9;
            const double hi = std::cos(std::max(0.0, psi0 - gamma)) + 1e-9;
            windows.emplace_back(lo, hi);
        }

        double* out = g.data.data() + g.index(arm_i, iy, jphi, 0);
        for (int ls = 0; ls < n_s; ++ls) {
            const double s = grids.s.s(ls);
            if (std::abs(s) > 1.0) {
                out[ls] = 0.0;
                continue;
            }
            bool maybe_hit = false;
            for (const auto& wdw : windows) {
                if (s >= wdw.first && s <= wdw.second) {
                    maybe_hit = true;
                    break;
                }
            }
            out[ls] = maybe_hit ? cone_value(f, u, beta, frame, s, k.k, q) : 0.0;
        }
    }
    return g;
}

} // namespace crt
