#include "crt/geometry.hpp"

#include <cmath>
#include <limits>

#include "crt/errors.hpp"

namespace crt {

namespace {
constexpr double kFeasibleEps = 1e-9;  // minimum |n_i| for a stable division
constexpr double kYSlack = 1e-12;      // tolerated overshoot of the [0,1] range
} // namespace

Vec3 vertex_point(const Vertex& v) {
    Vec3 p;
    p[arm_slot(v.arm)] = v.y;
    return p;
}

Vec3 axis_direction(Arm arm, double phi) {
    if (phi < 0.0 || phi >= kTwoPi) {
        phi = std::fmod(phi, kTwoPi);
        if (phi < 0.0) phi += kTwoPi;
    }
    const double b1 = std::cos(phi);
    const double b2 = std::sin(phi);
    switch (arm) {
        case Arm::a1: return {b1, 0.0, b2};
        case Arm::a2: return {0.0, b1, b2};
        case Arm::a3: return {b1, 0.0, b2};
    }
    return {};
}

ReducedDirection reduce_direction(Arm arm, const Vec3& w) {
    ReducedDirection rd;
    if (arm == Arm::a2) {
        rd.wbar[0] = w[1];
        rd.wbar[1] = w[2];
        rd.wmiss = w[0];
    } else {
        rd.wbar[0] = w[0];
        rd.wbar[1] = w[2];
        rd.wmiss = w[1];
    }
    return rd;
}

Vec3 assemble_direction(Arm arm, const ReducedDirection& rd) {
    if (arm == Arm::a2) return {rd.wmiss, rd.wbar[0], rd.wbar[1]};
    return {rd.wbar[0], rd.wmiss, rd.wbar[1]};
}

bool in_support_region(const Vec3& x) {
    for (int i = 0; i < 3; ++i) {
        if (x[i] < 0.0 || x[i] > 1.0) return false;
    }
    return x[0] + x[1] + x[2] <= 1.0;
}

Vertex vertex_for_plane(const Vec3& n, double s) {
    int best = -1;
    double best_mag = 0.0;
    double best_y = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double mag = std::abs(n[i]);
        if (mag <= kFeasibleEps) continue;
        const double y = s / n[i];
        if (y < -kYSlack || y > 1.0 + kYSlack) continue;
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
            best_y = y;
        }
    }
    if (best < 0) {
        throw NoIntersection("plane (s=" + std::to_string(s) + ") misses all three arm segments");
    }
    const double y = best_y < 0.0 ? 0.0 : (best_y > 1.0 ? 1.0 : best_y);
    return Vertex{static_cast<Arm>(best), y};
}

Vertex lambda_point(const Vec3& x, const Vec3& n) {
    return vertex_for_plane(n, dot(x, n));
}

Frame great_circle_frame(const Vec3& n) {
    int a = 0;
    double amin = std::abs(n[0]);
    for (int i = 1; i < 3; ++i) {
        const double m = std::abs(n[i]);
        if (m < amin) {
            amin = m;
            a = i;
        }
    }
    Vec3 e;
    e[a] = 1.0;
    Frame f;
    f.e1 = normalized(e - n * n[a]);
    f.e2 = cross(n, f.e1);
    return f;
}

Vec3 cone_circle_direction(const Vec3& beta_u, double s, double phi) {
    if (phi < 0.0 || phi >= kTwoPi) {
        phi = std::fmod(phi, kTwoPi);
        if (phi < 0.0) phi += kTwoPi;
    }
    const Frame f = great_circle_frame(beta_u);
    const double rad = std::sqrt(std::max(0.0, 1.0 - s * s));
    return beta_u * s + (f.e1 * std::cos(phi) + f.e2 * std::sin(phi)) * rad;
}

std::optional<std::pair<double, double>> ray_box_clip(const Vec3& origin, const Vec3& dir,
                                                      const Box3& box) {
    double r0 = 0.0;
    double r1 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        if (dir[i] == 0.0) {
            if (origin[i] < box.lo[i] || origin[i] > box.hi[i]) return std::nullopt;
            continue;
        }
        double a = (box.lo[i] - origin[i]) / dir[i];
        double b = (box.hi[i] - origin[i]) / dir[i];
        if (a > b) std::swap(a, b);
        if (a > r0) r0 = a;
        if (b < r1) r1 = b;
    }
    if (r1 <= r0) return std::nullopt;
    return std::make_pair(r0, r1);
}

} // namespace crt
