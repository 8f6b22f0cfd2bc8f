#pragma once

#include <cmath>

namespace crt {

struct Vec3 {
    double v[3];

    constexpr Vec3() : v{0.0, 0.0, 0.0} {}
    constexpr Vec3(double a, double b, double c) : v{a, b, c} {}

    constexpr double operator[](int i) const { return v[i]; }
    constexpr double& operator[](int i) { return v[i]; }

    constexpr Vec3 operator+(const Vec3& o) const { return {v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2]}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2]}; }
    constexpr Vec3 operator*(double a) const { return {v[0] * a, v[1] * a, v[2] * a}; }
    constexpr Vec3 operator-() const { return {-v[0], -v[1], -v[2]}; }
};

constexpr Vec3 operator*(double a, const Vec3& u) { return u * a; }

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2];
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.v[1] * b.v[2] - a.v[2] * b.v[1],
            a.v[2] * b.v[0] - a.v[0] * b.v[2],
            a.v[0] * b.v[1] - a.v[1] * b.v[0]};
}

constexpr double norm2(const Vec3& a) { return dot(a, a); }

inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

inline Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return {a.v[0] / n, a.v[1] / n, a.v[2] / n};
}

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

} // namespace crt
