#pragma once

#include <optional>
#include <utility>

#include "crt/vec.hpp"

namespace crt {

/// One of the three detector line segments along the coordinate axes.
/// The numeric order (1 < 2 < 3) is used for tie-breaking.
enum class Arm : int { a1 = 0, a2 = 1, a3 = 2 };

inline constexpr Arm kArms[3] = {Arm::a1, Arm::a2, Arm::a3};

constexpr int arm_index(Arm a) { return static_cast<int>(a); }

/// Coordinate slot that moving the vertex along the arm changes.
constexpr int arm_slot(Arm a) { return static_cast<int>(a); }

/// Coordinate slot of a direction that is dropped when reducing to the
/// arm's axis plane (arm 1 -> w2, arm 2 -> w1, arm 3 -> w2).
constexpr int missing_slot(Arm a) { return a == Arm::a2 ? 0 : 1; }

/// Cone vertex: a point on one arm, parameterized by y in [0, 1].
struct Vertex {
    Arm arm = Arm::a1;
    double y = 0.0;
};

/// Two in-plane components of a direction plus the dropped one.
struct ReducedDirection {
    double wbar[2] = {0.0, 0.0};
    double wmiss = 0.0;
};

/// Right-handed orthonormal frame completing a unit normal: {e1, e2, n}.
struct Frame {
    Vec3 e1;
    Vec3 e2;
};

struct Box3 {
    Vec3 lo;
    Vec3 hi;
};

inline constexpr Box3 kSupportBox = {{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};

Vec3 vertex_point(const Vertex& v);

/// Cone axis for a given arm, parameterized by the angle of
/// (beta1, beta2) = (cos phi, sin phi) on the unit circle. The slot layout
/// is per arm: 1 -> (b1, 0, b2), 2 -> (0, b1, b2), 3 -> (b1, 0, b2).
Vec3 axis_direction(Arm arm, double phi);

ReducedDirection reduce_direction(Arm arm, const Vec3& w);

/// Inverse of reduce_direction; bit-exact round trip.
Vec3 assemble_direction(Arm arm, const ReducedDirection& rd);

/// True iff x lies in conv(Xi) = { x in [0,1]^3 : x1+x2+x3 <= 1 }.
bool in_support_region(const Vec3& x);

/// A vertex on the plane with unit normal n and offset s = x . n.
/// Picks the arm with the largest |n_i| among those whose intersection
/// parameter lands in [0, 1]; ties go to the lower arm number.
Vertex vertex_for_plane(const Vec3& n, double s);

/// A vertex on the plane through x with unit normal n.
/// Throws NoIntersection when the plane misses all three arm segments.
Vertex lambda_point(const Vec3& x, const Vec3& n);

/// Deterministic orthonormal frame for a unit normal: e1 is built from the
/// coordinate axis least aligned with n (ties by index) via Gram-Schmidt,
/// e2 = n x e1, so that e1 x e2 = n.
Frame great_circle_frame(const Vec3& n);

/// Unit direction on the cone with axis beta_u and opening cosine s:
/// alpha(phi) = s*beta + sqrt(1-s^2)*(cos phi * e1 + sin phi * e2).
/// phi is reduced modulo 2*pi first, so alpha(0) == alpha(2*pi) bitwise.
Vec3 cone_circle_direction(const Vec3& beta_u, double s, double phi);

/// Parameter interval of { origin + r*dir : r >= 0 } inside the box, or
/// nullopt when the intersection has no positive length. Slab method with
/// exact treatment of zero direction components.
std::optional<std::pair<double, double>> ray_box_clip(const Vec3& origin, const Vec3& dir,
                                                      const Box3& box);

} // namespace crt
