#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crt/vec.hpp"

#include "json.hpp"

namespace crt {

enum class ComponentKind { ball, gaussian };

/// One analytic source term. Balls: amplitude * (1 - |x-c|^2/rho^2)^m inside
/// the radius (m = 0 is the indicator). Gaussians: amplitude * exp(-|x-c|^2/sigma^2),
/// hard-truncated at radius 4*sigma so the source has compact support.
struct PhantomComponent {
    ComponentKind kind = ComponentKind::gaussian;
    Vec3 center;
    double radius_or_sigma = 0.1;
    double amplitude = 1.0;
    int smooth_order = 0; // balls only

    /// Radius of the support ball (rho, or 4*sigma for gaussians).
    double support_radius() const;
};

struct PhantomSpec {
    std::vector<PhantomComponent> components;
};

double eval_component(const PhantomComponent& c, const Vec3& x);

double eval_phantom(const PhantomSpec& spec, const Vec3& x);

/// One warning per component whose support ball is not contained in
/// conv(Xi); empty means the compact-support hypothesis holds.
std::vector<std::string> validate_support(const PhantomSpec& spec);

/// Closed-form weighted ray integral (k = 1) of an order-0 ball along
/// { u + r*w : r >= 0 }, |w| = 1.
double analytic_ray_p1(const PhantomComponent& comp, const Vec3& u, const Vec3& w);

/// Closed-form 3D Radon transform over the plane { x . n = s }, |n| = 1.
/// Gaussians use the untruncated form (the 4-sigma truncation mismatch is
/// below 1e-6 relative).
double analytic_radon(const PhantomSpec& spec, const Vec3& n, double s);

/// Parameter interval where the ray { u + t*w } meets the component's
/// support ball, clipped to t >= 0; nullopt when empty. w need not be unit.
std::optional<std::pair<double, double>> ray_support_interval(const PhantomComponent& comp,
                                                              const Vec3& u, const Vec3& w);

nlohmann::json phantom_to_json(const PhantomSpec& spec);

/// Strict parser: unknown keys are rejected (SchemaMismatch).
PhantomSpec phantom_from_json(const nlohmann::json& j);

std::uint64_t phantom_hash(const PhantomSpec& spec);

/// Smooth test source used throughout: a single unit gaussian at
/// (0.22, 0.22, 0.22) with sigma 0.07.
PhantomSpec default_gaussian_phantom();

} // namespace crt
