#include "crt/phantom.hpp"

#include <cmath>

#include "crt/errors.hpp"
#include "crt/hash.hpp"

namespace crt {

namespace {

double ipow(double b, int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
}

void require_keys(const nlohmann::json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
    for (const char* k : required) {
        if (!j.contains(k)) throw SchemaMismatch(where + ": missing key '" + k + "'");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required) known = known || it.key() == k;
        for (const char* k : optional) known = known || it.key() == k;
        if (!known) throw SchemaMismatch(where + ": unknown key '" + it.key() + "'");
    }
}

Vec3 vec_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw SchemaMismatch(where + ": expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

} // namespace

double PhantomComponent::support_radius() const {
    return kind == ComponentKind::ball ? radius_or_sigma : 4.0 * radius_or_sigma;
}

double eval_component(const PhantomComponent& c, const Vec3& x) {
    const double d2 = norm2(x - c.center);
    if (c.kind == ComponentKind::ball) {
        const double r2 = c.radius_or_sigma * c.radius_or_sigma;
        if (d2 >= r2) return 0.0;
        if (c.smooth_order == 0) return c.amplitude;
        return c.amplitude * ipow(1.0 - d2 / r2, c.smooth_order);
    }
    const double s2 = c.radius_or_sigma * c.radius_or_sigma;
    if (d2 > 16.0 * s2) return 0.0;
    return c.amplitude * std::exp(-d2 / s2);
}

double eval_phantom(const PhantomSpec& spec, const Vec3& x) {
    double acc = 0.0;
    for (const auto& c : spec.components) acc += eval_component(c, x);
    return acc;
}

std::vector<std::string> validate_support(const PhantomSpec& spec) {
    std::vector<std::string> warnings;
    const double sqrt3 = std::sqrt(3.0);
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        const auto& c = spec.components[i];
        const double r = c.support_radius();
        bool inside = true;
        for (int d = 0; d < 3; ++d) {
            inside = inside && c.center[d] - r >= 0.0 && c.center[d] + r <= 1.0;
        }
        inside = inside && c.center[0] + c.center[1] + c.center[2] + sqrt3 * r <= 1.0;
        if (!inside) {
            warnings.push_back("component " + std::to_string(i) +
                               ": support ball (radius " + std::to_string(r) +
                               ") is not contained in conv(Xi)");
        }
    }
    return warnings;
}

double analytic_ray_p1(const PhantomComponent& comp, const Vec3& u, const Vec3& w) {
    const Vec3 d = u - comp.center;
    const double b = dot(d, w);
    const double c0 = norm2(d) - comp.radius_or_sigma * comp.radius_or_sigma;
    const double disc = b * b - c0;
    if (disc <= 0.0) return 0.0;
    const double sq = std::sqrt(disc);
    double r0 = -b - sq;
    const double r1 = -b + sq;
    if (r0 < 0.0) r0 = 0.0;
    if (r1 <= r0) return 0.0;
    return comp.amplitude * 0.5 * (r1 * r1 - r0 * r0);
}

double analytic_radon(const PhantomSpec& spec, const Vec3& n, double s) {
    double acc = 0.0;
    for (const auto& c : spec.components) {
        const double d = s - dot(c.center, n);
        if (c.kind == ComponentKind::gaussian) {
            const double sig2 = c.radius_or_sigma * c.radius_or_sigma;
            acc += c.amplitude * kPi * sig2 * std::exp(-d * d / sig2);
        } else {
            const double rho2 = c.radius_or_sigma * c.radius_or_sigma;
            const double q = 1.0 - d * d / rho2;
            if (q <= 0.0) continue;
            acc += c.amplitude * kPi * rho2 * ipow(q, c.smooth_order + 1) / (c.smooth_order + 1);
        }
    }
    return acc;
}

std::optional<std::pair<double, double>> ray_support_interval(const PhantomComponent& comp,
                                                              const Vec3& u, const Vec3& w) {
    const double r = comp.support_radius();
    const Vec3 d = u - comp.center;
    const double a = norm2(w);
    const double b = dot(d, w);
    const double c0 = norm2(d) - r * r;
    const double disc = b * b - a * c0;
    if (disc <= 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    double t0 = (-b - sq) / a;
    const double t1 = (-b + sq) / a;
    if (t0 < 0.0) t0 = 0.0;
    if (t1 <= t0) return std::nullopt;
    return std::make_pair(t0, t1);
}

nlohmann::json phantom_to_json(const PhantomSpec& spec) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : spec.components) {
        nlohmann::json jc;
        jc["center"] = {c.center[0], c.center[1], c.center[2]};
        jc["amplitude"] = c.amplitude;
        if (c.kind == ComponentKind::gaussian) {
            jc["kind"] = "gaussian";
            jc["sigma"] = c.radius_or_sigma;
        } else {
            jc["kind"] = "ball";
            jc["radius"] = c.radius_or_sigma;
            jc["smooth_order"] = c.smooth_order;
        }
        comps.push_back(jc);
    }
    return nlohmann::json{{"components", comps}};
}

PhantomSpec phantom_from_json(const nlohmann::json& j) {
    require_keys(j, {"components"}, {}, "phantom");
    if (!j["components"].is_array()) throw SchemaMismatch("phantom: 'components' must be an array");
    PhantomSpec spec;
    int idx = 0;
    for (const auto& jc : j["components"]) {
        const std::string where = "phantom component " + std::to_string(idx++);
        if (!jc.contains("kind")) throw SchemaMismatch(where + ": missing key 'kind'");
        PhantomComponent c;
        const std::string kind = jc["kind"].get<std::string>();
        if (kind == "gaussian") {
            require_keys(jc, {"kind", "center", "sigma", "amplitude"}, {}, where);
            c.kind = ComponentKind::gaussian;
            c.radius_or_sigma = jc["sigma"].get<double>();
        } else if (kind == "ball") {
            require_keys(jc, {"kind", "center", "radius", "amplitude"}, {"smooth_order"}, where);
            c.kind = ComponentKind::ball;
            c.radius_or_sigma = jc["radius"].get<double>();
            c.smooth_order = jc.value("smooth_order", 0);
            if (c.smooth_order < 0) throw SchemaMismatch(where + ": smooth_order must be >= 0");
        } else {
            throw SchemaMismatch(where + ": unknown kind '" + kind + "'");
        }
        c.center = vec_from_json(jc["center"], where + ".center");
        c.amplitude = jc["amplitude"].get<double>();
        if (!(c.radius_or_sigma > 0.0)) throw SchemaMismatch(where + ": radius/sigma must be > 0");
        spec.components.push_back(c);
    }
    return spec;
}

std::uint64_t phantom_hash(const PhantomSpec& spec) {
    return fnv1a64(phantom_to_json(spec).dump());
}

PhantomSpec default_gaussian_phantom() {
    PhantomSpec spec;
    PhantomComponent c;
    c.kind = ComponentKind::gaussian;
    c.center = {0.22, 0.22, 0.22};
    c.radius_or_sigma = 0.07;
    c.amplitude = 1.0;
    spec.components.push_back(c);
    return spec;
}

} // namespace crt
