#include <cmath>
#include <random>

#include "doctest.h"

#include "crt/errors.hpp"
#include "crt/phantom.hpp"

using namespace crt;

namespace {

PhantomComponent ball(Vec3 c, double rho, double amp = 1.0, int order = 0) {
    PhantomComponent b;
    b.kind = ComponentKind::ball;
    b.center = c;
    b.radius_or_sigma = rho;
    b.amplitude = amp;
    b.smooth_order = order;
    return b;
}

PhantomComponent gaussian(Vec3 c, double sigma, double amp = 1.0) {
    PhantomComponent g;
    g.kind = ComponentKind::gaussian;
    g.center = c;
    g.radius_or_sigma = sigma;
    g.amplitude = amp;
    return g;
}

} // namespace

TEST_CASE("eval_phantom basics") {
    CHECK(eval_phantom(PhantomSpec{}, {0.3, 0.3, 0.3}) == 0.0);

    PhantomSpec spec;
    spec.components.push_back(ball({0.25, 0.25, 0.25}, 0.1));
    CHECK(eval_phantom(spec, {0.25, 0.25, 0.25}) == 1.0);
    CHECK(eval_phantom(spec, {0.25, 0.25, 0.36}) == 0.0);

    PhantomSpec g;
    g.components.push_back(gaussian({0.25, 0.25, 0.25}, 0.08));
    CHECK(eval_phantom(g, {0.33, 0.25, 0.25}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // truncated outside 4 sigma
    CHECK(eval_phantom(g, {0.25 + 0.33, 0.25, 0.25}) == 0.0);
}

TEST_CASE("validate_support") {
    PhantomSpec ok;
    ok.components.push_back(ball({0.25, 0.25, 0.25}, 0.1));
    CHECK(validate_support(ok).empty());

    PhantomSpec bad;
    bad.components.push_back(ball({0.4, 0.4, 0.4}, 0.1));
    CHECK(validate_support(bad).size() == 1);

    CHECK(validate_support(PhantomSpec{}).empty());
}

TEST_CASE("analytic_ray_p1 closed forms") {
    const PhantomComponent unit_ball = ball({0.0, 0.0, 0.0}, 1.0);
    CHECK(analytic_ray_p1(unit_ball, {-2.0, 5.0, 0.0}, {1.0, 0.0, 0.0}) == 0.0);
    CHECK(analytic_ray_p1(unit_ball, {-2.0, 0.0, 0.0}, {1.0, 0.0, 0.0}) ==
          doctest::Approx(4.0).epsilon(1e-14));

    const PhantomComponent b = ball({0.3, 0.3, 0.2}, 0.15);
    const Vec3 w = normalized(Vec3{0.3, -0.4, 0.86});
    CHECK(analytic_ray_p1(b, b.center, w) == doctest::Approx(0.15 * 0.15 / 2.0).epsilon(1e-13));
}

TEST_CASE("analytic_radon closed forms") {
    PhantomSpec spec;
    spec.components.push_back(ball({0.25, 0.25, 0.25}, 0.1));
    const Vec3 n{0.0, 0.0, 1.0};
    CHECK(analytic_radon(spec, n, 0.25) == doctest::Approx(kPi * 0.01).epsilon(1e-13));
    CHECK(analytic_radon(spec, n, 0.36) == 0.0);

    PhantomSpec g;
    g.components.push_back(gaussian({0.25, 0.25, 0.25}, 0.08));
    CHECK(analytic_radon(g, n, 0.25) == doctest::Approx(kPi * 0.0064).epsilon(1e-13));

    // order-m ball reduces to the disk formula at m = 0
    PhantomSpec m3;
    m3.components.push_back(ball({0.25, 0.25, 0.25}, 0.2, 2.0, 3));
    const double d = 0.1;
    const double q = 1.0 - d * d / 0.04;
    CHECK(analytic_radon(m3, n, 0.25 + d) ==
          doctest::Approx(2.0 * kPi * 0.04 * q * q * q * q / 4.0).epsilon(1e-12));
}

TEST_CASE("transforms are additive over components") {
    PhantomSpec a;
    a.components.push_back(gaussian({0.2, 0.25, 0.2}, 0.05));
    PhantomSpec b;
    b.components.push_back(ball({0.3, 0.2, 0.25}, 0.08, 0.7, 2));
    PhantomSpec both;
    both.components = {a.components[0], b.components[0]};

    std::mt19937 rng(3);
    std::normal_distribution<double> gaussd;
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (int i = 0; i < 100; ++i) {
        Vec3 n{gaussd(rng), gaussd(rng), gaussd(rng)};
        if (norm(n) < 1e-2) continue;
        n = normalized(n);
        const double s = uni(rng);
        CHECK(analytic_radon(both, n, s) == analytic_radon(a, n, s) + analytic_radon(b, n, s));
    }
}

TEST_CASE("phantom JSON round trip and field names") {
    PhantomSpec spec;
    spec.components.push_back(gaussian({0.22, 0.22, 0.22}, 0.07));
    spec.components.push_back(ball({0.3, 0.2, 0.25}, 0.08, 0.7, 2));

    const nlohmann::json j = phantom_to_json(spec);
    CHECK(j.contains("components"));
    CHECK(j["components"][0]["kind"] == "gaussian");
    CHECK(j["components"][0]["sigma"] == 0.07);
    CHECK(j["components"][0]["center"][0] == 0.22);
    CHECK(j["components"][0]["amplitude"] == 1.0);
    CHECK(j["components"][1]["kind"] == "ball");
    CHECK(j["components"][1]["radius"] == 0.08);

    const PhantomSpec back = phantom_from_json(j);
    REQUIRE(back.components.size() == 2);
    CHECK(back.components[0].radius_or_sigma == 0.07);
    CHECK(back.components[1].smooth_order == 2);
    CHECK(phantom_hash(back) == phantom_hash(spec));

    nlohmann::json unknown = j;
    unknown["components"][0]["typo"] = 1;
    CHECK_THROWS_AS((void)phantom_from_json(unknown), SchemaMismatch);
}

TEST_CASE("default phantom is the documented gaussian") {
    const PhantomSpec d = default_gaussian_phantom();
    REQUIRE(d.components.size() == 1);
    CHECK(d.components[0].kind == ComponentKind::gaussian);
    CHECK(d.components[0].center[0] == 0.22);
    CHECK(d.components[0].radius_or_sigma == 0.07);
}
