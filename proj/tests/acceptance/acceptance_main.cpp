// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Simulated data sets are shared between criteria; pass a
// criterion name (A1..A6) to run a subset.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <vector>

#include "crt/crt_io.hpp"
#include "crt/errors.hpp"
#include "crt/forward.hpp"
#include "crt/inversion.hpp"
#include "crt/phantom.hpp"
#include "crt/sigproc.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

using namespace crt;

namespace {

struct Level {
    int n_s;
    int n_phi_beta;
    int sphere_polar;
    int sphere_azimuth;
};

// Refinement ladder for (n_s, n_phi_beta, sphere_grid); level 2 is the
// default configuration.
const Level kLevels[3] = {{65, 32, 12, 24}, {129, 64, 24, 48}, {257, 128, 48, 96}};

QuadratureConfig quad_for_level(const Level& lv) {
    QuadratureConfig q; // defaults for everything not in the ladder
    q.n_phi_beta = lv.n_phi_beta;
    q.sphere_polar = lv.sphere_polar;
    q.sphere_azimuth = lv.sphere_azimuth;
    return q;
}

GridSet grids_for_level(const Level& lv) {
    GridSet g;
    g.s.n_s = lv.n_s;
    return g;
}

struct DataSet {
    ConeDataGrid cone;
    ProcessedGrid processed;
    ProcessedGrid processed_dy;
};

const DataSet& dataset(int k, int level) {
    static std::map<std::pair<int, int>, DataSet> cache;
    const auto key = std::make_pair(k, level);
    auto it = cache.find(key);
    if (it == cache.end()) {
        DataSet d;
        const Level& lv = kLevels[level];
        d.cone = simulate_cone_data(default_gaussian_phantom(), grids_for_level(lv),
                                    WeightOrder(k), quad_for_level(lv));
        d.processed = process_cone_data(d.cone);
        d.processed_dy = diff_y(d.processed, k - 1);
        it = cache.emplace(key, std::move(d)).first;
    }
    return it->second;
}

VolumeGrid sample_volume(const PhantomSpec& f, const VolumeSpec& vs) {
    VolumeGrid truth;
    truth.spec = vs;
    truth.allocate();
    for (int i = 0; i < vs.dims[0]; ++i) {
        for (int j = 0; j < vs.dims[1]; ++j) {
            for (int l = 0; l < vs.dims[2]; ++l) {
                truth.at(i, j, l) = eval_phantom(f, vs.voxel_center(i, j, l));
            }
        }
    }
    return truth;
}

Vec3 random_unit(std::mt19937& rng) {
    std::normal_distribution<double> gauss;
    Vec3 n;
    do {
        n = {gauss(rng), gauss(rng), gauss(rng)};
    } while (norm(n) < 1e-3);
    return normalized(n);
}

Vec3 direction_through_core(std::mt19937& rng, const Vertex& v) {
    std::normal_distribution<double> gauss;
    const Vec3 c{0.22, 0.22, 0.22};
    for (;;) {
        const Vec3 target = c + Vec3{gauss(rng), gauss(rng), gauss(rng)} * 0.05;
        const Vec3 w = target - vertex_point(v);
        if (norm(w) > 0.05) return normalized(w);
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

// --- A1 -------------------------------------------------------------------

Outcome run_a1() {
    Outcome out;
    const QuadratureConfig q; // defaults
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> uc(0.15, 0.3);
    std::uniform_real_distribution<double> ur(0.05, 0.12);
    std::normal_distribution<double> gauss;

    double worst_ray = 0.0;
    int hits = 0;
    for (int i = 0; i < 1000; ++i) {
        PhantomComponent ball;
        ball.kind = ComponentKind::ball;
        ball.center = {uc(rng), uc(rng), uc(rng)};
        ball.radius_or_sigma = ur(rng);
        PhantomSpec f;
        f.components.push_back(ball);
        const Vec3 u{uc(rng) - 0.12, uc(rng) - 0.12, uc(rng) - 0.12};
        // aim at a point scattered around the ball so most rays cross it
        const Vec3 target = ball.center + Vec3{gauss(rng), gauss(rng), gauss(rng)} *
                                              (0.8 * ball.radius_or_sigma);
        if (norm(target - u) < 1e-3) continue;
        const Vec3 w = normalized(target - u);
        const double ref = analytic_ray_p1(ball, u, w);
        const double got = ray_transform(f, u, w, WeightOrder(1), q);
        if (ref > 1e-6) {
            ++hits;
            worst_ray = std::max(worst_ray, std::abs(got - ref) / ref);
        } else {
            out.require(std::abs(got - ref) < 1e-12, "miss ray not exactly zero");
        }
    }
    out.require(hits >= 500, "too few chord-crossing samples");
    out.require(worst_ray < 1e-6, "ray oracle error " + fmt(worst_ray));

    const PhantomSpec f = default_gaussian_phantom();
    const double sigma = f.components[0].radius_or_sigma;
    double worst_plane = 0.0;
    std::uniform_real_distribution<double> uoff(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 n = random_unit(rng);
        // planes within two sigma of the core; beyond, the 4-sigma
        // truncation mismatch of the analytic form dominates the value
        const double s = dot(n, f.components[0].center) + sigma * uoff(rng);
        const double ref = analytic_radon(f, n, s);
        const double got = plane_transform(f, n, s, q);
        worst_plane = std::max(worst_plane, std::abs(got - ref) / ref);
    }
    out.require(worst_plane < 1e-4, "plane oracle error " + fmt(worst_plane));
    out.detail = "ray max rel " + fmt(worst_ray) + ", plane max rel " +
                 fmt(worst_plane);
    return out;
}

// --- A2 -------------------------------------------------------------------

double pk_error_at(int k, int level, double* mean_out) {
    const DataSet& d = dataset(k, level);
    const QuadratureConfig q = quad_for_level(kLevels[level]);
    std::mt19937 rng(202); // identical pairs across levels
    std::uniform_real_distribution<double> uy(0.05, 0.8);
    double worst = 0.0, sum = 0.0;
    int n = 0;
    for (int i = 0; i < 20; ++i) {
        const Vertex v{static_cast<Arm>(i % 3), uy(rng)};
        const Vec3 w = direction_through_core(rng, v);
        const double ref = ray_transform(default_gaussian_phantom(), vertex_point(v), w,
                                         WeightOrder(k), q);
        const double got = pk_eval(d.processed, v, w, q);
        const double rel = std::abs(got - ref) / ref;
        worst = std::max(worst, rel);
        sum += rel;
        ++n;
    }
    if (mean_out) *mean_out = sum / n;
    return worst;
}

Outcome run_a2() {
    Outcome out;
    std::string detail;
    for (int k : {1, 2}) {
        double mean_half = 0.0, mean_full = 0.0;
        const double worst_half = pk_error_at(k, 1, &mean_half);
        const double worst_full = pk_error_at(k, 2, &mean_full);
        out.require(worst_full < 0.03,
                    "k=" + std::to_string(k) + " default-grid error " + fmt(worst_full));
        out.require(mean_full < 0.6 * mean_half,
                    "k=" + std::to_string(k) + " refinement ratio " +
                        fmt(mean_full / mean_half));
        detail += "k=" + std::to_string(k) + ": max " + fmt(worst_full) + " (coarse " +
                  fmt(worst_half) + "), ";
    }
    out.detail = detail + (out.detail.empty() ? "" : "; " + out.detail);
    return out;
}

// --- A3 -------------------------------------------------------------------

Outcome run_a3() {
    Outcome out;
    const DataSet& d = dataset(2, 2);
    const QuadratureConfig q = quad_for_level(kLevels[2]);
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> uy(0.05, 0.8);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Vertex v{static_cast<Arm>(i % 3), uy(rng)};
        const Vec3 alpha = direction_through_core(rng, v);
        const double ref = ray_transform(default_gaussian_phantom(), vertex_point(v), alpha,
                                         WeightOrder(1), q);
        const double got = p1_eval(d.processed_dy, v, alpha, q);
        worst = std::max(worst, std::abs(got - ref) / ref);
    }
    out.require(worst < 0.05, "repeated-integration error " + fmt(worst));
    out.detail = "max rel " + fmt(worst);
    return out;
}

// --- A4 -------------------------------------------------------------------

Outcome run_a4() {
    Outcome out;
    VolumeSpec vs;
    vs.spacing = 1.0 / 128.0;
    vs.dims = {64, 64, 64};
    vs.origin = {vs.spacing / 2.0, vs.spacing / 2.0, vs.spacing / 2.0};
    const SphereGrid sphere = SphereGrid::product(48, 96);

    const PhantomSpec gauss = default_gaussian_phantom();
    const VolumeGrid rg = radon_invert(
        [&](const Vec3& n, double s) { return analytic_radon(gauss, n, s); }, vs, sphere);
    const Metrics mg = metrics(rg, sample_volume(gauss, vs));
    out.require(mg.rel_l2 < 0.02, "gaussian rel L2 " + fmt(mg.rel_l2));

    PhantomSpec ball;
    {
        PhantomComponent b;
        b.kind = ComponentKind::ball;
        b.center = {0.25, 0.25, 0.25};
        b.radius_or_sigma = 0.18;
        b.amplitude = 1.0;
        b.smooth_order = 3;
        ball.components.push_back(b);
    }
    const VolumeGrid rb = radon_invert(
        [&](const Vec3& n, double s) { return analytic_radon(ball, n, s); }, vs, sphere);
    const Metrics mb = metrics(rb, sample_volume(ball, vs));
    out.require(mb.rel_l2 < 0.05, "ball rel L2 " + fmt(mb.rel_l2));

    out.detail = "gaussian rel L2 " + fmt(mg.rel_l2) + ", ball(order 3) rel L2 " + fmt(mb.rel_l2);
    return out;
}

// --- A5 -------------------------------------------------------------------

Outcome run_a5() {
    Outcome out;
    VolumeSpec vs;
    vs.spacing = 1.0 / 128.0;
    vs.dims = {32, 32, 32};
    vs.origin = {0.075, 0.075, 0.075};
    const VolumeGrid truth = sample_volume(default_gaussian_phantom(), vs);

    std::string detail;
    for (int k : {1, 2}) {
        double err[3];
        for (int level = 0; level < 3; ++level) {
            const Level& lv = kLevels[level];
            const DataSet& d = dataset(k, level);
            const SphereGrid sphere = SphereGrid::product(lv.sphere_polar, lv.sphere_azimuth);
            const VolumeGrid recon = reconstruct(d.cone, WeightOrder(k), vs, sphere,
                                                 quad_for_level(lv));
            err[level] = metrics(recon, truth).rel_l2;
        }
        out.require(err[2] < 0.15,
                    "k=" + std::to_string(k) + " default rel L2 " + fmt(err[2]));
        out.require(err[1] < err[0] && err[2] < err[1],
                    "k=" + std::to_string(k) + " not monotone: " + fmt(err[0]) + " -> " +
                        fmt(err[1]) + " -> " + fmt(err[2]));
        detail += "k=" + std::to_string(k) + ": " + fmt(err[0]) + " -> " + fmt(err[1]) +
                  " -> " + fmt(err[2]) + "; ";
    }
    out.detail = detail;
    return out;
}

// --- A6 -------------------------------------------------------------------

Outcome run_a6() {
    Outcome out;

    // pk homogeneity at 1e-10
    {
        const DataSet& d = dataset(1, 1);
        const QuadratureConfig q = quad_for_level(kLevels[1]);
        std::mt19937 rng(606);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            const Vertex v{static_cast<Arm>(i % 3), 0.05 + 0.015 * i};
            const Vec3 w = direction_through_core(rng, v) * 1.3;
            const double one = pk_eval(d.processed, v, w, q);
            const double two = pk_eval(d.processed, v, w * 2.0, q);
            if (one == 0.0) continue;
            worst = std::max(worst, std::abs(two - 0.25 * one) / std::abs(one));
        }
        out.require(worst < 1e-10, "pk homogeneity residual " + fmt(worst));
    }

    // constant factorization, exact
    for (int k = 1; k <= 5; ++k) {
        out.require(constant_factorization_ok(k),
                    "constant factorization failed at k=" + std::to_string(k));
    }

    // plane-vertex membership residual
    {
        std::mt19937 rng(607);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            Vec3 x{uni(rng), uni(rng), uni(rng)};
            const double sum = x[0] + x[1] + x[2];
            if (sum > 1.0 - 1e-6) {
                x = x * ((1.0 - 1e-6) / sum * uni(rng));
            }
            const Vec3 n = random_unit(rng);
            const Vertex v = lambda_point(x, n);
            worst = std::max(worst, std::abs(dot(x - vertex_point(v), n)));
        }
        out.require(worst < 1e-10, "lambda membership residual " + fmt(worst));
    }

    // Hilbert all-ones kernel identity
    {
        SGrid sg;
        HilbertKernel kernel(sg.n_s);
        std::vector<double> ones(sg.n_s, 1.0), h(sg.n_s);
        kernel.apply_line(ones.data(), h.data());
        double worst = 0.0;
        for (int i = 1; i < sg.n_s - 1; ++i) {
            const double s = sg.s(i);
            const double expect = std::log(std::abs((s - sg.s_min) / (s - sg.s_max))) / kPi;
            worst = std::max(worst, std::abs(h[i] - expect));
        }
        out.require(worst < 1e-10, "Hilbert all-ones residual " + fmt(worst));
    }

    // H^2 = -I on a contained bump (grid wide enough for the 1/s tail)
    {
        const int n = 2049;
        const double lo = -8.0, hi = 8.0, h = (hi - lo) / (n - 1);
        HilbertKernel kernel(n);
        std::vector<double> f(n), once(n), twice(n);
        for (int i = 0; i < n; ++i) {
            const double t = lo + i * h;
            f[i] = std::exp(-(t / 0.3) * (t / 0.3));
        }
        kernel.apply_line(f.data(), once.data());
        kernel.apply_line(once.data(), twice.data());
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            if (std::abs(lo + i * h) > 1.0) continue;
            worst = std::max(worst, std::abs(twice[i] + f[i]));
        }
        out.require(worst < 2e-2, "H^2 interior residual " + fmt(worst));
    }

    // file round trip, bit exact
    {
        const DataSet& d = dataset(1, 0);
        const std::string path =
            (std::filesystem::temp_directory_path() / "crt_acceptance_roundtrip.crt").string();
        write_crt(d.cone, path);
        const ConeDataGrid back = read_cone_grid(path);
        const bool same = back.data.size() == d.cone.data.size() &&
                          std::memcmp(back.data.data(), d.cone.data.data(),
                                      d.cone.data.size() * sizeof(double)) == 0;
        out.require(same, "cone grid round trip not bit exact");
        std::filesystem::remove(path);
    }

    // thread-count determinism of a full reconstruction
    {
        const DataSet& d = dataset(1, 0);
        VolumeSpec vs;
        vs.spacing = 1.0 / 128.0;
        vs.dims = {12, 12, 12};
        vs.origin = {0.14, 0.14, 0.14};
        const SphereGrid sphere = SphereGrid::product(12, 24);
        const QuadratureConfig q = quad_for_level(kLevels[0]);
#ifdef CRT_HAVE_OPENMP
        omp_set_num_threads(1);
#endif
        const VolumeGrid v1 = reconstruct(d.cone, WeightOrder(1), vs, sphere, q);
#ifdef CRT_HAVE_OPENMP
        omp_set_num_threads(2);
#endif
        const VolumeGrid v2 = reconstruct(d.cone, WeightOrder(1), vs, sphere, q);
#ifdef CRT_HAVE_OPENMP
        omp_set_num_threads(0 < omp_get_num_procs() ? omp_get_num_procs() : 1);
#endif
        const bool same = std::memcmp(v1.values.data(), v2.values.data(),
                                      v1.values.size() * sizeof(double)) == 0;
        out.require(same, "volumes differ across thread counts");
    }

    out.detail = "all exact identities hold";
    return out;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> only(argv + 1, argv + argc);
    auto selected = [&](const std::string& name) {
        if (only.empty()) return true;
        for (const auto& o : only) {
            if (o == name) return true;
        }
        return false;
    };

    struct Criterion {
        const char* name;
        Outcome (*fn)();
        double budget_s;
    };
    const Criterion criteria[] = {
        {"A1", run_a1, 60.0},   {"A2", run_a2, 600.0}, {"A3", run_a3, 600.0},
        {"A4", run_a4, 900.0},  {"A5", run_a5, 3600.0}, {"A6", run_a6, 120.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected(c.name)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << c.name << (out.pass ? " PASS" : " FAIL") << "  [" << fmt(secs) << " s / "
                  << fmt(c.budget_s) << " s budget"
                  << (secs > c.budget_s ? ", OVER BUDGET" : "") << "]  " << out.detail
                  << std::endl;
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
