#include "crt/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "crt/errors.hpp"
#include "crt/interp.hpp"
#include "crt/quadrature.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace crt {

namespace {

double ipow(double b, int e) {
    double p = 1.0;
    for (int i = 0; i < e; ++i) p *= b;
    return p;
}

long long ifactorial(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Lower truncation of the repeated-integration integral: below omega_min
// the ray from u with direction w(omega) no longer crosses the support box.
// Coarse scan for the lowest feasible probe, then bisection of the
// transition; falls back to -omega_cap when every probe is feasible.
double support_omega_min(const Vec3& u, const Vec3& alpha, int slot, const QuadratureConfig& q) {
    const double hi = alpha[slot];
    const double lo = -q.omega_cap;
    if (hi <= lo) return lo;
    auto feasible = [&](double omega) {
        Vec3 w = alpha;
        w[slot] = omega;
        return ray_box_clip(u, w, kSupportBox).has_value();
    };
    constexpr int n_probe = 17;
    int first_true = -1;
    for (int i = 0; i < n_probe; ++i) {
        const double omega = lo + (hi - lo) * i / (n_probe - 1);
        if (feasible(omega)) {
            first_true = i;
            break;
        }
    }
    if (first_true < 0) return lo;   // integrand ~ 0 everywhere; keep full range
    if (first_true == 0) return lo;  // feasible down to the cap
    double a = lo + (hi - lo) * (first_true - 1) / (n_probe - 1);
    double b = lo + (hi - lo) * first_true / (n_probe - 1);
    for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (a + b);
        if (feasible(m)) {
            b = m;
        } else {
            a = m;
        }
    }
    return a; // infeasible side, so no support is cut off
}

// ---------------------------------------------------------------------------
// Direction tables: values on a (y, theta, phi) lattice per arm, cubically
// interpolated. theta in [0, pi] inclusive, phi periodic on [0, 2*pi).

struct DirTable {
    int n_y = 0, n_theta = 0, n_az = 0;
    std::vector<double> vals; // [3][n_y][n_theta][n_az]

    std::size_t index(int arm, int iy, int it, int ia) const {
        return ((static_cast<std::size_t>(arm) * n_y + iy) * n_theta + it) * n_az + ia;
    }

    static void angles_of(const Vec3& dir, double& theta, double& phi) {
        theta = std::acos(std::clamp(dir[2], -1.0, 1.0));
        phi = std::atan2(dir[1], dir[0]);
        if (phi < 0.0) phi += kTwoPi;
    }

    static Vec3 dir_of(double theta, double phi) {
        const double st = std::sin(theta);
        return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
    }

    double theta_of(int it) const { return kPi * it / (n_theta - 1); }
    double phi_of(int ia) const { return kTwoPi * ia / n_az; }

    // Bicubic in (theta, phi) on one y slab.
    double interp_at_ynode(int arm, int iy, const Vec3& dir) const {
        double theta, phi;
        angles_of(dir, theta, phi);
        return interp_slab(vals.data() + index(arm, iy, 0, 0), theta, phi);
    }

    // Tricubic in (y, theta, phi).
    double interp(int arm, double y, const Vec3& dir) const {
        double theta, phi;
        angles_of(dir, theta, phi);
        double uy = std::clamp(y, 0.0, 1.0) * (n_y - 1);
        int cy = static_cast<int>(uy);
        if (cy > n_y - 2) cy = n_y - 2;
        double wy[4];
        catmull_rom_weights(uy - cy, wy);
        auto slab_value = [&](int iy) {
            return interp_slab(vals.data() + index(arm, iy, 0, 0), theta, phi);
        };
        double acc = 0.0;
        for (int r = 0; r < 4; ++r) {
            acc += wy[r] * fetch_with_ghosts(slab_value, n_y, cy - 1 + r);
        }
        return acc;
    }

private:
    double interp_slab(const double* slab, double theta, double phi) const {
        double ut = theta / kPi * (n_theta - 1);
        int ct = static_cast<int>(ut);
        if (ct > n_theta - 2) ct = n_theta - 2;
        double wt[4];
        catmull_rom_weights(ut - ct, wt);

        double ua = phi / kTwoPi * n_az;
        int ca = static_cast<int>(ua);
        if (ca > n_az - 1) ca = n_az - 1;
        double wa[4];
        catmull_rom_weights(ua - ca, wa);

        double acc = 0.0;
        for (int r = 0; r < 4; ++r) {
            auto row_at = [&](int it) {
                const double* row = slab + static_cast<std::size_t>(it) * n_az;
                double v = 0.0;
                for (int cA = 0; cA < 4; ++cA) {
                    int ia = ca - 1 + cA;
                    ia = ((ia % n_az) + n_az) % n_az;
                    v += wa[cA] * row[ia];
                }
                return v;
            };
            acc += wt[r] * fetch_with_ghosts(row_at, n_theta, ct - 1 + r);
        }
        return acc;
    }
};

// pk_eval specialized to a grid y node and unit direction; bit-identical to
// the general path when the circle quadrature aligns with the data grid.
double pk_unit_at_ynode(const ProcessedGrid& g, int arm, int iy, const Vec3& dir,
                        const QuadratureConfig& q) {
    const Arm a = static_cast<Arm>(arm);
    if (q.n_phi_beta == g.grids.phi.n_phi) {
        const ReducedDirection rd = reduce_direction(a, dir);
        const double pref = rd.wmiss / (4.0 * kPi);
        double acc = 0.0;
        for (int j = 0; j < q.n_phi_beta; ++j) {
            const double phi = kTwoPi * j / q.n_phi_beta;
            const double s = std::cos(phi) * rd.wbar[0] + std::sin(phi) * rd.wbar[1];
            acc += sample_processed_on_node(g, arm, iy, j, s);
        }
        return pref * acc * (kTwoPi / q.n_phi_beta);
    }
    return pk_eval(g, Vertex{a, g.grids.y.y(iy)}, dir, q);
}

int table_theta_count(const QuadratureConfig& q) { return std::max(65, 2 * q.sphere_polar + 1); }
int table_az_count(const QuadratureConfig& q) { return std::max(128, 2 * q.sphere_azimuth); }

DirTable build_pk_table(const ProcessedGrid& g, const QuadratureConfig& q) {
    DirTable t;
    t.n_y = g.grids.y.n_y;
    t.n_theta = table_theta_count(q);
    t.n_az = table_az_count(q);
    t.vals.resize(static_cast<std::size_t>(3) * t.n_y * t.n_theta * t.n_az);
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) collapse(2)
#endif
    for (int arm = 0; arm < 3; ++arm) {
        for (int iy = 0; iy < t.n_y; ++iy) {
            for (int it = 0; it < t.n_theta; ++it) {
                for (int ia = 0; ia < t.n_az; ++ia) {
                    const Vec3 dir = DirTable::dir_of(t.theta_of(it), t.phi_of(ia));
                    t.vals[t.index(arm, iy, it, ia)] = pk_unit_at_ynode(g, arm, iy, dir, q);
                }
            }
        }
    }
    return t;
}

// P_1 on the same lattice via the repeated-integration reduction, reading
// pk values from the table (homogeneity supplies non-unit directions).
DirTable build_p1_table(const ProcessedGrid& g_dy, const DirTable& pk_tab,
                        const QuadratureConfig& q) {
    const int k = g_dy.k;
    DirTable t;
    t.n_y = pk_tab.n_y;
    t.n_theta = pk_tab.n_theta;
    t.n_az = pk_tab.n_az;
    t.vals.resize(pk_tab.vals.size());
    const GaussLegendre& gl = gauss_legendre(q.n_omega);
    const double inv_fact = 1.0 / static_cast<double>(ifactorial(k - 1));
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) collapse(2)
#endif
    for (int arm = 0; arm < 3; ++arm) {
        for (int iy = 0; iy < t.n_y; ++iy) {
            const Vertex v{static_cast<Arm>(arm), g_dy.grids.y.y(iy)};
            const Vec3 u = vertex_point(v);
            const int slot = arm_slot(v.arm);
            for (int it = 0; it < t.n_theta; ++it) {
                for (int ia = 0; ia < t.n_az; ++ia) {
                    const Vec3 alpha = DirTable::dir_of(t.theta_of(it), t.phi_of(ia));
                    const double a_i = alpha[slot];
                    const double omega_min = support_omega_min(u, alpha, slot, q);
                    double val = 0.0;
                    if (a_i > omega_min) {
                        const double mid = 0.5 * (omega_min + a_i);
                        const double half = 0.5 * (a_i - omega_min);
                        for (int n = 0; n < q.n_omega; ++n) {
                            const double omega = mid + half * gl.x[n];
                            Vec3 w = alpha;
                            w[slot] = omega;
                            const double wn = norm(w);
                            const double pk =
                                ipow(1.0 / wn, k + 1) *
                                pk_tab.interp_at_ynode(arm, iy, w * (1.0 / wn));
                            val += gl.w[n] * ipow(a_i - omega, k - 2) * pk;
                        }
                        val *= half * inv_fact;
                    }
                    t.vals[t.index(arm, iy, it, ia)] = val;
                }
            }
        }
    }
    return t;
}

// The great-circle integrand is cut off where the direction leaves the
// support half-space of the vertex's arm. Anchoring the trapezoid nodes at
// that cut makes the rule independent of the arbitrary frame orientation
// and keeps the cut at a node.
double anchor_angle(const Frame& frame, int miss) {
    return std::atan2(frame.e2[miss], frame.e1[miss]) - 0.5 * kPi;
}

// Plane data from the P_1 table: guarded great-circle quadrature.
double rf_from_table(const DirTable& p1_tab, const Vec3& n, double s,
                     const QuadratureConfig& q) {
    const Vertex v = vertex_for_plane(n, s);
    const Frame frame = great_circle_frame(n);
    const int miss = missing_slot(v.arm);
    const double theta0 = anchor_angle(frame, miss);
    double acc = 0.0;
    for (int j = 0; j < q.n_theta_gc; ++j) {
        const double theta = theta0 + kTwoPi * j / q.n_theta_gc;
        const Vec3 alpha = frame.e1 * std::cos(theta) + frame.e2 * std::sin(theta);
        if (alpha[miss] > 0.0) {
            acc += p1_tab.interp(arm_index(v.arm), v.y, alpha);
        }
    }
    return acc * (kTwoPi / q.n_theta_gc);
}

// ---------------------------------------------------------------------------
// Backprojection over tabulated plane data: one s line per sphere node,
// cubic 1D interpolation at x . n.

struct PlaneDataLines {
    int n_s = 0;
    std::vector<double> s_lo, ds;
    std::vector<double> vals; // [node][n_s]

    double sample(std::size_t node, double s) const {
        const double* line = vals.data() + node * n_s;
        double us = (s - s_lo[node]) / ds[node];
        if (us < 0.0) us = 0.0;
        if (us > n_s - 1) us = n_s - 1;
        int cs = static_cast<int>(us);
        if (cs > n_s - 2) cs = n_s - 2;
        double ws[4];
        catmull_rom_weights(us - cs, ws);
        double acc = 0.0;
        for (int r = 0; r < 4; ++r) {
            acc += ws[r] * fetch_with_ghosts([line](int i) { return line[i]; }, n_s, cs - 1 + r);
        }
        return acc;
    }
};

int plane_line_nodes(const VolumeSpec& vs) {
    const int m = std::max({vs.dims[0], vs.dims[1], vs.dims[2]});
    int n = std::max(129, 4 * m + 1);
    if (n % 2 == 0) ++n;
    return n;
}

// s range spanned by the volume for direction n, padded.
std::pair<double, double> volume_s_range(const VolumeSpec& vs, const Vec3& n, double pad) {
    double lo = 1e300, hi = -1e300;
    for (int c = 0; c < 8; ++c) {
        const Vec3 x = vs.voxel_center((c & 1) ? vs.dims[0] - 1 : 0, (c & 2) ? vs.dims[1] - 1 : 0,
                                       (c & 4) ? vs.dims[2] - 1 : 0);
        const double s = dot(x, n);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return {lo - pad, hi + pad};
}

// Offsets s for which the plane { x . n = s } still meets the tripod.
std::pair<double, double> feasible_s_range(const Vec3& n) {
    double lo = 0.0, hi = 0.0;
    for (int i = 0; i < 3; ++i) {
        lo = std::min(lo, n[i]);
        hi = std::max(hi, n[i]);
    }
    return {lo, hi};
}

template <class RfFn>
PlaneDataLines tabulate_plane_data(const RfFn& rf, const VolumeSpec& vs, const SphereGrid& sphere,
                                   bool clamp_feasible) {
    PlaneDataLines lines;
    lines.n_s = plane_line_nodes(vs);
    const std::size_t n_nodes = sphere.size();
    lines.s_lo.resize(n_nodes);
    lines.ds.resize(n_nodes);
    lines.vals.resize(n_nodes * lines.n_s);
    const double pad = 2.0 * vs.spacing;
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long node = 0; node < static_cast<long long>(n_nodes); ++node) {
        const Vec3 n = sphere.nodes[node];
        auto [lo, hi] = volume_s_range(vs, n, pad);
        if (clamp_feasible) {
            auto [flo, fhi] = feasible_s_range(n);
            lo = std::max(lo, flo + 1e-12);
            hi = std::min(hi, fhi - 1e-12);
        }
        lines.s_lo[node] = lo;
        lines.ds[node] = (hi - lo) / (lines.n_s - 1);
        double* out = lines.vals.data() + node * lines.n_s;
        for (int is = 0; is < lines.n_s; ++is) {
            out[is] = rf(n, lo + is * lines.ds[node]);
        }
    }
    return lines;
}

VolumeGrid backproject_lines(const PlaneDataLines& lines, const VolumeSpec& vs,
                             const SphereGrid& sphere) {
    VolumeGrid b;
    b.spec = vs;
    b.allocate();
    const std::size_t n_nodes = sphere.size();
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(static) collapse(2)
#endif
    for (int i = 0; i < vs.dims[0]; ++i) {
        for (int j = 0; j < vs.dims[1]; ++j) {
            for (int l = 0; l < vs.dims[2]; ++l) {
                const Vec3 x = vs.voxel_center(i, j, l);
                double acc = 0.0;
                for (std::size_t node = 0; node < n_nodes; ++node) {
                    acc += sphere.weights[node] * lines.sample(node, dot(x, sphere.nodes[node]));
                }
                b.at(i, j, l) = acc;
            }
        }
    }
    return b;
}

} // namespace

bool VolumeSpec::operator==(const VolumeSpec& o) const {
    return origin[0] == o.origin[0] && origin[1] == o.origin[1] && origin[2] == o.origin[2] &&
           spacing == o.spacing && dims == o.dims;
}

void VolumeSpec::validate(bool needs_visibility) const {
    if (!(spacing > 0.0)) throw OutOfRange("VolumeSpec: spacing must be > 0");
    for (int d : dims) {
        if (d < 2) throw OutOfRange("VolumeSpec: dims must be >= 2");
    }
    if (needs_visibility) {
        const double slack = 1e-12;
        double sum_max = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (origin[i] < spacing - slack) {
                throw OutOfRange("VolumeSpec: voxel centers must stay one spacing inside conv(Xi)");
            }
            sum_max += origin[i] + spacing * (dims[i] - 1);
        }
        if (sum_max > 1.0 - std::sqrt(3.0) * spacing + slack) {
            throw OutOfRange("VolumeSpec: voxel centers must stay one spacing inside conv(Xi)");
        }
    }
}

SphereGrid SphereGrid::product(int n_polar, int n_azimuth) {
    if (n_polar < 2 || n_azimuth < 2) throw OutOfRange("SphereGrid: counts must be >= 2");
    SphereGrid s;
    const GaussLegendre& gl = gauss_legendre(n_polar);
    s.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
    s.weights.reserve(s.nodes.capacity());
    const double waz = kTwoPi / n_azimuth;
    for (int ip = 0; ip < n_polar; ++ip) {
        const double t = gl.x[ip];
        const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
        for (int ja = 0; ja < n_azimuth; ++ja) {
            const double phi = kTwoPi * ja / n_azimuth;
            s.nodes.push_back({st * std::cos(phi), st * std::sin(phi), t});
            s.weights.push_back(gl.w[ip] * waz);
        }
    }
    return s;
}

double pk_eval(const ProcessedGrid& g, const Vertex& v, const Vec3& w, const QuadratureConfig& q) {
    const double wn = norm(w);
    if (wn < 1e-14) throw ZeroDirection("pk_eval: |w| < 1e-14");
    const ReducedDirection rd = reduce_direction(v.arm, w);
    const double pref = rd.wmiss / (4.0 * kPi * ipow(wn, g.k + 2));
    double acc = 0.0;
    for (int j = 0; j < q.n_phi_beta; ++j) {
        const double phi = kTwoPi * j / q.n_phi_beta;
        const double s = (std::cos(phi) * rd.wbar[0] + std::sin(phi) * rd.wbar[1]) / wn;
        acc += sample_processed(g, v.arm, v.y, phi, s);
    }
    return pref * acc * (kTwoPi / q.n_phi_beta);
}

double p1_eval(const ProcessedGrid& g_dy, const Vertex& v, const Vec3& alpha,
               const QuadratureConfig& q) {
    const int k = g_dy.k;
    if (g_dy.deriv_order != k - 1) {
        throw InsufficientDerivOrder("p1_eval needs a grid with deriv_order = k - 1");
    }
    if (k == 1) return pk_eval(g_dy, v, alpha, q);
    const int slot = arm_slot(v.arm);
    const double a_i = alpha[slot];
    const double omega_min = support_omega_min(vertex_point(v), alpha, slot, q);
    if (a_i <= omega_min) return 0.0;
    const GaussLegendre& gl = gauss_legendre(q.n_omega);
    const double mid = 0.5 * (omega_min + a_i);
    const double half = 0.5 * (a_i - omega_min);
    double acc = 0.0;
    for (int n = 0; n < q.n_omega; ++n) {
        const double omega = mid + half * gl.x[n];
        Vec3 w = alpha;
        w[slot] = omega;
        acc += gl.w[n] * ipow(a_i - omega, k - 2) * pk_eval(g_dy, v, w, q);
    }
    return acc * half / static_cast<double>(ifactorial(k - 1));
}

double rf_eval(const ProcessedGrid& g_dy, const Vec3& x, const Vec3& n,
               const QuadratureConfig& q) {
    const Vertex v = lambda_point(x, n);
    const Frame frame = great_circle_frame(n);
    const int miss = missing_slot(v.arm);
    const double theta0 = anchor_angle(frame, miss);
    double acc = 0.0;
    for (int j = 0; j < q.n_theta_gc; ++j) {
        const double theta = theta0 + kTwoPi * j / q.n_theta_gc;
        const Vec3 alpha = frame.e1 * std::cos(theta) + frame.e2 * std::sin(theta);
        if (alpha[miss] > 0.0) {
            acc += p1_eval(g_dy, v, alpha, q);
        }
    }
    return acc * (kTwoPi / q.n_theta_gc);
}

VolumeGrid backproject(const ProcessedGrid& g_dy, const VolumeSpec& vs, const SphereGrid& sphere,
                       const QuadratureConfig& q, PipelineMode mode) {
    vs.validate(true);
    if (g_dy.deriv_order != g_dy.k - 1) {
        throw InsufficientDerivOrder("backproject needs a grid with deriv_order = k - 1");
    }
    if (mode == PipelineMode::direct) {
        VolumeGrid b;
        b.spec = vs;
        b.allocate();
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) collapse(2)
#endif
        for (int i = 0; i < vs.dims[0]; ++i) {
            for (int j = 0; j < vs.dims[1]; ++j) {
                for (int l = 0; l < vs.dims[2]; ++l) {
                    const Vec3 x = vs.voxel_center(i, j, l);
                    double acc = 0.0;
                    for (std::size_t node = 0; node < sphere.size(); ++node) {
                        acc += sphere.weights[node] * rf_eval(g_dy, x, sphere.nodes[node], q);
                    }
                    b.at(i, j, l) = acc;
                }
            }
        }
        return b;
    }
    const DirTable pk_tab = build_pk_table(g_dy, q);
    const DirTable p1_tab =
        g_dy.k >= 2 ? build_p1_table(g_dy, pk_tab, q) : pk_tab;
    const auto rf = [&](const Vec3& n, double s) { return rf_from_table(p1_tab, n, s, q); };
    const PlaneDataLines lines = tabulate_plane_data(rf, vs, sphere, /*clamp_feasible=*/true);
    return backproject_lines(lines, vs, sphere);
}

VolumeGrid laplacian(const VolumeGrid& b) {
    for (int d : b.spec.dims) {
        if (d < 5) throw InsufficientGrid("laplacian needs dims >= 5 per axis");
    }
    VolumeGrid out;
    out.spec = b.spec;
    out.allocate();
    out.invalid_margin = b.invalid_margin + 1;
    const double inv_h2 = 1.0 / (b.spec.spacing * b.spec.spacing);
    const auto& d = b.spec.dims;
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int i = 1; i < d[0] - 1; ++i) {
        for (int j = 1; j < d[1] - 1; ++j) {
            for (int l = 1; l < d[2] - 1; ++l) {
                const double c = b.at(i, j, l);
                out.at(i, j, l) = (b.at(i - 1, j, l) + b.at(i + 1, j, l) + b.at(i, j - 1, l) +
                                   b.at(i, j + 1, l) + b.at(i, j, l - 1) + b.at(i, j, l + 1) -
                                   6.0 * c) *
                                  inv_h2;
            }
        }
    }
    return out;
}

VolumeGrid radon_invert(const std::function<double(const Vec3&, double)>& rf,
                        const VolumeSpec& vs, const SphereGrid& sphere) {
    vs.validate(false);
    const PlaneDataLines lines =
        tabulate_plane_data([&](const Vec3& n, double s) { return rf(n, s); }, vs, sphere,
                            /*clamp_feasible=*/false);
    VolumeGrid b = backproject_lines(lines, vs, sphere);
    VolumeGrid f = laplacian(b);
    const double scale = -1.0 / (8.0 * kPi * kPi);
    for (double& v : f.values) v *= scale;
    return f;
}

VolumeGrid reconstruct(const ConeDataGrid& c, WeightOrder k, const VolumeSpec& vs,
                       const SphereGrid& sphere, const QuadratureConfig& q, PipelineMode mode) {
    if (c.k != k.k) {
        throw SchemaMismatch("reconstruct: data grid was simulated with a different k");
    }
    if (!constant_factorization_ok(k.k)) {
        throw std::logic_error("inversion constant factorization self-check failed");
    }
    const ProcessedGrid g = process_cone_data(c);
    const ProcessedGrid g_dy = diff_y(g, k.k - 1);
    const VolumeGrid b = backproject(g_dy, vs, sphere, q, mode);
    VolumeGrid f = laplacian(b);
    const double scale = -1.0 / (8.0 * kPi * kPi);
    for (double& v : f.values) v *= scale;
    return f;
}

bool constant_factorization_ok(int k) {
    if (k < 1) return false;
    // Both sides as the integer d with constant = 1 / (d * pi^3).
    const long long staged = 8LL * 4LL * ifactorial(k - 1);     // (1/8pi^2)(1/4pi)(1/(k-1)!)
    const long long closed = (2LL * 2LL) * 8LL * ifactorial(k - 1); // 1/(2^2 (2pi)^3 (k-1)!)
    return staged == closed;
}

} // namespace crt
