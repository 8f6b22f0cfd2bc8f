#include "crt/sigproc.hpp"

#include <cmath>

#include "crt/errors.hpp"
#include "crt/interp.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace crt {

namespace {

// ln|x| with the Hadamard finite-part convention ln|0| := 0, which makes the
// principal-value cancellation across adjacent intervals automatic and
// regularizes the two end rows.
double fp_log(double x) {
    if (x == 0.0) return 0.0;
    return std::log(std::abs(x));
}

// Per-interval closed forms, in units of the grid spacing. An interval
// [t_m, t_{m+1}] with values (fm, fm1) contributes to H(s_i), d = i - m:
//   (1/pi) * [ c1(d) * fm + c2(d) * fm1 ],
//   c1(d) = (1 - d) L(d) + 1,  c2(d) = d L(d) - 1,  L(d) = ln|d| - ln|d-1|.
double interval_L(double d) { return fp_log(d) - fp_log(d - 1.0); }
double interval_c1(double d) { return (1.0 - d) * interval_L(d) + 1.0; }
double interval_c2(double d) { return d * interval_L(d) - 1.0; }

void diff_line_4th(const double* f, double* out, int n, double h) {
    const double inv12h = 1.0 / (12.0 * h);
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv12h;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv12h;
    for (int i = 2; i < n - 2; ++i) {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv12h;
    }
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] -
                  f[n - 5]) *
                 inv12h;
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
                  3.0 * f[n - 5]) *
                 inv12h;
}

template <class G>
G diff_s_impl(const G& g) {
    if (g.grids.s.n_s < 5) throw InsufficientGrid("diff_s needs n_s >= 5");
    G out = g;
    const int n_s = g.grids.s.n_s;
    const double h = g.grids.s.h();
    const std::size_t n_lines = g.size() / n_s;
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long line = 0; line < static_cast<long long>(n_lines); ++line) {
        const double* in = g.data.data() + line * n_s;
        double* o = out.data.data() + line * n_s;
        diff_line_4th(in, o, n_s, h);
    }
    return out;
}

template <class G>
G hilbert_s_impl(const G& g) {
    G out = g;
    const int n_s = g.grids.s.n_s;
    const HilbertKernel kernel(n_s);
    const std::size_t n_lines = g.size() / n_s;
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long line = 0; line < static_cast<long long>(n_lines); ++line) {
        kernel.apply_line(g.data.data() + line * n_s, out.data.data() + line * n_s);
    }
    return out;
}

double fetch_clamped(const double* f, int n, int idx) {
    return fetch_with_ghosts([f](int i) { return f[i]; }, n, idx);
}

// Queries that land on a node up to division rounding must reproduce the
// stored value exactly.
double snap_to_node(double u) {
    const double r = std::round(u);
    return std::abs(u - r) < 1e-6 ? r : u;
}

} // namespace

HilbertKernel::HilbertKernel(int n) : n_(n) {
    // Weight of node j at output i: c1(i-j) from interval j (j <= n-2)
    // plus c2(i-j+1) from interval j-1 (j >= 1). Interior nodes therefore
    // see the Toeplitz kernel c1(d) + c2(d+1); the first and last column
    // drop one of the two terms, handled in apply_line.
    toeplitz_.resize(2 * n - 1);
    for (int d = -(n - 1); d <= n - 1; ++d) {
        toeplitz_[static_cast<std::size_t>(d + n - 1)] =
            interval_c1(d) + interval_c2(d + 1.0);
    }
}

void HilbertKernel::apply_line(const double* in, double* out) const {
    const int n = n_;
    const double inv_pi = 1.0 / kPi;
    for (int i = 0; i < n; ++i) {
        const double* row = toeplitz_.data() + (i + n - 1);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += row[-j] * in[j];
        // First column has no left interval, last column no right interval.
        acc -= interval_c2(i + 1.0) * in[0];
        acc -= interval_c1(static_cast<double>(i - (n - 1))) * in[n - 1];
        out[i] = acc * inv_pi;
    }
}

ConeDataGrid diff_s(const ConeDataGrid& g) { return diff_s_impl(g); }
ProcessedGrid diff_s(const ProcessedGrid& g) { return diff_s_impl(g); }

ConeDataGrid hilbert_s(const ConeDataGrid& g) { return hilbert_s_impl(g); }
ProcessedGrid hilbert_s(const ProcessedGrid& g) { return hilbert_s_impl(g); }

ProcessedGrid process_cone_data(const ConeDataGrid& c) {
    ProcessedGrid out;
    static_cast<ConeDataGrid&>(out) = hilbert_s(diff_s(c));
    out.deriv_order = 0;
    return out;
}

ProcessedGrid diff_y(const ProcessedGrid& g, int m) {
    if (m < 0) throw OutOfRange("diff_y: m must be >= 0");
    if (g.grids.y.n_y < m + 5 && m > 0) {
        throw InsufficientGrid("diff_y needs n_y >= m + 5");
    }
    ProcessedGrid out = g;
    const int n_y = g.grids.y.n_y;
    const int n_phi = g.grids.phi.n_phi;
    const int n_s = g.grids.s.n_s;
    const double h = g.grids.y.h();
    std::vector<double> line(n_y), dline(n_y);
    for (int pass = 0; pass < m; ++pass) {
        ProcessedGrid next = out;
#ifdef CRT_HAVE_OPENMP
#pragma omp parallel for schedule(static) firstprivate(line, dline)
#endif
        for (int col = 0; col < 3 * n_phi * n_s; ++col) {
            const int arm = col / (n_phi * n_s);
            const int jphi = (col / n_s) % n_phi;
            const int ls = col % n_s;
            for (int iy = 0; iy < n_y; ++iy) line[iy] = out.at(arm, iy, jphi, ls);
            diff_line_4th(line.data(), dline.data(), n_y, h);
            for (int iy = 0; iy < n_y; ++iy) next.at(arm, iy, jphi, ls) = dline[iy];
        }
        out = std::move(next);
    }
    out.deriv_order = g.deriv_order + m;
    return out;
}

double sample_processed(const ProcessedGrid& g, Arm arm, double y, double phi, double s) {
    const SGrid& sg = g.grids.s;
    if (s < sg.s_min || s > sg.s_max) return 0.0;
    if (y < -1e-9 || y > 1.0 + 1e-9) {
        throw OutOfRange("sample_processed: y outside [0, 1]");
    }
    y = y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
    if (phi < 0.0 || phi >= kTwoPi) {
        phi = std::fmod(phi, kTwoPi);
        if (phi < 0.0) phi += kTwoPi;
    }

    const int n_y = g.grids.y.n_y;
    const int n_phi = g.grids.phi.n_phi;
    const int n_s = sg.n_s;

    // s stencil
    double us = snap_to_node((s - sg.s_min) / sg.h());
    int cs = static_cast<int>(us);
    if (cs > n_s - 2) cs = n_s - 2;
    double ws[4];
    catmull_rom_weights(us - cs, ws);

    // y stencil
    double uy = snap_to_node(y * (n_y - 1));
    int cy = static_cast<int>(uy);
    if (cy > n_y - 2) cy = n_y - 2;
    double wy[4];
    catmull_rom_weights(uy - cy, wy);

    // phi stencil (periodic)
    double up = snap_to_node(phi / g.grids.phi.h());
    if (up >= n_phi) up -= n_phi;
    int cp = static_cast<int>(up);
    if (cp > n_phi - 1) cp = n_phi - 1;
    double wp[4];
    catmull_rom_weights(up - cp, wp);

    const int a = arm_index(arm);
    double acc = 0.0;
    for (int iy = 0; iy < 4; ++iy) {
        const int gy = cy - 1 + iy;
        double acc_phi = 0.0;
        for (int ip = 0; ip < 4; ++ip) {
            int gp = cp - 1 + ip;
            gp = ((gp % n_phi) + n_phi) % n_phi;
            // s line at (arm, gy-or-ghost, gp)
            double line_val = 0.0;
            if (gy >= 0 && gy < n_y) {
                const double* line = g.data.data() + g.index(a, gy, gp, 0);
                double acc_s = 0.0;
                for (int is = 0; is < 4; ++is) {
                    acc_s += ws[is] * fetch_clamped(line, n_s, cs - 1 + is);
                }
                line_val = acc_s;
            } else {
                // quadratic ghost in y from the three nearest rows
                const int base = gy < 0 ? 0 : n_y - 1;
                const int step = gy < 0 ? 1 : -1;
                double rows[3];
                for (int r = 0; r < 3; ++r) {
                    const double* line = g.data.data() + g.index(a, base + step * r, gp, 0);
                    double acc_s = 0.0;
                    for (int is = 0; is < 4; ++is) {
                        acc_s += ws[is] * fetch_clamped(line, n_s, cs - 1 + is);
                    }
                    rows[r] = acc_s;
                }
                line_val = 3.0 * rows[0] - 3.0 * rows[1] + rows[2];
            }
            acc_phi += wp[ip] * line_val;
        }
        acc += wy[iy] * acc_phi;
    }
    return acc;
}

double sample_processed_on_node(const ProcessedGrid& g, int arm, int iy, int jphi, double s) {
    const SGrid& sg = g.grids.s;
    if (s < sg.s_min || s > sg.s_max) return 0.0;
    const int n_s = sg.n_s;
    double us = snap_to_node((s - sg.s_min) / sg.h());
    int cs = static_cast<int>(us);
    if (cs > n_s - 2) cs = n_s - 2;
    double ws[4];
    catmull_rom_weights(us - cs, ws);
    const double* line = g.data.data() + g.index(arm, iy, jphi, 0);
    double acc = 0.0;
    for (int is = 0; is < 4; ++is) acc += ws[is] * fetch_clamped(line, n_s, cs - 1 + is);
    return acc;
}

} // namespace crt
