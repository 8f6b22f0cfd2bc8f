#pragma once

#include "crt/grids.hpp"

namespace crt {

/// Exact Hilbert transform of the piecewise-linear interpolant on a uniform
/// grid (clamped to the grid span, zero outside). The weights depend only
/// on node offsets and are precomputed once per grid; applying one line is
/// a dense O(n^2) product. Sign convention: H f(s) = (1/pi) pv-int f(t)/(s-t) dt.
/// At the two end nodes the value is the Hadamard finite part; inputs are
/// expected to vanish there (padded s-grid).
class HilbertKernel {
public:
    explicit HilbertKernel(int n);

    int n() const { return n_; }
    void apply_line(const double* in, double* out) const;

private:
    int n_;
    std::vector<double> toeplitz_; // full-hat weights, index d + (n-1)
};

/// 4th-order finite differences along the s axis (one-sided at the four
/// boundary nodes). Requires n_s >= 5.
ConeDataGrid diff_s(const ConeDataGrid& g);
ProcessedGrid diff_s(const ProcessedGrid& g);

/// Hilbert transform along every s line.
ConeDataGrid hilbert_s(const ConeDataGrid& g);
ProcessedGrid hilbert_s(const ProcessedGrid& g);

/// H_s d/ds of the cone data; deriv_order starts at 0.
ProcessedGrid process_cone_data(const ConeDataGrid& c);

/// m successive 4th-order y-derivatives per arm; m = 0 is the identity.
/// Throws InsufficientGrid when n_y < m + 5.
ProcessedGrid diff_y(const ProcessedGrid& g, int m);

/// Separable interpolation of a processed grid: Catmull-Rom in s and y,
/// periodic Catmull-Rom in phi. Returns 0 outside [s_min, s_max]; y must
/// lie in [0, 1] (up to 1e-9).
double sample_processed(const ProcessedGrid& g, Arm arm, double y, double phi, double s);

/// Same value as sample_processed at an exact y node with phi aligned to
/// the data grid; used by hot loops.
double sample_processed_on_node(const ProcessedGrid& g, int arm, int iy, int jphi, double s);

} // namespace crt
