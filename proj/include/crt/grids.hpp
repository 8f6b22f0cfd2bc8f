#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crt/geometry.hpp"

namespace crt {

/// Uniform grid in the opening-angle cosine. Padded past [-1, 1] so the
/// data vanish near the grid ends (the transform is zero for |s| > 1).
struct SGrid {
    double s_min = -1.25;
    double s_max = 1.25;
    int n_s = 257;

    double h() const { return (s_max - s_min) / (n_s - 1); }
    double s(int i) const { return s_min + i * h(); }
    void validate() const;
};

/// Uniform grid of the arm parameter on [0, 1].
struct YGrid {
    int n_y = 129;

    double h() const { return 1.0 / (n_y - 1); }
    double y(int i) const { return i * h(); }
    void validate(int k = 1) const;
};

/// Uniform periodic grid of the axis angle on [0, 2*pi).
struct PhiGrid {
    int n_phi = 128;

    double h() const { return kTwoPi / n_phi; }
    double phi(int i) const { return i * h(); }
    void validate() const;
};

struct GridSet {
    YGrid y;
    PhiGrid phi;
    SGrid s;

    void validate(int k = 1) const {
        y.validate(k);
        phi.validate();
        s.validate();
    }
};

/// Dense 4D samples indexed by (arm, y, axis angle, cosine).
struct ConeDataGrid {
    GridSet grids;
    int k = 1;
    std::uint64_t phantom_hash = 0;
    std::uint64_t config_hash = 0;
    std::vector<double> data; // [3][n_y][n_phi][n_s], C order

    std::size_t size() const {
        return static_cast<std::size_t>(3) * grids.y.n_y * grids.phi.n_phi * grids.s.n_s;
    }
    std::size_t index(int arm, int iy, int jphi, int ls) const {
        return ((static_cast<std::size_t>(arm) * grids.y.n_y + iy) * grids.phi.n_phi + jphi) *
                   grids.s.n_s +
               ls;
    }
    double at(int arm, int iy, int jphi, int ls) const { return data[index(arm, iy, jphi, ls)]; }
    double& at(int arm, int iy, int jphi, int ls) { return data[index(arm, iy, jphi, ls)]; }

    void allocate() { data.assign(size(), 0.0); }
};

/// Same layout as ConeDataGrid; holds H_s d/ds of the data and, after
/// diff_y, its y-derivatives. deriv_order counts the applied y-derivatives.
struct ProcessedGrid : ConeDataGrid {
    int deriv_order = 0;
};

} // namespace crt
