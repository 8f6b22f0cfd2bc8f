#pragma once

#include "crt/grids.hpp"
#include "crt/phantom.hpp"

namespace crt {

/// Power of r weighting the ray integrals.
struct WeightOrder {
    int k = 1;

    WeightOrder() = default;
    explicit WeightOrder(int kk);
};

/// Node counts and truncation bounds for every integral in the pipeline.
struct QuadratureConfig {
    int n_ray = 256;       // node budget per ray
    int n_phi_cone = 128;  // cone-circle nodes
    int n_plane = 256;     // plane-quadrature nodes per axis
    double omega_cap = 8.0;
    int n_omega = 128;
    int n_phi_beta = 128;
    int sphere_polar = 48;
    int sphere_azimuth = 96;
    int n_theta_gc = 96;

    void validate() const;
};

/// Weighted ray transform: integral of f(u + r*w) r^k dr over r >= 0.
/// The ray is split at the support-ball boundaries of the phantom
/// components and Gauss-Legendre is applied per smooth piece, so indicator
/// balls are integrated exactly; n_ray caps the per-piece node count.
double ray_transform(const PhantomSpec& f, const Vec3& u, const Vec3& w, WeightOrder k,
                     const QuadratureConfig& q);

/// Conical Radon transform sample: the cone-surface delta is collapsed to a
/// circle of rays, integrated by the periodic trapezoid rule. Zero for |s| > 1.
double cone_transform(const PhantomSpec& f, const Vertex& v, double phi_axis, double s,
                      WeightOrder k, const QuadratureConfig& q);

/// Planar Radon transform over { x . n = s } by tensor Gauss-Legendre on a
/// patch covering the support box; exact zero when the plane misses it.
double plane_transform(const PhantomSpec& f, const Vec3& n, double s, const QuadratureConfig& q);

/// Dense data simulation: cone_transform at every (arm, y, phi, s) node.
/// Cells whose cone provably misses every component are skipped (their
/// value is exactly zero); results are bit-identical to the cell-wise calls
/// regardless of thread count.
ConeDataGrid simulate_cone_data(const PhantomSpec& f, const GridSet& grids, WeightOrder k,
                                const QuadratureConfig& q);

} // namespace crt
