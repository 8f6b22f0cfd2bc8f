#pragma once

#include <array>
#include <functional>

#include "crt/forward.hpp"
#include "crt/grids.hpp"
#include "crt/sigproc.hpp"

namespace crt {

/// Regular reconstruction box: isotropic spacing, voxel centers at
/// origin + spacing * (i, j, l).
struct VolumeSpec {
    Vec3 origin;
    double spacing = 1.0 / 64.0;
    std::array<int, 3> dims = {32, 32, 32};

    Vec3 voxel_center(int i, int j, int l) const {
        return {origin[0] + spacing * i, origin[1] + spacing * j, origin[2] + spacing * l};
    }
    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int l) const {
        return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + l;
    }
    bool operator==(const VolumeSpec& o) const;

    /// Basic sanity always; when `needs_visibility` also checks that every
    /// voxel center lies in conv(Xi) shrunk by one spacing, so that the
    /// plane-vertex lookup is defined for all planes through the box.
    void validate(bool needs_visibility) const;
};

struct VolumeGrid {
    VolumeSpec spec;
    std::vector<double> values;
    int invalid_margin = 0; // outermost layers excluded from metrics

    void allocate() { values.assign(spec.size(), 0.0); }
    double at(int i, int j, int l) const { return values[spec.index(i, j, l)]; }
    double& at(int i, int j, int l) { return values[spec.index(i, j, l)]; }
};

/// Product quadrature on S^2: Gauss-Legendre in the polar cosine, uniform
/// azimuth. Weights sum to 4*pi.
struct SphereGrid {
    std::vector<Vec3> nodes;
    std::vector<double> weights;

    static SphereGrid product(int n_polar, int n_azimuth);
    std::size_t size() const { return nodes.size(); }
};

/// How backproject/reconstruct evaluate the plane data.
///   tabulated: per-vertex/direction tables with cubic interpolation
///              (orders of magnitude faster, quadrature-grade accuracy);
///   direct:    every evaluation goes through pk_eval/p1_eval/rf_eval.
enum class PipelineMode { tabulated, direct };

/// Weighted ray transform recovered from processed cone data (the circle
/// integral over the axis angles). With g.deriv_order = m the result
/// approximates the m-th y-derivative of P_k f at the vertex.
double pk_eval(const ProcessedGrid& g, const Vertex& v, const Vec3& w, const QuadratureConfig& q);

/// P_1 f from the (k-1)-th y-derivative grid by repeated-integration
/// reduction: k = 1 is the identity; k >= 2 integrates pk_eval over the
/// arm slot with weight (alpha_i - omega)^(k-2) / (k-1)!. The lower limit
/// is found by support truncation, capped at -omega_cap.
double p1_eval(const ProcessedGrid& g_dy, const Vertex& v, const Vec3& alpha,
               const QuadratureConfig& q);

/// Radon plane data Rf(n, x . n) as the great-circle integral of P_1 f at
/// the plane's tripod vertex. Nodes whose direction points out of the
/// support half-space of the vertex's arm contribute zero (P_1 f vanishes
/// there for sources supported in conv(Xi)); the trapezoid nodes are
/// anchored at that cut, so the result does not depend on the arbitrary
/// orientation of the circle frame.
double rf_eval(const ProcessedGrid& g_dy, const Vec3& x, const Vec3& n,
               const QuadratureConfig& q);

/// Sphere integral of the plane data over all normals, per voxel.
VolumeGrid backproject(const ProcessedGrid& g_dy, const VolumeSpec& vs, const SphereGrid& sphere,
                       const QuadratureConfig& q, PipelineMode mode = PipelineMode::tabulated);

/// 7-point second-order Laplacian; the outermost voxel layer of the result
/// is zeroed and marked invalid.
VolumeGrid laplacian(const VolumeGrid& b);

/// Classical Radon inversion f = -(1/(8 pi^2)) Lap of the backprojection,
/// for an arbitrary plane-data source; used stand-alone for stage-isolated
/// testing with analytic data.
VolumeGrid radon_invert(const std::function<double(const Vec3&, double)>& rf,
                        const VolumeSpec& vs, const SphereGrid& sphere);

/// Full staged inversion of cone data: process, differentiate (k-1) times
/// in y, backproject the reduced plane data, apply the scaled Laplacian.
VolumeGrid reconstruct(const ConeDataGrid& c, WeightOrder k, const VolumeSpec& vs,
                       const SphereGrid& sphere, const QuadratureConfig& q,
                       PipelineMode mode = PipelineMode::tabulated);

/// Exact identity between the two factorizations of the inversion constant
/// 1/(2^2 (2 pi)^3 (k-1)!) = (1/(8 pi^2)) * (1/(4 pi)) * (1/(k-1)!),
/// compared as integer multiples of 1/pi^3.
bool constant_factorization_ok(int k);

} // namespace crt
