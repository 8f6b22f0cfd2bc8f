// Python bindings for the conical Radon transform pipeline: phantoms,
// forward transforms, grid processing, and the staged inversion.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "crt/crt_io.hpp"
#include "crt/errors.hpp"
#include "crt/forward.hpp"
#include "crt/inversion.hpp"
#include "crt/phantom.hpp"
#include "crt/sigproc.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace py = pybind11;
using namespace crt;

namespace {

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

Arm to_arm(int arm) {
    if (arm < 1 || arm > 3) throw OutOfRange("arm must be 1, 2 or 3");
    return static_cast<Arm>(arm - 1);
}

py::array_t<double> grid_to_numpy(const ConeDataGrid& g) {
    py::array_t<double> out({static_cast<py::ssize_t>(3),
                             static_cast<py::ssize_t>(g.grids.y.n_y),
                             static_cast<py::ssize_t>(g.grids.phi.n_phi),
                             static_cast<py::ssize_t>(g.grids.s.n_s)});
    std::copy(g.data.begin(), g.data.end(), out.mutable_data());
    return out;
}

py::array_t<double> volume_to_numpy(const VolumeGrid& v) {
    py::array_t<double> out({static_cast<py::ssize_t>(v.spec.dims[0]),
                             static_cast<py::ssize_t>(v.spec.dims[1]),
                             static_cast<py::ssize_t>(v.spec.dims[2])});
    std::copy(v.values.begin(), v.values.end(), out.mutable_data());
    return out;
}

} // namespace

PYBIND11_MODULE(crtpy, m) {
    m.doc() = "Conical Radon transform on a tripod line detector: forward simulation, "
              "signal processing and exact staged inversion";

    py::register_exception<CrtError>(m, "CrtError");

    py::class_<PhantomSpec>(m, "Phantom")
        .def(py::init<>())
        .def_static("from_json",
                    [](const std::string& text) {
                        return phantom_from_json(nlohmann::json::parse(text));
                    },
                    py::arg("text"))
        .def_static("default_gaussian", &default_gaussian_phantom)
        .def("to_json", [](const PhantomSpec& p) { return phantom_to_json(p).dump(); })
        .def("validate_support", &validate_support)
        .def("__call__",
             [](const PhantomSpec& p, py::array_t<double, py::array::c_style> pts) {
                 if (pts.ndim() != 2 || pts.shape(1) != 3) {
                     throw OutOfRange("expected an (N, 3) array of points");
                 }
                 py::array_t<double> out(std::vector<py::ssize_t>{pts.shape(0)});
                 const double* in = pts.data();
                 double* o = out.mutable_data();
                 for (py::ssize_t i = 0; i < pts.shape(0); ++i) {
                     o[i] = eval_phantom(p, {in[3 * i], in[3 * i + 1], in[3 * i + 2]});
                 }
                 return out;
             },
             py::arg("points"))
        .def("analytic_radon",
             [](const PhantomSpec& p, const std::array<double, 3>& n, double s) {
                 return analytic_radon(p, normalized(to_vec3(n)), s);
             },
             py::arg("normal"), py::arg("s"))
        .def("__len__", [](const PhantomSpec& p) { return p.components.size(); });

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("n_ray", &QuadratureConfig::n_ray)
        .def_readwrite("n_phi_cone", &QuadratureConfig::n_phi_cone)
        .def_readwrite("n_plane", &QuadratureConfig::n_plane)
        .def_readwrite("omega_cap", &QuadratureConfig::omega_cap)
        .def_readwrite("n_omega", &QuadratureConfig::n_omega)
        .def_readwrite("n_phi_beta", &QuadratureConfig::n_phi_beta)
        .def_readwrite("sphere_polar", &QuadratureConfig::sphere_polar)
        .def_readwrite("sphere_azimuth", &QuadratureConfig::sphere_azimuth)
        .def_readwrite("n_theta_gc", &QuadratureConfig::n_theta_gc);

    py::class_<GridSet>(m, "GridSet")
        .def(py::init([](int n_y, int n_phi, int n_s, double s_min, double s_max) {
                 GridSet g;
                 g.y.n_y = n_y;
                 g.phi.n_phi = n_phi;
                 g.s.n_s = n_s;
                 g.s.s_min = s_min;
                 g.s.s_max = s_max;
                 return g;
             }),
             py::arg("n_y") = 129, py::arg("n_phi") = 128, py::arg("n_s") = 257,
             py::arg("s_min") = -1.25, py::arg("s_max") = 1.25)
        .def_property_readonly("n_y", [](const GridSet& g) { return g.y.n_y; })
        .def_property_readonly("n_phi", [](const GridSet& g) { return g.phi.n_phi; })
        .def_property_readonly("n_s", [](const GridSet& g) { return g.s.n_s; });

    py::class_<VolumeSpec>(m, "VolumeSpec")
        .def(py::init([](const std::array<double, 3>& origin, double spacing,
                         const std::array<int, 3>& dims) {
                 VolumeSpec vs;
                 vs.origin = to_vec3(origin);
                 vs.spacing = spacing;
                 vs.dims = dims;
                 return vs;
             }),
             py::arg("origin"), py::arg("spacing"), py::arg("dims"))
        .def_readonly("spacing", &VolumeSpec::spacing)
        .def_property_readonly("dims", [](const VolumeSpec& v) { return v.dims; })
        .def_property_readonly(
            "origin", [](const VolumeSpec& v) {
                return std::array<double, 3>{v.origin[0], v.origin[1], v.origin[2]};
            });

    py::class_<ConeDataGrid>(m, "ConeData")
        .def_readonly("k", &ConeDataGrid::k)
        .def_property_readonly("shape",
                               [](const ConeDataGrid& g) {
                                   return std::array<int, 4>{3, g.grids.y.n_y, g.grids.phi.n_phi,
                                                             g.grids.s.n_s};
                               })
        .def_property_readonly("array", &grid_to_numpy);

    py::class_<ProcessedGrid>(m, "ProcessedData")
        .def_readonly("k", &ProcessedGrid::k)
        .def_readonly("deriv_order", &ProcessedGrid::deriv_order)
        .def_property_readonly("array",
                               [](const ProcessedGrid& g) { return grid_to_numpy(g); });

    py::class_<VolumeGrid>(m, "Volume")
        .def_readonly("invalid_margin", &VolumeGrid::invalid_margin)
        .def_property_readonly("spec", [](const VolumeGrid& v) { return v.spec; })
        .def_property_readonly("array", &volume_to_numpy);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("rel_l2", &Metrics::rel_l2)
        .def_readonly("max_abs", &Metrics::max_abs)
        .def_readonly("psnr", &Metrics::psnr)
        .def("__repr__", [](const Metrics& mm) {
            return "Metrics(rel_l2=" + std::to_string(mm.rel_l2) +
                   ", max_abs=" + std::to_string(mm.max_abs) +
                   ", psnr=" + std::to_string(mm.psnr) + ")";
        });

    m.def("set_threads", [](int n) {
#ifdef CRT_HAVE_OPENMP
        if (n > 0) omp_set_num_threads(n);
#else
        (void)n;
#endif
    });

    m.def("ray_transform",
          [](const PhantomSpec& f, const std::array<double, 3>& u,
             const std::array<double, 3>& w, int k, const QuadratureConfig& q) {
              return ray_transform(f, to_vec3(u), to_vec3(w), WeightOrder(k), q);
          },
          py::arg("phantom"), py::arg("origin"), py::arg("direction"), py::arg("k") = 1,
          py::arg("quad") = QuadratureConfig{});

    m.def("cone_transform",
          [](const PhantomSpec& f, int arm, double y, double phi, double s, int k,
             const QuadratureConfig& q) {
              return cone_transform(f, Vertex{to_arm(arm), y}, phi, s, WeightOrder(k), q);
          },
          py::arg("phantom"), py::arg("arm"), py::arg("y"), py::arg("phi"), py::arg("s"),
          py::arg("k") = 1, py::arg("quad") = QuadratureConfig{});

    m.def("plane_transform",
          [](const PhantomSpec& f, const std::array<double, 3>& n, double s,
             const QuadratureConfig& q) {
              return plane_transform(f, normalized(to_vec3(n)), s, q);
          },
          py::arg("phantom"), py::arg("normal"), py::arg("s"),
          py::arg("quad") = QuadratureConfig{});

    m.def("simulate_cone_data",
          [](const PhantomSpec& f, const GridSet& grids, int k, const QuadratureConfig& q) {
              py::gil_scoped_release release;
              return simulate_cone_data(f, grids, WeightOrder(k), q);
          },
          py::arg("phantom"), py::arg("grids") = GridSet{}, py::arg("k") = 1,
          py::arg("quad") = QuadratureConfig{});

    m.def("process_cone_data", [](const ConeDataGrid& c) {
        py::gil_scoped_release release;
        return process_cone_data(c);
    });

    m.def("diff_y", [](const ProcessedGrid& g, int order) { return diff_y(g, order); },
          py::arg("data"), py::arg("order"));

    m.def("pk_eval",
          [](const ProcessedGrid& g, int arm, double y, const std::array<double, 3>& w,
             const QuadratureConfig& q) {
              return pk_eval(g, Vertex{to_arm(arm), y}, to_vec3(w), q);
          },
          py::arg("data"), py::arg("arm"), py::arg("y"), py::arg("direction"),
          py::arg("quad") = QuadratureConfig{});

    m.def("p1_eval",
          [](const ProcessedGrid& g, int arm, double y, const std::array<double, 3>& alpha,
             const QuadratureConfig& q) {
              return p1_eval(g, Vertex{to_arm(arm), y}, normalized(to_vec3(alpha)), q);
          },
          py::arg("data"), py::arg("arm"), py::arg("y"), py::arg("direction"),
          py::arg("quad") = QuadratureConfig{});

    m.def("rf_eval",
          [](const ProcessedGrid& g, const std::array<double, 3>& x,
             const std::array<double, 3>& n, const QuadratureConfig& q) {
              return rf_eval(g, to_vec3(x), normalized(to_vec3(n)), q);
          },
          py::arg("data"), py::arg("x"), py::arg("normal"),
          py::arg("quad") = QuadratureConfig{});

    m.def("reconstruct",
          [](const ConeDataGrid& c, const VolumeSpec& vs, const QuadratureConfig& q,
             bool direct) {
              py::gil_scoped_release release;
              const SphereGrid sphere = SphereGrid::product(q.sphere_polar, q.sphere_azimuth);
              return reconstruct(c, WeightOrder(c.k), vs, sphere, q,
                                 direct ? PipelineMode::direct : PipelineMode::tabulated);
          },
          py::arg("data"), py::arg("volume"), py::arg("quad") = QuadratureConfig{},
          py::arg("direct") = false);

    m.def("radon_invert_analytic",
          [](const PhantomSpec& f, const VolumeSpec& vs, int n_polar, int n_azimuth) {
              py::gil_scoped_release release;
              const SphereGrid sphere = SphereGrid::product(n_polar, n_azimuth);
              return radon_invert(
                  [&](const Vec3& n, double s) { return analytic_radon(f, n, s); }, vs, sphere);
          },
          py::arg("phantom"), py::arg("volume"), py::arg("n_polar") = 48,
          py::arg("n_azimuth") = 96);

    m.def("sample_phantom",
          [](const PhantomSpec& f, const VolumeSpec& vs) {
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
          },
          py::arg("phantom"), py::arg("volume"));

    m.def("metrics", &metrics, py::arg("recon"), py::arg("truth"));

    m.def("write_cone_data",
          [](const ConeDataGrid& g, const std::string& path) { write_crt(g, path); });
    m.def("read_cone_data", &read_cone_grid);
    m.def("write_volume", [](const VolumeGrid& v, const std::string& path) { write_crt(v, path); });
    m.def("read_volume", &read_volume);
}
