// Command-line driver for the conical Radon transform pipeline. Every run
// is parameterized by one JSON config; flags only select files and toggles.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "crt/config.hpp"
#include "crt/crt_io.hpp"
#include "crt/errors.hpp"
#include "crt/forward.hpp"
#include "crt/inversion.hpp"
#include "crt/phantom.hpp"
#include "crt/sigproc.hpp"

namespace {

using crt::Vec3;

Vec3 parse_vec3(const std::string& s) {
    Vec3 v;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v[0], &v[1], &v[2]) != 3) {
        throw crt::SchemaMismatch("expected a comma-separated 3-vector, got '" + s + "'");
    }
    return v;
}

int parse_slice_index(const std::string& spec) {
    int idx = -1;
    if (std::sscanf(spec.c_str(), "z=%d", &idx) != 1 || idx < 0) {
        throw crt::SchemaMismatch("expected a slice spec of the form z=IDX, got '" + spec + "'");
    }
    return idx;
}

void write_slice_csv(const crt::VolumeGrid& v, int z, const std::string& path) {
    if (z >= v.spec.dims[2]) throw crt::OutOfRange("slice index beyond the volume");
    std::ofstream out(path);
    if (!out) throw crt::CrtError("IoError", "cannot open '" + path + "' for writing");
    out << "# z=" << z << " dims=" << v.spec.dims[0] << "x" << v.spec.dims[1] << "\n";
    for (int j = 0; j < v.spec.dims[1]; ++j) {
        for (int i = 0; i < v.spec.dims[0]; ++i) {
            out << v.at(i, j, z) << (i + 1 < v.spec.dims[0] ? ',' : '\n');
        }
    }
}

void print_value(double value) {
    nlohmann::json j{{"value", value}};
    std::cout << j.dump() << "\n";
}

crt::VolumeGrid sample_truth(const crt::RunConfig& cfg) {
    crt::VolumeGrid truth;
    truth.spec = cfg.volume;
    truth.allocate();
    for (int i = 0; i < cfg.volume.dims[0]; ++i) {
        for (int j = 0; j < cfg.volume.dims[1]; ++j) {
            for (int l = 0; l < cfg.volume.dims[2]; ++l) {
                truth.at(i, j, l) = crt::eval_phantom(cfg.phantom, cfg.volume.voxel_center(i, j, l));
            }
        }
    }
    return truth;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const std::string& name) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
        if (!ok) ++failures;
    };

    bool const_ok = true;
    for (int k = 1; k <= 5; ++k) const_ok = const_ok && crt::constant_factorization_ok(k);
    check(const_ok, "constant factorization identity (k = 1..5)");

    // Hilbert kernel: transform of the all-ones line equals the closed-form
    // Hilbert transform of the interval indicator at interior nodes.
    {
        crt::SGrid sg;
        crt::HilbertKernel kernel(sg.n_s);
        std::vector<double> ones(sg.n_s, 1.0), out(sg.n_s);
        kernel.apply_line(ones.data(), out.data());
        double max_err = 0.0;
        for (int i = 1; i < sg.n_s - 1; ++i) {
            const double s = sg.s(i);
            const double expect = std::log(std::abs((s - sg.s_min) / (s - sg.s_max))) / crt::kPi;
            max_err = std::max(max_err, std::abs(out[i] - expect));
        }
        check(max_err < 1e-10, "Hilbert kernel all-ones identity");
    }

    // Geometry invariants.
    {
        std::mt19937 rng(20240811);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        bool ok = true;
        for (int trial = 0; trial < 10000 && ok; ++trial) {
            Vec3 x{uni(rng), uni(rng), uni(rng)};
            const double sum = x[0] + x[1] + x[2];
            if (sum > 1.0 - 1e-6) {
                const double sc = (1.0 - 1e-6) / sum * uni(rng);
                x = x * sc;
            }
            std::normal_distribution<double> gauss;
            Vec3 n{gauss(rng), gauss(rng), gauss(rng)};
            if (crt::norm(n) < 1e-3) continue;
            n = crt::normalized(n);
            const crt::Vertex v = crt::lambda_point(x, n);
            ok = ok && std::abs(crt::dot(x - crt::vertex_point(v), n)) < 1e-10;
            const crt::Frame f = crt::great_circle_frame(n);
            ok = ok && std::abs(crt::dot(f.e1, f.e2)) < 1e-12;
            ok = ok && crt::norm(crt::cross(f.e1, f.e2) - n) < 1e-12;
        }
        check(ok, "plane-vertex membership and frame orthonormality");
    }

    std::cout << (failures == 0 ? "selftest: all checks passed\n"
                                : "selftest: FAILURES detected\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conical Radon transform on a tripod detector: simulation and exact inversion"};
    app.require_subcommand(1);

    std::string config_path, in_path, out_path, truth_path, recon_path, json_out;
    std::string dump_dir, slice_spec, slice_out;
    bool process_dy = false;

    auto* cmd_phantom = app.add_subcommand("phantom", "Phantom utilities");
    cmd_phantom->require_subcommand(1);
    auto* cmd_phantom_gen = cmd_phantom->add_subcommand("gen", "Validate and emit the phantom spec");
    cmd_phantom_gen->add_option("--config", config_path)->required();
    cmd_phantom_gen->add_option("--out", out_path)->required();
    auto* cmd_phantom_sample =
        cmd_phantom->add_subcommand("sample", "Sample the phantom on the configured volume");
    cmd_phantom_sample->add_option("--config", config_path)->required();
    cmd_phantom_sample->add_option("--out", out_path)->required();

    auto* cmd_forward = app.add_subcommand("forward", "Simulate cone data");
    cmd_forward->add_option("--config", config_path)->required();
    cmd_forward->add_option("--out", out_path)->required();

    auto* cmd_process = app.add_subcommand("process", "Apply H_s d/ds (and optionally d/dy)");
    cmd_process->add_option("--in", in_path)->required();
    cmd_process->add_option("--out", out_path)->required();
    cmd_process->add_flag("--dy", process_dy, "also apply the k-1 y-derivatives");

    auto* cmd_invert = app.add_subcommand("invert", "Full reconstruction from cone data");
    cmd_invert->add_option("--config", config_path)->required();
    cmd_invert->add_option("--in", in_path)->required();
    cmd_invert->add_option("--out", out_path)->required();
    cmd_invert->add_option("--dump-stages", dump_dir, "directory for stage intermediates");
    cmd_invert->add_option("--slice", slice_spec, "export a z slice as CSV (z=IDX)");
    cmd_invert->add_option("--slice-out", slice_out, "CSV path for --slice");

    auto* cmd_oracle = app.add_subcommand("oracle", "Brute-force reference transforms");
    cmd_oracle->require_subcommand(1);
    std::string opt_u = "0,0,0", opt_w = "1,0,0", opt_n = "0,0,1";
    double opt_s = 0.0, opt_y = 0.0, opt_phi = 0.0;
    int opt_arm = 1;
    auto* cmd_oracle_ray = cmd_oracle->add_subcommand("ray", "Weighted ray transform");
    cmd_oracle_ray->add_option("--config", config_path)->required();
    cmd_oracle_ray->add_option("--u", opt_u, "ray origin x,y,z");
    cmd_oracle_ray->add_option("--w", opt_w, "ray direction x,y,z");
    auto* cmd_oracle_cone = cmd_oracle->add_subcommand("cone", "Conical Radon transform");
    cmd_oracle_cone->add_option("--config", config_path)->required();
    cmd_oracle_cone->add_option("--arm", opt_arm, "arm number 1..3");
    cmd_oracle_cone->add_option("--y", opt_y, "vertex parameter in [0,1]");
    cmd_oracle_cone->add_option("--phi", opt_phi, "axis angle");
    cmd_oracle_cone->add_option("--s", opt_s, "opening cosine");
    auto* cmd_oracle_plane = cmd_oracle->add_subcommand("plane", "Planar Radon transform");
    cmd_oracle_plane->add_option("--config", config_path)->required();
    cmd_oracle_plane->add_option("--n", opt_n, "plane normal x,y,z");
    cmd_oracle_plane->add_option("--s", opt_s, "plane offset");
    auto* cmd_oracle_ri =
        cmd_oracle->add_subcommand("radon-invert", "Invert analytic plane data on the volume");
    cmd_oracle_ri->add_option("--config", config_path)->required();
    cmd_oracle_ri->add_option("--out", out_path)->required();

    auto* cmd_compare = app.add_subcommand("compare", "Error metrics between two volumes");
    cmd_compare->add_option("--recon", recon_path)->required();
    cmd_compare->add_option("--truth", truth_path)->required();
    cmd_compare->add_option("--json", json_out, "write metrics to this JSON file");

    auto* cmd_slice = app.add_subcommand("slice", "Export a volume z slice as CSV");
    cmd_slice->add_option("--in", in_path)->required();
    cmd_slice->add_option("--slice", slice_spec, "z=IDX")->required();
    cmd_slice->add_option("--out", out_path)->required();

    auto* cmd_selftest = app.add_subcommand("selftest", "Built-in consistency checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_phantom_gen->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            for (const auto& warning : crt::validate_support(cfg.phantom)) {
                std::cerr << "warning: " << warning << "\n";
            }
            std::ofstream out(out_path);
            if (!out) throw crt::CrtError("IoError", "cannot open '" + out_path + "'");
            out << crt::phantom_to_json(cfg.phantom).dump(2) << "\n";
        } else if (cmd_phantom_sample->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            crt::write_crt(sample_truth(cfg), out_path);
        } else if (cmd_forward->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            crt::apply_thread_config(cfg);
            crt::ConeDataGrid g =
                crt::simulate_cone_data(cfg.phantom, cfg.grids, crt::WeightOrder(cfg.k), cfg.quad);
            g.config_hash = cfg.data_config_hash();
            crt::write_crt(g, out_path);
        } else if (cmd_process->parsed()) {
            const crt::ConeDataGrid g = crt::read_cone_grid(in_path);
            crt::ProcessedGrid p = crt::process_cone_data(g);
            if (process_dy) p = crt::diff_y(p, g.k - 1);
            crt::write_crt(p, out_path);
        } else if (cmd_invert->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            crt::apply_thread_config(cfg);
            const crt::ConeDataGrid g = crt::read_cone_grid(in_path);
            if (g.k != cfg.k) {
                throw crt::SchemaMismatch("config k=" + std::to_string(cfg.k) +
                                          " but data file was simulated with k=" +
                                          std::to_string(g.k));
            }
            const crt::SphereGrid sphere =
                crt::SphereGrid::product(cfg.sphere_polar, cfg.sphere_azimuth);
            if (!dump_dir.empty()) {
                std::filesystem::create_directories(dump_dir);
                const crt::ProcessedGrid proc = crt::process_cone_data(g);
                crt::write_crt(proc, dump_dir + "/processed.crt");
                const crt::ProcessedGrid proc_dy = crt::diff_y(proc, g.k - 1);
                crt::write_crt(proc_dy, dump_dir + "/processed_dy.crt");
                const crt::VolumeGrid b = crt::backproject(proc_dy, cfg.volume, sphere, cfg.quad,
                                                           cfg.mode);
                crt::write_crt(b, dump_dir + "/backprojection.crt");
            }
            const crt::VolumeGrid f = crt::reconstruct(g, crt::WeightOrder(cfg.k), cfg.volume,
                                                       sphere, cfg.quad, cfg.mode);
            crt::write_crt(f, out_path);
            if (!slice_spec.empty()) {
                if (slice_out.empty()) throw crt::SchemaMismatch("--slice requires --slice-out");
                write_slice_csv(f, parse_slice_index(slice_spec), slice_out);
            }
        } else if (cmd_oracle_ray->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            print_value(crt::ray_transform(cfg.phantom, parse_vec3(opt_u), parse_vec3(opt_w),
                                           crt::WeightOrder(cfg.k), cfg.quad));
        } else if (cmd_oracle_cone->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            if (opt_arm < 1 || opt_arm > 3) throw crt::OutOfRange("--arm must be 1..3");
            const crt::Vertex v{static_cast<crt::Arm>(opt_arm - 1), opt_y};
            print_value(crt::cone_transform(cfg.phantom, v, opt_phi, opt_s,
                                            crt::WeightOrder(cfg.k), cfg.quad));
        } else if (cmd_oracle_plane->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            print_value(crt::plane_transform(cfg.phantom, crt::normalized(parse_vec3(opt_n)),
                                             opt_s, cfg.quad));
        } else if (cmd_oracle_ri->parsed()) {
            const crt::RunConfig cfg = crt::load_config(config_path);
            crt::apply_thread_config(cfg);
            const crt::SphereGrid sphere =
                crt::SphereGrid::product(cfg.sphere_polar, cfg.sphere_azimuth);
            const auto rf = [&](const Vec3& n, double s) {
                return crt::analytic_radon(cfg.phantom, n, s);
            };
            crt::write_crt(crt::radon_invert(rf, cfg.volume, sphere), out_path);
        } else if (cmd_compare->parsed()) {
            const crt::VolumeGrid recon = crt::read_volume(recon_path);
            const crt::VolumeGrid truth = crt::read_volume(truth_path);
            const crt::Metrics m = crt::metrics(recon, truth);
            nlohmann::json j{{"rel_l2", m.rel_l2}, {"max_abs", m.max_abs}, {"psnr", m.psnr}};
            std::cout << j.dump(2) << "\n";
            if (!json_out.empty()) {
                std::ofstream out(json_out);
                if (!out) throw crt::CrtError("IoError", "cannot open '" + json_out + "'");
                out << j.dump(2) << "\n";
            }
        } else if (cmd_slice->parsed()) {
            write_slice_csv(crt::read_volume(in_path), parse_slice_index(slice_spec), out_path);
        } else if (cmd_selftest->parsed()) {
            return run_selftest();
        }
    } catch (const crt::CrtError& e) {
        nlohmann::json j{{"error", {{"type", e.code()}, {"message", e.what()}}}};
        std::cerr << j.dump() << "\n";
        const std::string& c = e.code();
        const bool schema = c == "SchemaMismatch" || c == "BadMagic" || c == "CrcMismatch" ||
                            c == "SpecMismatch";
        return schema ? 2 : 1;
    } catch (const std::exception& e) {
        nlohmann::json j{{"error", {{"type", "Internal"}, {"message", e.what()}}}};
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return 0;
}
