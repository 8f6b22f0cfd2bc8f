#include "crt/config.hpp"

#include <fstream>

#include "crt/errors.hpp"
#include "crt/hash.hpp"

#ifdef CRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace crt {

namespace {

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!j.is_object()) throw SchemaMismatch(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) known = known || it.key() == k;
        if (!known) throw SchemaMismatch(where + ": unknown key '" + it.key() + "'");
    }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

} // namespace

std::uint64_t RunConfig::data_config_hash() const {
    nlohmann::json j;
    j["k"] = k;
    j["grids"] = {{"n_y", grids.y.n_y},
                  {"n_phi", grids.phi.n_phi},
                  {"n_s", grids.s.n_s},
                  {"s_min", grids.s.s_min},
                  {"s_max", grids.s.s_max}};
    j["quadrature"] = {{"n_ray", quad.n_ray}, {"n_phi_cone", quad.n_phi_cone}};
    return fnv1a64(j.dump());
}

RunConfig config_from_json(const nlohmann::json& j) {
    check_keys(j,
               {"phantom", "k", "grids", "quadrature", "volume", "sphere", "threads", "pipeline"},
               "config");
    RunConfig c;
    if (!j.contains("phantom")) throw SchemaMismatch("config: missing 'phantom'");
    c.phantom = phantom_from_json(j.at("phantom"));
    c.k = get_or(j, "k", 1);
    if (c.k < 1) throw SchemaMismatch("config: k must be >= 1");

    if (j.contains("grids")) {
        const auto& g = j.at("grids");
        check_keys(g, {"n_y", "n_phi", "n_s", "s_min", "s_max"}, "config.grids");
        c.grids.y.n_y = get_or(g, "n_y", c.grids.y.n_y);
        c.grids.phi.n_phi = get_or(g, "n_phi", c.grids.phi.n_phi);
        c.grids.s.n_s = get_or(g, "n_s", c.grids.s.n_s);
        c.grids.s.s_min = get_or(g, "s_min", c.grids.s.s_min);
        c.grids.s.s_max = get_or(g, "s_max", c.grids.s.s_max);
    }
    if (j.contains("quadrature")) {
        const auto& q = j.at("quadrature");
        check_keys(q,
                   {"n_ray", "n_phi_cone", "n_plane", "omega_cap", "n_omega", "n_phi_beta",
                    "n_theta_gc"},
                   "config.quadrature");
        c.quad.n_ray = get_or(q, "n_ray", c.quad.n_ray);
        c.quad.n_phi_cone = get_or(q, "n_phi_cone", c.quad.n_phi_cone);
        c.quad.n_plane = get_or(q, "n_plane", c.quad.n_plane);
        c.quad.omega_cap = get_or(q, "omega_cap", c.quad.omega_cap);
        c.quad.n_omega = get_or(q, "n_omega", c.quad.n_omega);
        c.quad.n_phi_beta = get_or(q, "n_phi_beta", c.quad.n_phi_beta);
        c.quad.n_theta_gc = get_or(q, "n_theta_gc", c.quad.n_theta_gc);
    }
    if (j.contains("sphere")) {
        const auto& s = j.at("sphere");
        check_keys(s, {"n_polar", "n_azimuth"}, "config.sphere");
        c.sphere_polar = get_or(s, "n_polar", c.sphere_polar);
        c.sphere_azimuth = get_or(s, "n_azimuth", c.sphere_azimuth);
    }
    c.quad.sphere_polar = c.sphere_polar;
    c.quad.sphere_azimuth = c.sphere_azimuth;
    if (j.contains("volume")) {
        const auto& v = j.at("volume");
        check_keys(v, {"origin", "spacing", "dims"}, "config.volume");
        if (v.contains("origin")) {
            const auto& o = v.at("origin");
            if (!o.is_array() || o.size() != 3) {
                throw SchemaMismatch("config.volume.origin: expected a 3-vector");
            }
            c.volume.origin = {o[0].get<double>(), o[1].get<double>(), o[2].get<double>()};
        }
        c.volume.spacing = get_or(v, "spacing", c.volume.spacing);
        if (v.contains("dims")) {
            const auto& d = v.at("dims");
            if (!d.is_array() || d.size() != 3) {
                throw SchemaMismatch("config.volume.dims: expected three counts");
            }
            c.volume.dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
        }
    }
    c.threads = get_or(j, "threads", 0);
    if (j.contains("pipeline")) {
        const std::string mode = j.at("pipeline").get<std::string>();
        if (mode == "tabulated") {
            c.mode = PipelineMode::tabulated;
        } else if (mode == "direct") {
            c.mode = PipelineMode::direct;
        } else {
            throw SchemaMismatch("config.pipeline must be 'tabulated' or 'direct'");
        }
    }
    c.grids.validate(c.k);
    c.quad.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CrtError("IoError", "cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaMismatch("config '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["phantom"] = phantom_to_json(c.phantom);
    j["k"] = c.k;
    j["grids"] = {{"n_y", c.grids.y.n_y},
                  {"n_phi", c.grids.phi.n_phi},
                  {"n_s", c.grids.s.n_s},
                  {"s_min", c.grids.s.s_min},
                  {"s_max", c.grids.s.s_max}};
    j["quadrature"] = {{"n_ray", c.quad.n_ray},
                       {"n_phi_cone", c.quad.n_phi_cone},
                       {"n_plane", c.quad.n_plane},
                       {"omega_cap", c.quad.omega_cap},
                       {"n_omega", c.quad.n_omega},
                       {"n_phi_beta", c.quad.n_phi_beta},
                       {"n_theta_gc", c.quad.n_theta_gc}};
    j["sphere"] = {{"n_polar", c.sphere_polar}, {"n_azimuth", c.sphere_azimuth}};
    j["volume"] = {{"origin", {c.volume.origin[0], c.volume.origin[1], c.volume.origin[2]}},
                   {"spacing", c.volume.spacing},
                   {"dims", {c.volume.dims[0], c.volume.dims[1], c.volume.dims[2]}}};
    j["threads"] = c.threads;
    j["pipeline"] = c.mode == PipelineMode::tabulated ? "tabulated" : "direct";
    return j;
}

void apply_thread_config(const RunConfig& c) {
#ifdef CRT_HAVE_OPENMP
    if (c.threads > 0) omp_set_num_threads(c.threads);
#else
    (void)c;
#endif
}

} // namespace crt
