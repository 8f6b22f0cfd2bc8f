#pragma once

#include <string>

#include "crt/forward.hpp"
#include "crt/inversion.hpp"
#include "crt/phantom.hpp"

#include "json.hpp"

namespace crt {

/// One JSON document drives a whole run; command-line flags only select
/// files and toggles. Unknown keys are rejected.
struct RunConfig {
    PhantomSpec phantom;
    int k = 1;
    GridSet grids;
    QuadratureConfig quad;
    VolumeSpec volume{{0.075, 0.075, 0.075}, 1.0 / 128.0, {32, 32, 32}};
    int sphere_polar = 48;
    int sphere_azimuth = 96;
    int threads = 0; // 0 = library default
    PipelineMode mode = PipelineMode::tabulated;

    /// Hash over everything that shapes simulated data (k, grids, quadrature).
    std::uint64_t data_config_hash() const;
};

RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& c);

/// Applies the configured thread count to the compute kernels.
void apply_thread_config(const RunConfig& c);

} // namespace crt
