#pragma once

#include "cksf/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace cksf {

enum class PresetKind { two_blobs, uniform, custom };

/// Everything a single run needs. Defaults: 64x64 unit square, two_blobs,
/// alpha = -0.4, kappa = 1, t_end = 2.
struct RunConfig {
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;

    PresetKind preset = PresetKind::two_blobs;
    double blob_amplitude = 5.0;
    double blob_sigma = 0.08;
    double perturbation = 0.0;
    double uniform_n = 1.0;
    double uniform_c = 1.0;
    double uniform_m = 1.0;
    std::string n_file;
    std::string c_file;
    std::string m_file;

    SimParams params;

    long snapshot_every = 100;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    /// Threshold on max ||n||_inf / ||n0||_inf for the "bounded" label.
    double bounded_ratio = 10.0;
    long max_steps = 10'000'000;

    Grid2D grid() const { return Grid2D(nx, ny, lx, ly); }
    InitialPreset initial_preset() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, malformed
/// values and out-of-range values raise ConfigError with the line number.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Canonical text form with every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Cross-field validation; throws ConfigError (line 0) or InvalidArgument.
void validate_config(const RunConfig& config);

const char* to_string(PresetKind kind);

} // namespace cksf
