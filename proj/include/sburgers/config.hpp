#pragma once

#include "sburgers/heat_kernel.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/solver.hpp"
#include "sburgers/stationary.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sburgers {

/// Initial datum of a simulation: zero, a single scaled mode, or a random
/// field with coefficients N(0,1) k^-1 rescaled to the requested L2 norm.
struct InitialCondition {
    enum class Kind { zero, mode, random };
    Kind kind = Kind::zero;
    std::size_t mode = 1;
    double amplitude = 1.0;  ///< coefficient (mode) or |u0|_2 (random)
    std::uint64_t seed = 7;

    SpectralField build(std::size_t n_modes) const;
};

struct SimulateBlock {
    double t0 = 0.0;
    double t1 = 1.0;
    InitialCondition u0;
    bool write_coefficients = false;  ///< append a1..an columns to the CSV
};

struct PullbackBlock {
    std::vector<double> schedule{1, 2, 4, 8, 12, 16};
    double tol = 1e-9;
    double horizon = 1.0;
    double gap_limit = 1e-6;  ///< the last gap must not exceed this
};

struct ContractionBlock {
    double horizon = 4.0;
    double separation = 1.0;  ///< |u0_a - u0_b|_2
    double slack_fraction = 0.1;
    std::size_t decay_run = 10;
};

struct LyapunovBlock {
    double horizon = 4.0;
    std::size_t renorm_every = 10;
    double transient = 1.0;
    double fd_eps = 1e-5;
    double fd_horizon = 1.0;
    double fd_tolerance = 1e-3;
};

struct MomentsBlock {
    std::size_t ensemble = 500;
    std::vector<double> times{2, 4, 8};
    std::vector<int> powers{1, 2};
};

struct OracleBlock {
    std::size_t n_modes = 16;
    double horizon = 0.25;
    std::size_t seeds = 10;
    double u0_norm = 1.0;
    std::size_t max_iterations = 200;
    double budget_factor = 5.0;
    double kernel_t_min = 0.01;
    double kernel_t_max = 1.0;
    std::size_t kernel_n_t = 25;
    std::size_t kernel_n_xy = 101;
};

/// Fully resolved run configuration. Every report embeds to_json() of it.
struct RunConfig {
    std::string preset;  ///< empty when no preset was applied
    double nu = 1.0;
    NoiseProfile sigma_profile = NoiseProfile::power_decay(0.1, 1.0);
    std::size_t n_modes = 64;
    double h = 1e-3;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::etd2_heun;
    bool dealias = true;
    std::size_t record_every = 10;
    double gamma = kDefaultGamma;

    SimulateBlock simulate;
    PullbackBlock pullback;
    ContractionBlock contraction;
    LyapunovBlock lyapunov;
    MomentsBlock moments;
    OracleBlock oracle;

    SolverConfig solver() const;
    NoiseSpec noise() const { return NoiseSpec::from_profile(sigma_profile, n_modes); }
    PullbackOptions pullback_options() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Names accepted by --preset.
const std::vector<std::string>& preset_names();
/// Overwrites the physical parameters with the named preset. Throws ConfigError
/// on an unknown name.
void apply_preset(RunConfig& cfg, const std::string& name);

nlohmann::json to_json(const RunConfig& cfg);
/// Merges the keys of `j` into cfg. Unknown keys and wrong types throw
/// ConfigError with the JSON path of the field.
void merge_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig from_json(const nlohmann::json& j);

/// Reads a JSON config file. Parse errors throw ConfigError with line and column.
nlohmann::json read_json_file(const std::string& path);

/// SHA-256 hex digest of the canonical (sorted-key, compact) JSON form.
std::string config_hash(const RunConfig& cfg);
std::string sha256_hex(const std::string& bytes);

} // namespace sburgers
