#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hnkdv {

// One retained spatial mode of an initial or target state.
struct ModeAmplitude {
    int mode = 0;
    double sin_c = 0.0;
    double cos_c = 0.0;
    bool operator==(const ModeAmplitude&) const = default;
};

// Fixed-horizon steering knobs (optional [fixed_time] table).
struct FixedTimeConfig {
    double t_total = 1.0;
    double tau = 0.025;
    double drift_budget = 2.5;
    int max_segments = 8;
    bool operator==(const FixedTimeConfig&) const = default;
};

// Optional [simulate] table.
struct SimulateConfig {
    bool nonlinearity = true;
    bool operator==(const SimulateConfig&) const = default;
};

// Optional [saturation] table.
struct SaturationConfig {
    int cutoff = 6;
    int k_max = 8;
    bool operator==(const SaturationConfig&) const = default;
};

// Full experiment description.  Parsed from a strict key/value file with
// one level of named tables; unknown keys are errors, missing keys take
// the canonical defaults below.
struct ExperimentConfig {
    int j = 1;
    int s = 0;
    std::int64_t seed = 42;
    std::string output_dir;
    std::vector<int> modes = {1};
    std::vector<double> tau_ladder = {0.4, 0.2, 0.1, 0.05};

    int grid_n = 64;           // [grid] N
    int grid_m = 192;          // [grid] M

    double horizon = 1.0;      // [time] T
    int n_steps = 2000;        // [time] n_steps

    int depth = 3;             // [trajectory]
    double amplitude = 1.0;

    int n_time_cells = 32;     // [control]
    std::vector<double> gamma_ladder = {1e-2, 1e-4, 1e-6, 1e-8};
    int rank_cutoff = 0;       // 0: full dof
    int target_cutoff = 8;

    std::vector<ModeAmplitude> u0 = {{1, 0.5, 0.0}};
    std::vector<ModeAmplitude> u1 = {{1, 0.0, 0.5}, {2, 0.2, 0.0}};

    FixedTimeConfig fixed_time;
    SimulateConfig simulate;
    SaturationConfig saturation;

    bool operator==(const ExperimentConfig&) const = default;

    // Throws ConfigError naming the offending field on schema violations.
    void validate() const;
    // Canonical text form; parse(serialize(c)) == c.
    std::string serialize() const;
    std::uint64_t hash() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

} // namespace hnkdv
