#pragma once

#include <string>

#include "hnkdv/config.hpp"

namespace hnkdv {

inline constexpr const char* kToolName = "hnkdv-control";
inline constexpr const char* kToolVersion = "1.0.0";

struct RunOptions {
    std::string output_dir;  // empty: fall back to config output_dir, then "."
    int workers = 1;
    bool verbose = false;
};

// Each driver writes its artifacts into the output directory and throws
// ConfigError / NumericalError on failure (reports are still written when
// the failure is a diagnosed numerical outcome).
void cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts);
void cmd_saturation(const ExperimentConfig& cfg, const RunOptions& opts);
void cmd_check_a1(const ExperimentConfig& cfg, const RunOptions& opts);
void cmd_gramian(const ExperimentConfig& cfg, const RunOptions& opts);
void cmd_converge_tau(const ExperimentConfig& cfg, const RunOptions& opts);
void cmd_fixed_time(const ExperimentConfig& cfg, const RunOptions& opts);

} // namespace hnkdv
