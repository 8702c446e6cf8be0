#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "equispec/domain.hpp"

namespace equispec {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { spectrum, classify, derivative, split, sweep, oracle_check };

const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct DerivativeParams {
    std::vector<FourierMode> field_modes;
    int cluster_index = 1;
    bool second_order = true;
    double fd_t = 1e-4;   // step for first-order validation
    double fd_t2 = 5e-3;  // step for second-order validation
};

struct SplitParams {
    int cluster_index = 1;
    int k_max = -1; // default 4p
    double t = 1e-2;
};

struct SweepParams {
    double cutoff = 40.0;
    int trials = 20;
    double amplitude = 1e-2;
    int k_max = -1; // default 4p
};

struct OracleParams {
    std::string shape = "disk"; // disk | rectangle
    double radius = 1.0;
    double lx = M_PI, ly = M_PI;
    int count = 20;
    bool compare_fem = false;
};

struct ExperimentConfig {
    GroupKind group_kind = GroupKind::cyclic;
    int group_p = 2;
    double r0 = 1.0;
    std::vector<FourierMode> domain_modes;
    double h_target = 0.05;
    int num_eigs = 16;
    std::optional<double> cluster_tol; // default: fem_cluster_tol(h)
    ExperimentKind kind = ExperimentKind::spectrum;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    bool verbose = false;

    DerivativeParams derivative;
    SplitParams split;
    SweepParams sweep;
    OracleParams oracle;
};

/// Strict parse: unknown keys anywhere are config-invalid errors.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Run the configured experiment, writing reports into the output directory.
/// Returns 0 on success (errors surface as equispec::Error).
int run_experiment(const ExperimentConfig& config);

} // namespace equispec
