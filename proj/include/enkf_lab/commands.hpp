#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "enkf_lab/experiments.hpp"

namespace enkf_lab {

enum class OutputFormat { csv, svg, both };

OutputFormat parse_format(const std::string& text);

struct OutputOptions {
    std::filesystem::path out_dir = ".";
    OutputFormat format = OutputFormat::both;

    bool csv() const noexcept { return format != OutputFormat::svg; }
    bool svg() const noexcept { return format != OutputFormat::csv; }
};

/// Column headers of the emitted tables.
const std::vector<std::string>& trajectory_header();
const std::vector<std::string>& run_header();
const std::vector<std::string>& sweep_header();
const std::vector<std::string>& summary_header();

/// Lorenz trajectory from truth_init over trajectory_horizon, one row per
/// RK4 step (dt / rk4_substeps): trajectory.csv and an x–z projection
/// trajectory.svg. Returns the written paths.
std::vector<std::filesystem::path> cmd_trajectory(const TwinExperimentConfig& config,
                                                  const OutputOptions& out);

/// One twin run: run_N{N}_seed{seed}.csv (17 columns) and a three-panel
/// run_N{N}_seed{seed}.svg of prediction/analysis absolute errors. Nothing
/// is written if the run diverges.
std::vector<std::filesystem::path> cmd_run(const TwinExperimentConfig& config, std::size_t n_members,
                                           std::uint64_t seed, const OutputOptions& out);

/// Ensemble-size sweep: sweep.csv (N, seed, final running mean error),
/// summary.csv (N, median, IQR), sweep_curves.csv (per-step medians) and
/// sweep.svg. Failed cells are left empty and described in warnings.txt.
std::vector<std::filesystem::path> cmd_sweep(const TwinExperimentConfig& config,
                                             const OutputOptions& out);

/// Re-renders the SVG for a trajectory.csv, run_*.csv or sweep_curves.csv.
std::vector<std::filesystem::path> cmd_plot(const std::filesystem::path& input,
                                            const OutputOptions& out);

}  // namespace enkf_lab
