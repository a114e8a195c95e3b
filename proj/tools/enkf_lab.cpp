// enkf-lab: Lorenz 63 twin experiments with the perturbed-observation EnKF.
//
//   enkf-lab trajectory [--config FILE] [--out DIR] [--format csv|svg|both]
//   enkf-lab run        [--config FILE] [--seed S] [-N SIZE] [--out DIR] [--format ...]
//   enkf-lab sweep      [--config FILE] [--seed S] [--out DIR] [--format ...]
//   enkf-lab plot       --input FILE.csv [--out DIR]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "enkf_lab/commands.hpp"
#include "enkf_lab/config.hpp"
#include "enkf_lab/csv.hpp"

namespace {

struct SharedFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string format = "both";
};

void add_shared_flags(CLI::App* cmd, SharedFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (key = value lines)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", flags.seed, "Base seed (unsigned 64-bit decimal)");
    cmd->add_option("--out", flags.out_dir, "Output directory, created if absent")
        ->capture_default_str();
    cmd->add_option("--format", flags.format, "Outputs to write")
        ->check(CLI::IsMember({"csv", "svg", "both"}))
        ->capture_default_str();
}

enkf_lab::TwinExperimentConfig load_config(const SharedFlags& flags) {
    if (flags.config_path.empty()) return {};
    return enkf_lab::parse_config(enkf_lab::read_file(flags.config_path));
}

enkf_lab::OutputOptions output_options(const SharedFlags& flags) {
    return {flags.out_dir, enkf_lab::parse_format(flags.format)};
}

void report(const std::vector<std::filesystem::path>& paths) {
    for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble Kalman filter twin experiments on the Lorenz 63 system", "enkf-lab"};
    app.require_subcommand(1);
    app.footer(enkf_lab::config_help());

    SharedFlags flags;
    std::size_t ensemble_size = 0;
    std::string plot_input;

    auto* trajectory = app.add_subcommand("trajectory", "Integrate and plot the Lorenz 63 trajectory");
    add_shared_flags(trajectory, flags);

    auto* run = app.add_subcommand("run", "One twin experiment: per-step errors for one (N, seed)");
    add_shared_flags(run, flags);
    run->add_option("-N,--ensemble-size", ensemble_size,
                    "Ensemble size (default: first of ensemble_sizes)");

    auto* sweep = app.add_subcommand("sweep", "Compare ensemble sizes over a seed population");
    add_shared_flags(sweep, flags);

    auto* plot = app.add_subcommand("plot", "Render the SVG for a previously written CSV");
    add_shared_flags(plot, flags);
    plot->add_option("--input", plot_input, "trajectory.csv, run_*.csv or sweep_curves.csv")
        ->required()
        ->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        enkf_lab::TwinExperimentConfig config = load_config(flags);
        const enkf_lab::OutputOptions out = output_options(flags);

        if (trajectory->parsed()) {
            report(enkf_lab::cmd_trajectory(config, out));
        } else if (run->parsed()) {
            const std::size_t n = ensemble_size ? ensemble_size : config.ensemble_sizes.front();
            const std::uint64_t seed = flags.seed.value_or(config.seeds.front());
            report(enkf_lab::cmd_run(config, n, seed, out));
        } else if (sweep->parsed()) {
            if (flags.seed) config.seeds = enkf_lab::TwinExperimentConfig::default_seeds(*flags.seed);
            report(enkf_lab::cmd_sweep(config, out));
        } else if (plot->parsed()) {
            report(enkf_lab::cmd_plot(plot_input, out));
        }
    } catch (const std::exception& e) {
        std::cerr << "enkf-lab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
