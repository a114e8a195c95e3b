#include "enkf_lab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <string_view>

#include "enkf_lab/csv.hpp"
#include "enkf_lab/dynamics.hpp"
#include "enkf_lab/svg.hpp"

namespace enkf_lab {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kCurvePrefix = "median_running_mean_err_N";

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string());
}

std::vector<double> column(const CsvTable& table, std::size_t c) {
    std::vector<double> values;
    values.reserve(table.rows.size());
    for (const auto& row : table.rows) values.push_back(parse_number(row[c]));
    return values;
}

void append_xyz(std::vector<std::string>& row, const Vector& v) {
    for (std::size_t i = 0; i < 3; ++i) row.push_back(format_number(v[i]));
}

std::string trajectory_svg(const CsvTable& table) {
    return emit_svg({Curve{"Lorenz 63", column(table, 1), column(table, 3)}},
                    {"Trajectory of Lorenz 63 Model", "x", "z"});
}

std::string run_title(std::size_t n_members, std::uint64_t seed) {
    return std::to_string(n_members) + " ensemble members, seed " + std::to_string(seed);
}

// Recovers the title cmd_run used from a run_N{N}_seed{seed} file name.
std::string run_title_from_stem(const std::string& stem) {
    unsigned long long n = 0, seed = 0;
    char tail = 0;
    if (std::sscanf(stem.c_str(), "run_N%llu_seed%llu%c", &n, &seed, &tail) == 2) return run_title(n, seed);
    return stem;
}

std::string run_svg(const CsvTable& table, const std::string& title) {
    const std::vector<double> steps = column(table, 0);
    const char* dims[3] = {"x", "y", "z"};
    std::vector<Panel> panels;
    for (std::size_t d = 0; d < 3; ++d) {
        panels.push_back(Panel{{std::string("Absolute error in the ensemble mean: ") + dims[d],
                                "Steps", dims[d]},
                               {Curve{"Prediction", steps, column(table, 10 + d)},
                                Curve{"Analysis", steps, column(table, 13 + d)}}});
    }
    return emit_svg_panels(panels, title);
}

std::string sweep_svg(const CsvTable& curves) {
    const std::vector<double> steps = column(curves, 0);
    std::vector<Curve> lines;
    for (std::size_t c = 1; c < curves.header.size(); ++c) {
        const std::string n = curves.header[c].substr(kCurvePrefix.size());
        lines.push_back(Curve{n + " Ensemble", steps, column(curves, c)});
    }
    return emit_svg(lines, {"Mean difference between truth and analysis mean", "Steps", "Difference"});
}

}  // namespace

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "svg") return OutputFormat::svg;
    if (text == "both") return OutputFormat::both;
    throw InvalidInput("unknown format '" + text + "' (expected csv, svg or both)");
}

const std::vector<std::string>& trajectory_header() {
    static const std::vector<std::string> h{"t", "x", "y", "z"};
    return h;
}

const std::vector<std::string>& run_header() {
    static const std::vector<std::string> h{
        "step",           "truth_x",        "truth_y",        "truth_z",        "pred_mean_x",
        "pred_mean_y",    "pred_mean_z",    "anal_mean_x",    "anal_mean_y",    "anal_mean_z",
        "abs_pred_err_x", "abs_pred_err_y", "abs_pred_err_z", "abs_anal_err_x", "abs_anal_err_y",
        "abs_anal_err_z", "running_mean_err"};
    return h;
}

const std::vector<std::string>& sweep_header() {
    static const std::vector<std::string> h{"N", "seed", "final_running_mean_err"};
    return h;
}

const std::vector<std::string>& summary_header() {
    static const std::vector<std::string> h{"N", "median", "iqr"};
    return h;
}

std::vector<fs::path> cmd_trajectory(const TwinExperimentConfig& config, const OutputOptions& out) {
    validate(config);
    ensure_dir(out.out_dir);

    const double h = config.dt / static_cast<double>(config.rk4_substeps);
    const auto count = static_cast<std::size_t>(std::llround(config.trajectory_horizon / h));
    const DriftFunction drift = lorenz_drift_function(config.lorenz);

    CsvTable table{trajectory_header(), {}};
    Vector state = config.truth_init;
    for (std::size_t k = 0; k <= count; ++k) {
        if (k > 0) state = integrate_rk4(drift, state, h, 1);
        std::vector<std::string> row{format_number(static_cast<double>(k) * h)};
        append_xyz(row, state);
        table.rows.push_back(std::move(row));
    }

    std::vector<fs::path> written;
    if (out.csv()) {
        written.push_back(out.out_dir / "trajectory.csv");
        write_file_atomic(written.back(), render_csv(table));
    }
    if (out.svg()) {
        written.push_back(out.out_dir / "trajectory.svg");
        write_file_atomic(written.back(), trajectory_svg(table));
    }
    return written;
}

std::vector<fs::path> cmd_run(const TwinExperimentConfig& config, std::size_t n_members,
                              std::uint64_t seed, const OutputOptions& out) {
    const std::string stem = "run_N" + std::to_string(n_members) + "_seed" + std::to_string(seed);
    const fs::path csv_path = out.out_dir / (stem + ".csv");
    const fs::path svg_path = out.out_dir / (stem + ".svg");

    MetricSeries series;
    try {
        series = run_twin(config, n_members, seed);
    } catch (const DivergenceError&) {
        std::error_code ec;
        fs::remove(csv_path, ec);
        fs::remove(svg_path, ec);
        throw;
    }
    ensure_dir(out.out_dir);

    CsvTable table{run_header(), {}};
    for (std::size_t j = 0; j < series.steps(); ++j) {
        std::vector<std::string> row{std::to_string(j + 1)};
        append_xyz(row, series.truth[j]);
        append_xyz(row, series.pred_mean[j]);
        append_xyz(row, series.anal_mean[j]);
        append_xyz(row, series.abs_pred_err[j]);
        append_xyz(row, series.abs_anal_err[j]);
        row.push_back(format_number(series.running_mean_err[j]));
        table.rows.push_back(std::move(row));
    }

    std::vector<fs::path> written;
    if (out.csv()) {
        write_file_atomic(csv_path, render_csv(table));
        written.push_back(csv_path);
    }
    if (out.svg()) {
        write_file_atomic(svg_path, run_svg(table, run_title(n_members, seed)));
        written.push_back(svg_path);
    }
    return written;
}

std::vector<fs::path> cmd_sweep(const TwinExperimentConfig& config, const OutputOptions& out) {
    const SweepResult result = sweep_ensemble_sizes(config);
    ensure_dir(out.out_dir);

    CsvTable cells{sweep_header(), {}};
    std::string warnings;
    for (const SweepCell& cell : result.cells) {
        cells.rows.push_back({std::to_string(cell.ensemble_size), std::to_string(cell.seed),
                              cell.series ? format_number(cell.series->final_running_mean_err()) : ""});
        if (!cell.series)
            warnings += "N=" + std::to_string(cell.ensemble_size) + " seed=" +
                        std::to_string(cell.seed) + ": " + cell.error + "\n";
    }

    CsvTable summary{summary_header(), {}};
    CsvTable curves{{"step"}, {}};
    for (const SweepSummary& s : result.summaries) {
        const bool any = s.completed > 0;
        summary.rows.push_back({std::to_string(s.ensemble_size), any ? format_number(s.median) : "",
                                any ? format_number(s.iqr) : ""});
        if (any) curves.header.push_back(std::string(kCurvePrefix) + std::to_string(s.ensemble_size));
    }
    for (std::size_t j = 0; j < config.steps; ++j) {
        std::vector<std::string> row{std::to_string(j + 1)};
        for (const SweepSummary& s : result.summaries)
            if (s.completed > 0) row.push_back(format_number(s.median_curve[j]));
        curves.rows.push_back(std::move(row));
    }

    std::vector<fs::path> written;
    auto write = [&](const char* name, const std::string& contents) {
        written.push_back(out.out_dir / name);
        write_file_atomic(written.back(), contents);
    };
    if (out.csv()) {
        write("sweep.csv", render_csv(cells));
        write("summary.csv", render_csv(summary));
        write("sweep_curves.csv", render_csv(curves));
    }
    if (out.svg() && curves.header.size() > 1) write("sweep.svg", sweep_svg(curves));
    if (!warnings.empty()) write("warnings.txt", warnings);
    return written;
}

std::vector<fs::path> cmd_plot(const fs::path& input, const OutputOptions& out) {
    const CsvTable table = parse_csv(read_file(input));
    if (table.rows.empty()) throw InvalidInput("plot: " + input.string() + " has no data rows");
    ensure_dir(out.out_dir);

    fs::path target;
    std::string svg;
    if (table.header == trajectory_header()) {
        target = out.out_dir / "trajectory.svg";
        svg = trajectory_svg(table);
    } else if (table.header == run_header()) {
        target = out.out_dir / (input.stem().string() + ".svg");
        svg = run_svg(table, run_title_from_stem(input.stem().string()));
    } else if (table.header.size() >= 2 && table.header.front() == "step" &&
               table.header[1].starts_with(kCurvePrefix)) {
        target = out.out_dir / "sweep.svg";
        svg = sweep_svg(table);
    } else {
        throw InvalidInput("plot: unrecognized table header in " + input.string());
    }
    write_file_atomic(target, svg);
    return {target};
}

}  // namespace enkf_lab
