#include "enkf_lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "enkf_lab/enkf.hpp"
#include "enkf_lab/kalman.hpp"

namespace enkf_lab {

namespace {

Vector abs_diff(const Vector& a, const Vector& b) {
    Vector d = a - b;
    for (double& v : d.values()) v = std::abs(v);
    return d;
}

Vector diagonal_of(const Matrix& m) {
    Vector d(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) d[i] = m(i, i);
    return d;
}

// Linear interpolation between order statistics of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<std::uint64_t> TwinExperimentConfig::default_seeds(std::uint64_t base) {
    std::vector<std::uint64_t> seeds(20);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = base + i;
    return seeds;
}

void validate(const TwinExperimentConfig& c) {
    auto require = [](bool ok, const char* key, const std::string& what) {
        if (!ok) throw ConfigInvariantError(key, std::string(key) + ": " + what);
    };
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    auto non_negative = [](double v) { return v >= 0.0 && std::isfinite(v); };

    require(c.truth_init.dim() == 3 && c.truth_init.all_finite(), "truth_init",
            "must be 3 finite components");
    require(c.guess_init.dim() == 3 && c.guess_init.all_finite(), "guess_init",
            "must be 3 finite components");
    require(positive(c.dt), "dt", "must be positive");
    require(c.steps >= 1, "steps", "must be at least 1");
    require(positive(c.obs_noise_var), "obs_noise_var", "must be positive");
    require(non_negative(c.init_spread), "init_spread", "must be non-negative");
    require(!c.ensemble_sizes.empty(), "ensemble_sizes", "must list at least one size");
    for (std::size_t n : c.ensemble_sizes)
        require(n >= 2, "ensemble_sizes", "every ensemble size must be at least 2");
    require(!c.seeds.empty(), "seeds", "must list at least one seed");
    require(non_negative(c.q_jitter), "q_jitter", "must be non-negative");
    require(std::isfinite(c.lorenz.sigma), "sigma", "must be finite");
    require(std::isfinite(c.lorenz.r), "r", "must be finite");
    require(std::isfinite(c.lorenz.b), "b", "must be finite");
    require(c.rk4_substeps >= 1, "rk4_substeps", "must be at least 1");
    require(non_negative(c.process_noise_var), "process_noise_var", "must be non-negative");
    require(positive(c.trajectory_horizon), "trajectory_horizon", "must be positive");
}

std::vector<Vector> generate_truth(const TwinExperimentConfig& config) {
    const DriftFunction drift = lorenz_drift_function(config.lorenz);
    std::vector<Vector> truth;
    truth.reserve(config.steps + 1);
    truth.push_back(config.truth_init);
    for (std::size_t j = 0; j < config.steps; ++j)
        truth.push_back(integrate_rk4(drift, truth.back(), config.dt, config.rk4_substeps));
    return truth;
}

std::vector<Vector> synthesize_observations(const std::vector<Vector>& truth,
                                            const TwinExperimentConfig& config,
                                            const RngStream& rng) {
    std::vector<Vector> obs;
    if (truth.size() < 2) return obs;
    RngStream stream = rng;
    const double sd = std::sqrt(config.obs_noise_var);
    obs.reserve(truth.size() - 1);
    for (std::size_t j = 1; j < truth.size(); ++j)
        obs.push_back(truth[j] + sd * standard_normal(stream, truth[j].dim()));
    return obs;
}

MetricSeries run_twin(const TwinExperimentConfig& config, std::size_t n_members, std::uint64_t seed) {
    validate(config);
    if (n_members < 2) throw InvalidInput("run_twin: ensemble size must be at least 2");

    const RngStream base(seed);
    const std::vector<Vector> truth = generate_truth(config);
    const std::vector<Vector> observations =
        synthesize_observations(truth, config, derive_stream(base, kObservationStream));
    const RngStream filter_rng = derive_stream(base, kFilterStream);

    const LorenzTransition transition(config.lorenz, config.dt, config.rk4_substeps);
    const Matrix process_noise = config.process_noise_var * Matrix::identity(3);
    const ObservationModel obs{Matrix::identity(3), config.obs_noise_var * Matrix::identity(3)};
    const EnkfOptions options{.covariance_jitter = config.q_jitter};

    MetricSeries series;
    series.ensemble_size = n_members;
    series.seed = seed;

    Ensemble ensemble = init_ensemble(config.guess_init, config.init_spread, n_members,
                                      derive_stream(filter_rng, 0));
    double err_sum = 0.0;
    for (std::size_t j = 1; j <= config.steps; ++j) {
        try {
            ForecastResult forecast =
                enkf_predict(ensemble, transition, process_noise, derive_stream(filter_rng, 2 * j - 1));
            AnalysisResult analysis = enkf_analyze(forecast.ensemble, observations[j - 1], obs,
                                                   derive_stream(filter_rng, 2 * j), options);

            const Vector& v_true = truth[j];
            series.truth.push_back(v_true);
            series.abs_pred_err.push_back(abs_diff(forecast.stats.mean, v_true));
            series.abs_anal_err.push_back(abs_diff(analysis.stats.mean, v_true));
            series.pred_cov_diag.push_back(diagonal_of(analysis.prior_covariance));
            series.pred_cov_trace.push_back(trace(analysis.prior_covariance));
            series.pred_sample_cov_trace.push_back(trace(forecast.stats.covariance));
            series.anal_cov_diag.push_back(diagonal_of(analysis.stats.covariance));
            series.anal_cov_trace.push_back(trace(analysis.stats.covariance));
            err_sum += norm2(v_true - analysis.stats.mean);
            series.running_mean_err.push_back(err_sum / static_cast<double>(j));
            series.pred_mean.push_back(std::move(forecast.stats.mean));
            series.anal_mean.push_back(std::move(analysis.stats.mean));
            ensemble = std::move(analysis.ensemble);
        } catch (const DivergenceError& e) {
            throw DivergenceError(std::string("run_twin: filter diverged at assimilation step: ") +
                                      e.what(),
                                  j);
        }
    }
    return series;
}

SweepResult sweep_ensemble_sizes(const TwinExperimentConfig& config) {
    validate(config);
    SweepResult result;
    for (std::size_t n : config.ensemble_sizes) {
        std::vector<const MetricSeries*> done;
        for (std::uint64_t seed : config.seeds) {
            SweepCell cell{n, seed, std::nullopt, {}};
            try {
                cell.series = run_twin(config, n, seed);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            result.cells.push_back(std::move(cell));
        }
        for (const SweepCell& cell : result.cells)
            if (cell.ensemble_size == n && cell.series) done.push_back(&*cell.series);

        SweepSummary summary{n, done.size(), std::nan(""), std::nan(""), {}};
        if (!done.empty()) {
            std::vector<double> finals;
            for (const MetricSeries* s : done) finals.push_back(s->final_running_mean_err());
            summary.median = median(finals);
            summary.iqr = interquartile_range(finals);
            for (std::size_t j = 0; j < config.steps; ++j) {
                std::vector<double> at_step;
                for (const MetricSeries* s : done) at_step.push_back(s->running_mean_err[j]);
                summary.median_curve.push_back(median(std::move(at_step)));
            }
        }
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

std::vector<double> running_mean(const std::vector<double>& values) {
    std::vector<double> out;
    out.reserve(values.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        sum += values[j];
        out.push_back(sum / static_cast<double>(j + 1));
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("median: no values");
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.5);
}

double interquartile_range(std::vector<double> values) {
    if (values.empty()) throw InvalidInput("interquartile_range: no values");
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, 0.75) - quantile_sorted(values, 0.25);
}

}  // namespace enkf_lab
