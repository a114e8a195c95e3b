#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "enkf_lab/dynamics.hpp"
#include "enkf_lab/linalg.hpp"
#include "enkf_lab/random.hpp"

namespace enkf_lab {

/// Lorenz 63 twin-experiment settings. Defaults reproduce the reference
/// setup: truth from (−10, −10, 20), first guess (−11, −12, 10), dt 0.1,
/// 100 assimilation steps, Γ = 0.01·I, initial spread 0.1, N ∈ {20, 50, 100}.
struct TwinExperimentConfig {
    Vector truth_init{-10.0, -10.0, 20.0};
    Vector guess_init{-11.0, -12.0, 10.0};
    double dt = 0.1;
    std::size_t steps = 100;
    double obs_noise_var = 0.01;
    double init_spread = 0.1;
    std::vector<std::size_t> ensemble_sizes{20, 50, 100};
    std::vector<std::uint64_t> seeds = default_seeds(0);
    double q_jitter = 0.001;
    Lorenz63Params lorenz{};
    std::size_t rk4_substeps = 10;
    double process_noise_var = 0.0;
    double trajectory_horizon = 10.0;

    /// Twenty consecutive seeds starting at `base`.
    static std::vector<std::uint64_t> default_seeds(std::uint64_t base);

    friend bool operator==(const TwinExperimentConfig&, const TwinExperimentConfig&) = default;
};

/// A TwinExperimentConfig field violates its invariant.
class ConfigInvariantError : public InvalidInput {
public:
    ConfigInvariantError(std::string key, const std::string& what)
        : InvalidInput(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Throws ConfigInvariantError for the first violated invariant.
void validate(const TwinExperimentConfig& config);

/// Per-step record of one filter run; every vector has `steps` entries and
/// entry j − 1 describes assimilation step j.
struct MetricSeries {
    std::size_t ensemble_size = 0;
    std::uint64_t seed = 0;
    std::vector<Vector> truth;
    std::vector<Vector> pred_mean;
    std::vector<Vector> anal_mean;
    std::vector<Vector> abs_pred_err;
    std::vector<Vector> abs_anal_err;
    /// Forecast covariance Ĉ + q·I that the analysis used.
    std::vector<Vector> pred_cov_diag;
    std::vector<double> pred_cov_trace;
    /// Raw sample covariance of the forecast members (no jitter).
    std::vector<double> pred_sample_cov_trace;
    /// Sample covariance of the analyzed members.
    std::vector<Vector> anal_cov_diag;
    std::vector<double> anal_cov_trace;
    /// (1/j) Σ_{i≤j} ‖truth_i − anal_mean_i‖₂
    std::vector<double> running_mean_err;

    std::size_t steps() const noexcept { return truth.size(); }
    double final_running_mean_err() const { return running_mean_err.back(); }

    friend bool operator==(const MetricSeries&, const MetricSeries&) = default;
};

struct SweepCell {
    std::size_t ensemble_size;
    std::uint64_t seed;
    std::optional<MetricSeries> series;  ///< empty if the run failed
    std::string error;
};

struct SweepSummary {
    std::size_t ensemble_size;
    std::size_t completed;
    double median;
    double iqr;
    /// Per-step median of the running mean error across completed seeds.
    std::vector<double> median_curve;
};

struct SweepResult {
    std::vector<SweepCell> cells;  ///< ordered by ensemble size, then seed
    std::vector<SweepSummary> summaries;
};

/// truth_0 = truth_init and truth_{j+1} = RK4 over dt from truth_j; steps+1 states.
std::vector<Vector> generate_truth(const TwinExperimentConfig& config);

/// y_j = truth_j + η_j, η_j ~ N(0, obs_noise_var·I), for j = 1..truth.size()−1.
/// Element j − 1 is the observation at step j.
std::vector<Vector> synthesize_observations(const std::vector<Vector>& truth,
                                            const TwinExperimentConfig& config,
                                            const RngStream& rng);

/// One EnKF run of `n_members` members against the truth/observations of `seed`.
MetricSeries run_twin(const TwinExperimentConfig& config, std::size_t n_members, std::uint64_t seed);

/// run_twin for every (N, seed) pair; failures are recorded per cell.
SweepResult sweep_ensemble_sizes(const TwinExperimentConfig& config);

/// Prefix averages (1/j) Σ_{i≤j} values_i.
std::vector<double> running_mean(const std::vector<double>& values);

/// Median and interquartile range with linear interpolation between order
/// statistics. `values` must be non-empty.
double median(std::vector<double> values);
double interquartile_range(std::vector<double> values);

/// Stream labels. Observations come from derive(seed, kObservationStream).
/// Filter noise comes from derive(seed, kFilterStream), then per phase
/// (0 = initial ensemble, 2j − 1 = forecast j, 2j = analysis j), then per
/// member index. Both are independent of N, so member k sees the same noise
/// in every ensemble size of a sweep (common random numbers).
inline constexpr std::uint64_t kObservationStream = 1;
inline constexpr std::uint64_t kFilterStream = 2;

}  // namespace enkf_lab
