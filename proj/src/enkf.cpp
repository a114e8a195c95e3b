#include "enkf_lab/enkf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "enkf_lab/simd/kernels.hpp"

namespace enkf_lab {

namespace {

bool all_zero(const Matrix& m) {
    const auto v = m.values();
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void check_members_finite(const Matrix& states) {
    for (std::size_t k = 0; k < states.cols(); ++k)
        for (std::size_t r = 0; r < states.rows(); ++r)
            if (!std::isfinite(states(r, k)))
                throw DivergenceError("ensemble member became non-finite", k);
}

}  // namespace

// ---------------------------------------------------------------- Ensemble

Ensemble::Ensemble(Matrix states) : states_(std::move(states)) {
    if (states_.cols() < 2) throw InvalidInput("Ensemble: need at least two members");
}

Ensemble Ensemble::from_members(std::span<const Vector> members) {
    if (members.size() < 2) throw InvalidInput("Ensemble: need at least two members");
    Matrix states(members.front().dim(), members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        if (members[k].dim() != states.rows())
            throw InvalidInput("Ensemble: members differ in dimension");
        states.set_column(k, members[k]);
    }
    return Ensemble(std::move(states));
}

std::vector<Vector> Ensemble::members() const {
    std::vector<Vector> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) out.push_back(member(k));
    return out;
}

EnsembleStats ensemble_stats(const Ensemble& ensemble) {
    const auto& kern = simd::kernels();
    const Matrix& s = ensemble.states();
    const std::size_t n = ensemble.dim();
    const std::size_t count = ensemble.size();

    Vector mean(n);
    for (std::size_t i = 0; i < n; ++i)
        mean[i] = kern.striped_sum(s.row(i).data(), count) / static_cast<double>(count);

    Matrix cov(n, n);
    const double denom = static_cast<double>(count - 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double c =
                kern.striped_centered_dot(s.row(i).data(), mean[i], s.row(j).data(), mean[j], count) /
                denom;
            cov(i, j) = c;
            cov(j, i) = c;
        }
    return {std::move(mean), std::move(cov)};
}

// ---------------------------------------------------------------- transitions

void Transition::apply_batch(Matrix& states) const {
    for (std::size_t k = 0; k < states.cols(); ++k) {
        const Vector next = apply(states.column_vector(k));
        if (next.dim() != states.rows())
            throw InvalidInput("transition changed the state dimension");
        if (!next.all_finite()) throw DivergenceError("ensemble member became non-finite", k);
        states.set_column(k, next);
    }
}

LinearTransition::LinearTransition(Matrix m) : m_(std::move(m)) {
    if (!m_.is_square()) throw InvalidInput("LinearTransition: matrix must be square");
}

LorenzTransition::LorenzTransition(Lorenz63Params params, double dt, std::size_t substeps)
    : params_(params), dt_(dt), substeps_(substeps) {
    if (!(dt > 0.0)) throw InvalidInput("LorenzTransition: dt must be positive");
    if (substeps == 0) throw InvalidInput("LorenzTransition: substeps must be at least 1");
}

Vector LorenzTransition::apply(const Vector& state) const {
    return integrate_rk4(lorenz_drift_function(params_), state, dt_, substeps_);
}

void LorenzTransition::apply_batch(Matrix& states) const {
    if (states.rows() != 3) throw InvalidInput("LorenzTransition: states must have 3 rows");
    const double h = dt_ / static_cast<double>(substeps_);
    simd::kernels().lorenz_rk4({params_.sigma, params_.r, params_.b}, states.row(0).data(),
                               states.row(1).data(), states.row(2).data(), states.cols(), h,
                               substeps_);
    check_members_finite(states);
}

// ---------------------------------------------------------------- filter steps

Ensemble init_ensemble(const Vector& center, double spread, std::size_t n_members,
                       const RngStream& rng) {
    if (n_members < 2) throw InvalidInput("init_ensemble: need at least two members");
    if (!(spread >= 0.0)) throw InvalidInput("init_ensemble: spread must be non-negative");
    Matrix states(center.dim(), n_members);
    for (std::size_t k = 0; k < n_members; ++k) {
        RngStream member_rng = derive_stream(rng, k);
        states.set_column(k, center + spread * standard_normal(member_rng, center.dim()));
    }
    return Ensemble(std::move(states));
}

ForecastResult enkf_predict(const Ensemble& ensemble, const Transition& transition,
                            const Matrix& process_noise, const RngStream& rng) {
    const std::size_t n = ensemble.dim();
    if (transition.dim() != n) throw InvalidInput("enkf_predict: transition dimension mismatch");
    if (process_noise.rows() != n || process_noise.cols() != n)
        throw InvalidInput("enkf_predict: process noise dimension mismatch");

    Matrix states = ensemble.states();
    transition.apply_batch(states);

    if (!all_zero(process_noise)) {
        const Matrix factor = psd_factor(process_noise);
        const Vector zero(n);
        for (std::size_t k = 0; k < states.cols(); ++k) {
            RngStream member_rng = derive_stream(rng, k);
            const Vector xi = sample_gaussian_factored(member_rng, zero, factor);
            for (std::size_t r = 0; r < n; ++r) states(r, k) += xi[r];
        }
    }

    Ensemble forecast(std::move(states));
    EnsembleStats stats = ensemble_stats(forecast);
    return {std::move(forecast), std::move(stats)};
}

Matrix enkf_gain(const EnsembleStats& stats, const ObservationModel& obs) {
    return kalman_gain(stats.covariance, obs);
}

AnalysisResult enkf_analyze_with_perturbations(const Ensemble& predicted, const Vector& y,
                                               const ObservationModel& obs,
                                               const Matrix& perturbations,
                                               const EnkfOptions& options) {
    const std::size_t n = predicted.dim();
    const std::size_t m = obs.obs_dim();
    const std::size_t count = predicted.size();
    if (obs.state_dim() != n) throw InvalidInput("enkf_analyze: observation operator mismatch");
    if (y.dim() != m) throw InvalidInput("enkf_analyze: observation dimension mismatch");
    if (perturbations.rows() != m || perturbations.cols() != count)
        throw InvalidInput("enkf_analyze: perturbations must be " + std::to_string(m) + "x" +
                           std::to_string(count));
    if (options.inflation != 1.0)
        throw InvalidInput("enkf_analyze: covariance inflation is not supported (factor must be 1)");
    if (!(options.covariance_jitter >= 0.0))
        throw InvalidInput("enkf_analyze: covariance jitter must be non-negative");

    EnsembleStats forecast_stats = ensemble_stats(predicted);
    if (options.covariance_jitter > 0.0)
        forecast_stats.covariance =
            forecast_stats.covariance + options.covariance_jitter * Matrix::identity(n);
    Matrix gain = enkf_gain(forecast_stats, obs);

    const auto& kern = simd::kernels();
    const Matrix& v = predicted.states();

    // d⁽ᵏ⁾ = y + η⁽ᵏ⁾ − H·v̂⁽ᵏ⁾, one row per observed component.
    Matrix innovations(m, count);
    for (std::size_t r = 0; r < m; ++r) {
        auto d = innovations.row(r);
        const auto eta = perturbations.row(r);
        for (std::size_t k = 0; k < count; ++k) d[k] = y[r] + eta[k];
        for (std::size_t c = 0; c < n; ++c)
            if (obs.op(r, c) != 0.0) kern.axpy(-obs.op(r, c), v.row(c).data(), d.data(), count);
    }

    Matrix updated = v;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t r = 0; r < m; ++r)
            kern.axpy(gain(a, r), innovations.row(r).data(), updated.row(a).data(), count);

    Vector mean_update =
        forecast_stats.mean + matvec(gain, y - matvec(obs.op, forecast_stats.mean));

    Ensemble analyzed(std::move(updated));
    EnsembleStats stats = ensemble_stats(analyzed);
    return {std::move(analyzed),     std::move(stats),       std::move(forecast_stats.covariance),
            std::move(gain),         std::move(mean_update), perturbations};
}

AnalysisResult enkf_analyze(const Ensemble& predicted, const Vector& y, const ObservationModel& obs,
                            const RngStream& rng, const EnkfOptions& options) {
    const std::size_t m = obs.obs_dim();
    if (!obs.noise.is_square() || obs.noise.rows() != m)
        throw InvalidInput("enkf_analyze: observation noise does not match operator");
    const Matrix factor = psd_factor(obs.noise);
    const Vector zero(m);
    Matrix perturbations(m, predicted.size());
    for (std::size_t k = 0; k < predicted.size(); ++k) {
        RngStream member_rng = derive_stream(rng, k);
        perturbations.set_column(k, sample_gaussian_factored(member_rng, zero, factor));
    }
    return enkf_analyze_with_perturbations(predicted, y, obs, perturbations, options);
}

Matrix deterministic_analysis_covariance(const EnsembleStats& stats, const Matrix& gain,
                                         const ObservationModel& obs) {
    const std::size_t n = stats.covariance.rows();
    if (gain.rows() != n || gain.cols() != obs.obs_dim() || obs.state_dim() != n)
        throw InvalidInput("deterministic_analysis_covariance: dimension mismatch");
    const Matrix i_kh = Matrix::identity(n) - matmul(gain, obs.op);
    return symmetrize(matmul(matmul(i_kh, stats.covariance), transpose(i_kh)));
}

}  // namespace enkf_lab
