#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "enkf_lab/dynamics.hpp"
#include "enkf_lab/kalman.hpp"
#include "enkf_lab/linalg.hpp"
#include "enkf_lab/random.hpp"

namespace enkf_lab {

/// N ≥ 2 state vectors of common dimension n, stored as an n×N matrix whose
/// row k holds component k of every member (members are columns).
class Ensemble {
public:
    explicit Ensemble(Matrix states);
    static Ensemble from_members(std::span<const Vector> members);

    std::size_t dim() const noexcept { return states_.rows(); }
    std::size_t size() const noexcept { return states_.cols(); }

    Vector member(std::size_t k) const { return states_.column_vector(k); }
    void set_member(std::size_t k, const Vector& v) { states_.set_column(k, v); }
    std::vector<Vector> members() const;

    const Matrix& states() const noexcept { return states_; }
    Matrix& states() noexcept { return states_; }

private:
    Matrix states_;
};

struct EnsembleStats {
    Vector mean;
    Matrix covariance;
};

/// Sample mean and unbiased sample covariance of the members.
EnsembleStats ensemble_stats(const Ensemble& ensemble);

/// Discrete forecast map Ψ applied member by member. `apply_batch` advances
/// every column of an n×N state matrix; the default loops over `apply`.
class Transition {
public:
    virtual ~Transition() = default;
    virtual std::size_t dim() const = 0;
    virtual Vector apply(const Vector& state) const = 0;
    /// Throws DivergenceError carrying the member index on a non-finite result.
    virtual void apply_batch(Matrix& states) const;
};

class FunctionTransition final : public Transition {
public:
    FunctionTransition(std::size_t dim, std::function<Vector(const Vector&)> map)
        : dim_(dim), map_(std::move(map)) {}

    std::size_t dim() const override { return dim_; }
    Vector apply(const Vector& state) const override { return map_(state); }

private:
    std::size_t dim_;
    std::function<Vector(const Vector&)> map_;
};

class LinearTransition final : public Transition {
public:
    explicit LinearTransition(Matrix m);

    std::size_t dim() const override { return m_.rows(); }
    Vector apply(const Vector& state) const override { return matvec(m_, state); }
    const Matrix& matrix() const noexcept { return m_; }

private:
    Matrix m_;
};

/// One assimilation interval of Lorenz 63 flow: RK4 over `dt` in `substeps`
/// steps. The batched path runs the SIMD kernel and agrees bit for bit with
/// `integrate_rk4` on a single member.
class LorenzTransition final : public Transition {
public:
    LorenzTransition(Lorenz63Params params, double dt, std::size_t substeps);

    std::size_t dim() const override { return 3; }
    Vector apply(const Vector& state) const override;
    void apply_batch(Matrix& states) const override;

private:
    Lorenz63Params params_;
    double dt_;
    std::size_t substeps_;
};

struct EnkfOptions {
    /// Ĉ ← Ĉ + q·I before the gain is formed. Zero disables it.
    double covariance_jitter = 0.001;
    /// Multiplicative anomaly inflation hook; only 1.0 (none) is accepted.
    double inflation = 1.0;
};

struct ForecastResult {
    Ensemble ensemble;
    EnsembleStats stats;
};

struct AnalysisResult {
    Ensemble ensemble;
    EnsembleStats stats;                ///< sample statistics of the analyzed members
    Matrix prior_covariance;            ///< forecast covariance the gain was built from (incl. jitter)
    Matrix gain;                        ///< K* actually applied
    Vector mean_update;                 ///< m̂ + K*(y − H·m̂)
    Matrix perturbations;               ///< m×N, column k is η⁽ᵏ⁾
};

/// center + spread·z⁽ⁿ⁾ with z⁽ⁿ⁾ drawn from substream n of `rng`.
Ensemble init_ensemble(const Vector& center, double spread, std::size_t n_members,
                       const RngStream& rng);

/// v̂⁽ⁿ⁾ = Ψ(v⁽ⁿ⁾) + ξ⁽ⁿ⁾, ξ⁽ⁿ⁾ ~ N(0, Σ) from substream n of `rng`.
ForecastResult enkf_predict(const Ensemble& ensemble, const Transition& transition,
                            const Matrix& process_noise, const RngStream& rng);

/// Gain from the ensemble covariance; same algebra as `kalman_gain`.
Matrix enkf_gain(const EnsembleStats& stats, const ObservationModel& obs);

/// Perturbed-observation analysis: v⁽ⁿ⁾ = v̂⁽ⁿ⁾ + K*(y + η⁽ⁿ⁾ − H·v̂⁽ⁿ⁾) with
/// η⁽ⁿ⁾ ~ N(0, Γ) from substream n of `rng`.
AnalysisResult enkf_analyze(const Ensemble& predicted, const Vector& y, const ObservationModel& obs,
                            const RngStream& rng, const EnkfOptions& options = {});

/// Same update with caller-supplied perturbations (m×N).
AnalysisResult enkf_analyze_with_perturbations(const Ensemble& predicted, const Vector& y,
                                               const ObservationModel& obs,
                                               const Matrix& perturbations,
                                               const EnkfOptions& options = {});

/// (I − K·H)·Ĉ·(I − K·H)ᵀ
Matrix deterministic_analysis_covariance(const EnsembleStats& stats, const Matrix& gain,
                                         const ObservationModel& obs);

}  // namespace enkf_lab
