#pragma once

#include "enkf_lab/linalg.hpp"

namespace enkf_lab {

/// Mean and covariance of a Gaussian state estimate (forecast or analysis).
struct GaussianState {
    Vector mean;
    Matrix covariance;
};

/// v_{j+1} = M·v_j + ξ_j with ξ_j ~ N(0, Σ).
struct LinearModel {
    Matrix transition;
    Matrix process_noise;
};

/// y_j = H·v_j + η_j with η_j ~ N(0, Γ), Γ symmetric positive definite.
struct ObservationModel {
    Matrix op;
    Matrix noise;

    std::size_t state_dim() const noexcept { return op.cols(); }
    std::size_t obs_dim() const noexcept { return op.rows(); }
};

struct AnalysisState {
    GaussianState posterior;
    Matrix gain;
    Vector innovation;
};

/// Forecast: mean M·m, covariance M·C·Mᵀ + Σ (symmetrized).
GaussianState predict(const GaussianState& state, const LinearModel& model);

/// K = Ĉ·Hᵀ·(H·Ĉ·Hᵀ + Γ)⁻¹, computed by an SPD solve of the transposed
/// system (H·Ĉ·Hᵀ + Γ)·Kᵀ = H·Ĉ.
Matrix kalman_gain(const Matrix& predicted_cov, const ObservationModel& obs);

/// m = m̂ + K(y − H·m̂), C = (I − K·H)·Ĉ (symmetrized).
AnalysisState analyze(const GaussianState& predicted, const Vector& y, const ObservationModel& obs);

/// Posterior from the precision form C⁻¹ = Ĉ⁻¹ + HᵀΓ⁻¹H and
/// C⁻¹m = Ĉ⁻¹m̂ + HᵀΓ⁻¹y. Needs Ĉ invertible. Independent of `analyze`.
GaussianState analyze_information_form(const GaussianState& predicted, const Vector& y,
                                       const ObservationModel& obs);

/// (I − K·H)·Ĉ·(I − K·H)ᵀ + K·Γ·Kᵀ, the posterior covariance for an
/// arbitrary gain K.
Matrix joseph_covariance(const Matrix& predicted_cov, const Matrix& gain, const ObservationModel& obs);

}  // namespace enkf_lab
