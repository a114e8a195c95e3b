#include "enkf_lab/kalman.hpp"

namespace enkf_lab {

namespace {

void check_observation(const Matrix& cov, const ObservationModel& obs) {
    if (!cov.is_square() || obs.op.cols() != cov.rows())
        throw InvalidInput("observation operator does not match state covariance");
    if (!obs.noise.is_square() || obs.noise.rows() != obs.op.rows())
        throw InvalidInput("observation noise does not match observation operator");
}

void check_state(const GaussianState& s) {
    if (!s.covariance.is_square() || s.covariance.rows() != s.mean.dim())
        throw InvalidInput("state covariance does not match mean dimension");
}

}  // namespace

GaussianState predict(const GaussianState& state, const LinearModel& model) {
    check_state(state);
    const std::size_t n = state.mean.dim();
    if (model.transition.rows() != n || model.transition.cols() != n ||
        model.process_noise.rows() != n || model.process_noise.cols() != n)
        throw InvalidInput("predict: model dimensions do not match state");
    const Matrix& m = model.transition;
    return {matvec(m, state.mean),
            symmetrize(matmul(matmul(m, state.covariance), transpose(m)) + model.process_noise)};
}

Matrix kalman_gain(const Matrix& predicted_cov, const ObservationModel& obs) {
    check_observation(predicted_cov, obs);
    const Matrix h_c = matmul(obs.op, predicted_cov);
    const Matrix innovation_cov = symmetrize(matmul(h_c, transpose(obs.op)) + obs.noise);
    // Ĉ symmetric ⇒ (ĈHᵀ)ᵀ = HĈ.
    return transpose(solve_spd(innovation_cov, h_c));
}

AnalysisState analyze(const GaussianState& predicted, const Vector& y, const ObservationModel& obs) {
    check_state(predicted);
    check_observation(predicted.covariance, obs);
    if (y.dim() != obs.obs_dim()) throw InvalidInput("analyze: observation dimension mismatch");

    Matrix gain = kalman_gain(predicted.covariance, obs);
    Vector innovation = y - matvec(obs.op, predicted.mean);
    const std::size_t n = predicted.mean.dim();
    const Matrix i_kh = Matrix::identity(n) - matmul(gain, obs.op);
    GaussianState posterior{predicted.mean + matvec(gain, innovation),
                            symmetrize(matmul(i_kh, predicted.covariance))};
    return {std::move(posterior), std::move(gain), std::move(innovation)};
}

GaussianState analyze_information_form(const GaussianState& predicted, const Vector& y,
                                       const ObservationModel& obs) {
    check_state(predicted);
    check_observation(predicted.covariance, obs);
    if (y.dim() != obs.obs_dim())
        throw InvalidInput("analyze_information_form: observation dimension mismatch");

    const std::size_t n = predicted.mean.dim();
    const Matrix ht = transpose(obs.op);
    const Matrix prior_precision = solve_spd(predicted.covariance, Matrix::identity(n));
    // solve_spd quietly jitters a singular matrix; the precision form has no
    // meaning then, so insist the inverse is a genuine one.
    if (max_abs(matmul(predicted.covariance, prior_precision) - Matrix::identity(n)) > 1e-6)
        throw SingularMatrixError("analyze_information_form: predicted covariance is singular");
    const Matrix gamma_inv_h = solve_spd(obs.noise, obs.op);
    const Matrix gamma_inv_y = solve_spd(obs.noise, Matrix::column(y));

    const Matrix precision = symmetrize(prior_precision + matmul(ht, gamma_inv_h));
    const Matrix rhs = matmul(prior_precision, Matrix::column(predicted.mean)) + matmul(ht, gamma_inv_y);

    Matrix covariance = symmetrize(solve_spd(precision, Matrix::identity(n)));
    return {solve_spd(precision, rhs).column_vector(0), std::move(covariance)};
}

Matrix joseph_covariance(const Matrix& predicted_cov, const Matrix& gain, const ObservationModel& obs) {
    check_observation(predicted_cov, obs);
    const std::size_t n = predicted_cov.rows();
    if (gain.rows() != n || gain.cols() != obs.obs_dim())
        throw InvalidInput("joseph_covariance: gain has wrong shape");
    const Matrix i_kh = Matrix::identity(n) - matmul(gain, obs.op);
    return symmetrize(matmul(matmul(i_kh, predicted_cov), transpose(i_kh)) +
                      matmul(matmul(gain, obs.noise), transpose(gain)));
}

}  // namespace enkf_lab
