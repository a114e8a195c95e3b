#include "enkf_lab/dynamics.hpp"

#include <cmath>
#include <string>

namespace enkf_lab {

Vector lorenz_drift(const Vector& state, const Lorenz63Params& p) {
    if (state.dim() != 3)
        throw InvalidInput("lorenz_drift: state has dimension " + std::to_string(state.dim()) +
                           ", expected 3");
    const double x = state[0], y = state[1], z = state[2];
    return Vector{p.sigma * (y - x), p.r * x - x * z - y, x * y - p.b * z};
}

DriftFunction lorenz_drift_function(const Lorenz63Params& params) {
    return {3, [params](const Vector& v) { return lorenz_drift(v, params); }};
}

// Stage arithmetic mirrors simd::KernelTable::lorenz_rk4 term for term, so a
// member propagated through the batched kernel matches this path bit for bit.
Vector integrate_rk4(const DriftFunction& drift, const Vector& state, double dt,
                     std::size_t substeps) {
    if (!(dt > 0.0)) throw InvalidInput("integrate_rk4: dt must be positive");
    if (substeps == 0) throw InvalidInput("integrate_rk4: substeps must be at least 1");
    if (state.dim() != drift.dim) throw InvalidInput("integrate_rk4: state dimension mismatch");

    const double h = dt / static_cast<double>(substeps);
    const double half_h = 0.5 * h;
    const double h6 = h / 6.0;
    Vector v = state;
    for (std::size_t s = 0; s < substeps; ++s) {
        const Vector k1 = drift(v);
        const Vector k2 = drift(v + half_h * k1);
        const Vector k3 = drift(v + half_h * k2);
        const Vector k4 = drift(v + h * k3);
        v = v + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!v.all_finite()) throw DivergenceError("integrate_rk4: state became non-finite", s + 1);
    }
    return v;
}

double iterate_affine(const AffineMapParams& p, double v0, std::size_t j) {
    const double n = static_cast<double>(j);
    if (p.lambda == 1.0) return v0 + n * p.a;
    const double lj = std::pow(p.lambda, n);
    return lj * v0 + p.a * (1.0 - lj) / (1.0 - p.lambda);
}

std::vector<double> controlled_map_errors(double lambda, double gain, double v0, double v_hat0,
                                          std::size_t steps) {
    std::vector<double> errors;
    errors.reserve(steps + 1);
    double v = v0;
    double v_hat = v_hat0;
    errors.push_back(v - v_hat);
    for (std::size_t j = 0; j < steps; ++j) {
        const double y = v_hat;
        v = lambda * v + gain * (y - v);
        v_hat = lambda * v_hat;
        errors.push_back(v - v_hat);
    }
    return errors;
}

}  // namespace enkf_lab
