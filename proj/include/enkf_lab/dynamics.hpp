#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "enkf_lab/linalg.hpp"

namespace enkf_lab {

/// Lorenz 63 parameters: Prandtl number, scaled Rayleigh number, aspect ratio.
struct Lorenz63Params {
    double sigma = 10.0;
    double r = 28.0;
    double b = 8.0 / 3.0;

    friend bool operator==(const Lorenz63Params&, const Lorenz63Params&) = default;
};

/// Autonomous vector field v ↦ dv/dt on a fixed state dimension. The rule
/// must be pure.
struct DriftFunction {
    std::size_t dim;
    std::function<Vector(const Vector&)> rule;

    Vector operator()(const Vector& v) const { return rule(v); }
};

/// (σ(y−x), rx − xz − y, xy − bz)
Vector lorenz_drift(const Vector& state, const Lorenz63Params& params = {});
DriftFunction lorenz_drift_function(const Lorenz63Params& params = {});

/// `substeps` classical RK4 steps of size dt/substeps. Throws DivergenceError
/// carrying the 1-based substep index if any stage goes non-finite.
Vector integrate_rk4(const DriftFunction& drift, const Vector& state, double dt,
                     std::size_t substeps);

/// Discrete map v_{j+1} = λ·v_j + a.
struct AffineMapParams {
    double lambda;
    double a;
};

/// Closed form of j iterations of the affine map from v0.
double iterate_affine(const AffineMapParams& params, double v0, std::size_t j);

/// Scalar controlled system v_{j+1} = λv_j + K(y_j − v_j) with y_j taken from
/// the reference orbit v̂_{j+1} = λv̂_j. Returns e_j = v_j − v̂_j for
/// j = 0..steps.
std::vector<double> controlled_map_errors(double lambda, double gain, double v0, double v_hat0,
                                          std::size_t steps);

}  // namespace enkf_lab
