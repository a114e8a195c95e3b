#include "enkf_lab/simd/kernels.hpp"

namespace enkf_lab::simd {

namespace {

void lorenz_rk4_scalar(const LorenzCoefficients& p, double* xs, double* ys, double* zs,
                       std::size_t count, double h, std::size_t substeps) {
    const double half_h = 0.5 * h;
    const double h6 = h / 6.0;
    for (std::size_t i = 0; i < count; ++i) {
        double x = xs[i], y = ys[i], z = zs[i];
        for (std::size_t s = 0; s < substeps; ++s) {
            const double k1x = p.sigma * (y - x);
            const double k1y = p.r * x - x * z - y;
            const double k1z = x * y - p.b * z;

            const double x2 = x + half_h * k1x, y2 = y + half_h * k1y, z2 = z + half_h * k1z;
            const double k2x = p.sigma * (y2 - x2);
            const double k2y = p.r * x2 - x2 * z2 - y2;
            const double k2z = x2 * y2 - p.b * z2;

            const double x3 = x + half_h * k2x, y3 = y + half_h * k2y, z3 = z + half_h * k2z;
            const double k3x = p.sigma * (y3 - x3);
            const double k3y = p.r * x3 - x3 * z3 - y3;
            const double k3z = x3 * y3 - p.b * z3;

            const double x4 = x + h * k3x, y4 = y + h * k3y, z4 = z + h * k3z;
            const double k4x = p.sigma * (y4 - x4);
            const double k4y = p.r * x4 - x4 * z4 - y4;
            const double k4z = x4 * y4 - p.b * z4;

            x = x + h6 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
            y = y + h6 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            z = z + h6 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        }
        xs[i] = x;
        ys[i] = y;
        zs[i] = z;
    }
}

double striped_sum_scalar(const double* a, std::size_t count) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < count; ++i) lane[i % 4] += a[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double striped_centered_dot_scalar(const double* a, double mean_a, const double* b, double mean_b,
                                   std::size_t count) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < count; ++i) lane[i % 4] += (a[i] - mean_a) * (b[i] - mean_b);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar", lorenz_rk4_scalar, striped_sum_scalar, striped_centered_dot_scalar, axpy_scalar,
    };
    return table;
}

}  // namespace enkf_lab::simd
