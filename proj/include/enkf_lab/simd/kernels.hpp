#pragma once

// Data-parallel inner loops over ensemble members. Ensembles are stored
// structure-of-arrays (one contiguous row per state component), so each
// kernel streams across members.
//
// Every variant must produce bit-identical results to the scalar reference:
// elementwise kernels use the same operation order, and reductions use four
// interleaved partial sums (element i goes to lane i % 4) combined as
// (lane0 + lane1) + (lane2 + lane3). The build disables FMA contraction.

#include <cstddef>
#include <string_view>

namespace enkf_lab::simd {

struct LorenzCoefficients {
    double sigma;
    double r;
    double b;
};

struct KernelTable {
    std::string_view name;

    /// `substeps` classical RK4 steps of size h applied in place to members
    /// (x[i], y[i], z[i]), i < count.
    void (*lorenz_rk4)(const LorenzCoefficients& p, double* x, double* y, double* z,
                       std::size_t count, double h, std::size_t substeps);

    /// Lane-striped sum of a[0..count).
    double (*striped_sum)(const double* a, std::size_t count);

    /// Lane-striped Σ (a[i] − mean_a)(b[i] − mean_b).
    double (*striped_centered_dot)(const double* a, double mean_a, const double* b,
                                   double mean_b, std::size_t count);

    /// y[i] += alpha · x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t count);
};

enum class Isa { scalar, avx2 };

const KernelTable& scalar_kernels();

/// Null when the build target or the running CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Kernels used by the library. Defaults to the widest ISA the CPU supports.
const KernelTable& kernels();

/// Forces a kernel set (tests use this to compare paths). Returns false and
/// leaves the selection unchanged if the ISA is unavailable.
bool select_isa(Isa isa);
Isa active_isa();

}  // namespace enkf_lab::simd
