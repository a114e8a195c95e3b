#pragma once

#include <cstdint>
#include <optional>

#include "enkf_lab/linalg.hpp"

namespace enkf_lab {

/// Counter-based Gaussian stream: the k-th 64-bit word is a pure function of
/// (seed, k), so output is identical across runs and platforms. A stream is
/// single-owner; concurrent consumers take their own via `derive_stream`.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t counter() const noexcept { return counter_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on (0, 1], 53 bits of resolution.
    double next_uniform() noexcept;
    /// One N(0, 1) draw (Box–Muller; the paired value is cached).
    double next_normal() noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    std::optional<double> spare_;
};

struct GaussianSpec {
    Vector mean;
    Matrix covariance;
};

Vector standard_normal(RngStream& rng, std::size_t n);

/// mean + L·z with L the semidefinite square-root factor of the covariance.
Vector sample_gaussian(RngStream& rng, const GaussianSpec& spec);

/// Same, with a precomputed factor (from `psd_factor`) for repeated draws.
Vector sample_gaussian_factored(RngStream& rng, const Vector& mean, const Matrix& factor);

/// Independent substream keyed by (base seed, label). The base stream's
/// position does not matter.
RngStream derive_stream(const RngStream& base, std::uint64_t label);

}  // namespace enkf_lab
