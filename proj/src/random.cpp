#include "enkf_lab/random.hpp"

#include <cmath>
#include <numbers>

namespace enkf_lab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::next_u64() noexcept {
    ++counter_;
    return mix64(seed_ + counter_ * kGolden);
}

double RngStream::next_uniform() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RngStream::next_normal() noexcept {
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

Vector standard_normal(RngStream& rng, std::size_t n) {
    if (n == 0) throw InvalidInput("standard_normal: count must be at least 1");
    Vector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.next_normal();
    return z;
}

Vector sample_gaussian_factored(RngStream& rng, const Vector& mean, const Matrix& factor) {
    if (factor.rows() != mean.dim() || !factor.is_square())
        throw InvalidInput("sample_gaussian: covariance factor does not match mean dimension");
    return mean + matvec(factor, standard_normal(rng, mean.dim()));
}

Vector sample_gaussian(RngStream& rng, const GaussianSpec& spec) {
    if (spec.covariance.rows() != spec.mean.dim() || !spec.covariance.is_square())
        throw InvalidInput("sample_gaussian: covariance does not match mean dimension");
    return sample_gaussian_factored(rng, spec.mean, psd_factor(spec.covariance));
}

RngStream derive_stream(const RngStream& base, std::uint64_t label) {
    return RngStream(mix64(mix64(base.seed() ^ kGolden) + mix64(label * kGolden + 0x632BE59BD9B4E019ULL)));
}

}  // namespace enkf_lab
