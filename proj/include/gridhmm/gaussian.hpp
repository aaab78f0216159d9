#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace gridhmm {

/// A probability value, guaranteed to lie in [0, 1].
class Probability {
public:
    /// Throws DomainError if `value` is NaN or outside [0, 1].
    explicit Probability(double value);

    double value() const { return value_; }
    operator double() const { return value_; }

    /// 1 - p.
    Probability complement() const { return Probability(1.0 - value_); }

private:
    double value_;
};

/// Upper-tail probability of the standard normal distribution,
/// Q(x) = P(Z > x), evaluated through the complementary error function.
Probability q_function(double x);

/// Counter-based random stream (Philox-4x32-10).
///
/// The 64-bit seed is the Philox key; the stream index occupies the upper 64
/// bits of the 128-bit counter and the draw position the lower 64 bits. Any
/// (seed, stream_index) pair can therefore be opened directly, without
/// advancing a parent generator, and yields the same sequence on every
/// platform.
///
/// Uniform doubles take the top 53 bits of a 64-bit word. Gaussian draws use
/// the Box-Muller transform and cache the second variate of each pair.
///
/// Single owner: do not advance one stream from two threads.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double next_uniform();
    /// Standard normal.
    double next_standard_normal();

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int block_pos_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// One draw from N(mean, sigma^2). Throws ParameterError if sigma <= 0 or
/// either argument is non-finite.
double sample_gaussian(double mean, double sigma, RngStream& rng);

/// Index i drawn with probability weights[i]. Weights must be non-negative
/// and sum to 1 within 1e-9.
std::size_t sample_categorical(std::span<const double> weights, RngStream& rng);

}  // namespace gridhmm
