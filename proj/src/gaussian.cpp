#include "gridhmm/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gridhmm/error.hpp"

namespace gridhmm {

Probability::Probability(double value) : value_(value)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError("probability out of [0, 1]: " + std::to_string(value));
    }
}

Probability q_function(double x)
{
    if (!std::isfinite(x)) {
        throw DomainError("q_function: argument must be finite");
    }
    return Probability(0.5 * std::erfc(x / std::numbers::sqrt2));
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key)
{
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index)
    : seed_(seed), stream_index_(stream_index)
{
}

void RngStream::refill()
{
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_index_),
        static_cast<std::uint32_t>(stream_index_ >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    block_ = philox4x32_10(ctr, key);
    ++counter_;
    block_pos_ = 0;
}

std::uint64_t RngStream::next_u64()
{
    if (block_pos_ >= 4) {
        refill();
    }
    const std::uint64_t lo = block_[block_pos_];
    const std::uint64_t hi = block_[block_pos_ + 1];
    block_pos_ += 2;
    return lo | (hi << 32);
}

double RngStream::next_uniform()
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_standard_normal()
{
    if (has_spare_normal_) {
        has_spare_normal_ = false;
        return spare_normal_;
    }
    // 1 - U lies in (0, 1], so the logarithm is finite.
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_normal_ = radius * std::sin(angle);
    has_spare_normal_ = true;
    return radius * std::cos(angle);
}

double sample_gaussian(double mean, double sigma, RngStream& rng)
{
    if (!std::isfinite(mean) || !std::isfinite(sigma)) {
        throw ParameterError("sample_gaussian: mean and sigma must be finite");
    }
    if (sigma <= 0.0) {
        throw ParameterError("sample_gaussian: sigma must be positive, got " +
                             std::to_string(sigma));
    }
    return mean + sigma * rng.next_standard_normal();
}

std::size_t sample_categorical(std::span<const double> weights, RngStream& rng)
{
    if (weights.empty()) {
        throw ParameterError("sample_categorical: empty weight vector");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
            throw ParameterError("sample_categorical: weight " + std::to_string(i) +
                                 " is negative or non-finite");
        }
        total += weights[i];
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ParameterError("sample_categorical: weights sum to " + std::to_string(total) +
                             ", expected 1");
    }

    const double u = rng.next_uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            last_positive = i;
            cumulative += weights[i];
            if (u < cumulative) {
                return i;
            }
        }
    }
    // Rounding left the cumulative sum a hair under u.
    return last_positive;
}

}  // namespace gridhmm
