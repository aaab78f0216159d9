#pragma once

#include <cmath>
#include <random>

#include "gridhmm/detector.hpp"
#include "gridhmm/hmm_model.hpp"

namespace gridhmm::testing {

// Transition matrix used throughout the published experiments.
inline TransitionMatrix grid_transitions()
{
    return TransitionMatrix{{{{0.2, 0.7, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.7, 0.2}}}};
}

// sigma = 0.2 Hz, priors (0.1, 0.8, 0.1), means (49, 50, 51) Hz.
inline DetectorParams reference_detector()
{
    return DetectorParams(49.0, 50.0, 51.0, 0.2, {0.1, 0.8, 0.1});
}

// Emission matrix printed for reference_detector(), 4 decimals.
inline constexpr Matrix3 kPrintedEmissions = {{{0.9814, 0.0018, 0.0000},
                                               {0.0186, 0.9965, 0.0186},
                                               {0.0000, 0.0018, 0.9814}}};

inline HmmModel reference_model()
{
    const DetectorParams d = reference_detector();
    return HmmModel{grid_transitions(), build_emission_matrix(d), d.priors()};
}

// Monte Carlo configuration: priors (0.25, 0.6, 0.15), means (49.4, 50, 50.7).
inline DetectorParams monte_carlo_detector(double sigma)
{
    return DetectorParams(49.4, 50.0, 50.7, sigma, {0.25, 0.6, 0.15});
}

inline HmmModel monte_carlo_model(double sigma)
{
    const DetectorParams d = monte_carlo_detector(sigma);
    return HmmModel{grid_transitions(), build_emission_matrix(d), d.priors()};
}

inline constexpr Matrix3 kIdentity = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

// Half-width of a 4-sigma binomial interval for a proportion p over n draws.
inline double binomial_4sigma(double p, double n)
{
    return 4.0 * std::sqrt(p * (1.0 - p) / n);
}

inline Vector3 random_simplex(std::mt19937_64& gen, double floor = 0.0)
{
    std::uniform_real_distribution<double> u(floor, 1.0);
    Vector3 v{u(gen), u(gen), u(gen)};
    const double s = v[0] + v[1] + v[2];
    for (double& x : v) {
        x /= s;
    }
    return v;
}

inline HmmModel random_model(std::mt19937_64& gen)
{
    HmmModel m;
    for (std::size_t i = 0; i < kNumStates; ++i) {
        m.transitions.p[i] = random_simplex(gen, 0.01);
        const Vector3 col = random_simplex(gen, 0.01);
        for (std::size_t r = 0; r < kNumStates; ++r) {
            m.emissions.r[r][i] = col[r];
        }
    }
    m.initial = random_simplex(gen, 0.01);
    return m;
}

}  // namespace gridhmm::testing
