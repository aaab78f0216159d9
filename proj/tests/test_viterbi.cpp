#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gridhmm/error.hpp"
#include "gridhmm/viterbi.hpp"

using namespace gridhmm;
using namespace gridhmm::testing;

namespace {

constexpr auto N = StateSymbol::Negative;
constexpr auto Z = StateSymbol::Zero;
constexpr auto P = StateSymbol::Positive;

SymbolSequence random_sequence(std::mt19937_64& gen, std::size_t k)
{
    std::uniform_int_distribution<int> d(-1, 1);
    SymbolSequence s(k);
    for (auto& v : s) {
        v = symbol_from_int(d(gen));
    }
    return s;
}

// Make states a and b interchangeable: every path and its a<->b mirror image
// score identically, so optimal paths come in tied pairs.
HmmModel symmetrise(HmmModel m, std::size_t a, std::size_t b)
{
    auto swap_index = [&](std::size_t i) { return i == a ? b : (i == b ? a : i); };
    HmmModel out = m;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            out.transitions.p[i][j] =
                0.5 * (m.transitions.p[i][j] + m.transitions.p[swap_index(i)][swap_index(j)]);
            out.emissions.r[i][j] = 0.5 * (m.emissions.r[i][j] + m.emissions.r[i][swap_index(j)]);
        }
        out.initial[i] = 0.5 * (m.initial[i] + m.initial[swap_index(i)]);
    }
    return out;
}

bool lexicographically_less(const SymbolSequence& a, const SymbolSequence& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

TEST_CASE("joint_log_prob single step")
{
    HmmModel printed{grid_transitions(), EmissionMatrix{kPrintedEmissions}, {0.1, 0.8, 0.1}};
    CHECK(std::abs(joint_log_prob({Z}, {Z}, printed) - std::log(0.7972)) <= 1e-9);

    const HmmModel m = reference_model();
    CHECK(joint_log_prob({Z}, {Z}, m) == doctest::Approx(std::log(0.8 * m.emissions.r[1][1])));
}

TEST_CASE("joint_log_prob is -inf when a factor vanishes")
{
    HmmModel m = reference_model();
    m.initial = {0.0, 0.9, 0.1};
    CHECK(joint_log_prob({Z, Z}, {N, Z}, m) == -INFINITY);
    m = reference_model();
    m.transitions.p[1] = {0.0, 0.9, 0.1};
    CHECK(joint_log_prob({Z, Z}, {Z, N}, m) == -INFINITY);
}

TEST_CASE("joint_log_prob length mismatch")
{
    CHECK_THROWS_AS(joint_log_prob({Z, Z}, {Z}, reference_model()), ParameterError);
    CHECK_THROWS_AS(joint_log_prob({}, {}, reference_model()), ParameterError);
}

TEST_CASE("joint probabilities obey the law of total probability")
{
    std::mt19937_64 gen(4);
    for (std::size_t K = 1; K <= 6; ++K) {
        const HmmModel m = random_model(gen);
        std::size_t total = 1;
        for (std::size_t k = 0; k < K; ++k) {
            total *= 3;
        }
        auto decode_index = [&](std::size_t idx) {
            SymbolSequence s(K);
            for (std::size_t k = 0; k < K; ++k) {
                s[K - 1 - k] = symbol_at(idx % 3);
                idx /= 3;
            }
            return s;
        };
        double grand = 0.0;
        for (std::size_t xi = 0; xi < total; ++xi) {
            const SymbolSequence x = decode_index(xi);
            double marginal = 0.0;
            for (std::size_t si = 0; si < total; ++si) {
                marginal += std::exp(joint_log_prob(x, decode_index(si), m));
            }
            CHECK(marginal >= 0.0);
            CHECK(marginal <= 1.0);
            grand += marginal;
        }
        INFO("K = " << K);
        CHECK(std::abs(grand - 1.0) <= 1e-12);
    }
}

TEST_CASE("noiseless emissions pin the states")
{
    std::mt19937_64 gen(10);
    for (int i = 0; i < 100; ++i) {
        HmmModel m = random_model(gen);
        m.emissions.r = kIdentity;
        const SymbolSequence x = random_sequence(gen, 1 + i % 40);
        CHECK(viterbi_decode(x, m) == x);
    }
}

TEST_CASE("single-symbol decode under the reference model")
{
    // 0.1 * 0.9814 beats 0.8 * 0.0018 and 0.1 * 0.0000.
    CHECK(viterbi_decode({P}, reference_model()) == SymbolSequence{P});
    CHECK(brute_force_mlse({P}, reference_model()) == SymbolSequence{P});
}

TEST_CASE("five-step decode under the reference model")
{
    const HmmModel m = reference_model();
    const SymbolSequence x = {Z, Z, P, Z, Z};
    const SymbolSequence oracle = brute_force_mlse(x, m);
    // Frozen from an independent enumeration of all 243 paths.
    CHECK(oracle == SymbolSequence{Z, Z, P, Z, Z});
    CHECK(viterbi_decode(x, m) == oracle);
}

TEST_CASE("brute force single step is the per-symbol MAP")
{
    std::mt19937_64 gen(12);
    for (int i = 0; i < 200; ++i) {
        const HmmModel m = random_model(gen);
        const StateSymbol x = random_sequence(gen, 1)[0];
        std::size_t best = 0;
        for (std::size_t s = 1; s < 3; ++s) {
            if (m.initial[s] * m.emissions.r[index_of(x)][s] >
                m.initial[best] * m.emissions.r[index_of(x)][best]) {
                best = s;
            }
        }
        CHECK(brute_force_mlse({x}, m) == SymbolSequence{symbol_at(best)});
    }
}

TEST_CASE("brute force size guard")
{
    CHECK_THROWS_AS(brute_force_mlse(SymbolSequence(13, Z), reference_model()), SizeGuardError);
    CHECK_NOTHROW(brute_force_mlse(SymbolSequence(12, Z), reference_model()));
}

TEST_CASE("decode rejects empty and infeasible input")
{
    CHECK_THROWS_AS(viterbi_decode({}, reference_model()), ParameterError);

    HmmModel m = reference_model();
    // Symbol +1 can never be emitted.
    m.emissions.r = {{{0.5, 0.2, 0.0}, {0.5, 0.8, 1.0}, {0.0, 0.0, 0.0}}};
    CHECK_THROWS_AS(viterbi_decode({Z, P, Z}, m), InfeasibleObservationError);
    try {
        viterbi_decode({Z, P, Z}, m);
    } catch (const InfeasibleObservationError& e) {
        CHECK(e.step() == 2);
    }

    HmmModel bad = reference_model();
    bad.transitions.p[0][0] = 0.5;
    CHECK_THROWS_AS(viterbi_decode({Z}, bad), ParameterError);
}

TEST_CASE("viterbi matches exhaustive search on random models")
{
    std::mt19937_64 gen(2025);
    std::uniform_int_distribution<std::size_t> len(1, 8);
    for (int i = 0; i < 1500; ++i) {
        const HmmModel m = random_model(gen);
        const SymbolSequence x = random_sequence(gen, len(gen));
        CHECK(viterbi_decode(x, m) == brute_force_mlse(x, m));
    }
}

TEST_CASE("viterbi matches exhaustive search on engineered ties")
{
    std::mt19937_64 gen(77);
    std::uniform_int_distribution<std::size_t> len(1, 8), pick(0, 2);
    int tie_instances = 0;
    for (int i = 0; i < 1000; ++i) {
        HmmModel m;
        switch (i % 3) {
        case 0: {
            // Uniform P and Pi0 with a symmetric R.
            const double a = std::uniform_real_distribution<double>(0.34, 0.9)(gen);
            const double b = 0.5 * (1.0 - a);
            m.transitions.p = {{{1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}, {1. / 3, 1. / 3, 1. / 3}}};
            m.emissions.r = {{{a, b, b}, {b, a, b}, {b, b, a}}};
            m.initial = {1. / 3, 1. / 3, 1. / 3};
            if (i % 2 == 0) {
                m.emissions.r = {{{0.5, 0.5, 0.2}, {0.3, 0.3, 0.4}, {0.2, 0.2, 0.4}}};
            }
            break;
        }
        default: {
            const std::size_t a = pick(gen);
            const std::size_t b = (a + 1 + i % 2) % 3;
            m = symmetrise(random_model(gen), a, b);
            break;
        }
        }
        const SymbolSequence x = random_sequence(gen, len(gen));
        const SymbolSequence v = viterbi_decode(x, m);
        const SymbolSequence bf = brute_force_mlse(x, m);
        CHECK(v == bf);

        // Count instances that really had more than one optimum.
        const double best = joint_log_prob(x, v, m);
        SymbolSequence other = v;
        for (std::size_t k = 0; k < other.size(); ++k) {
            for (auto s : kAllStates) {
                SymbolSequence alt = other;
                alt[k] = s;
                if (alt != v && std::abs(joint_log_prob(x, alt, m) - best) <= 1e-9) {
                    CHECK(lexicographically_less(v, alt));
                    ++tie_instances;
                }
            }
        }
    }
    CHECK(tie_instances > 100);
}

TEST_CASE("uniform model decodes to the all-negative sequence")
{
    HmmModel m;
    for (auto& row : m.transitions.p) {
        row = {1. / 3, 1. / 3, 1. / 3};
    }
    for (auto& row : m.emissions.r) {
        row = {1. / 3, 1. / 3, 1. / 3};
    }
    m.initial = {1. / 3, 1. / 3, 1. / 3};
    std::mt19937_64 gen(1);
    for (std::size_t K : {1, 2, 7, 50, 200}) {
        const SymbolSequence x = random_sequence(gen, K);
        CHECK(viterbi_decode(x, m) == SymbolSequence(K, N));
    }
    CHECK(brute_force_mlse(random_sequence(gen, 6), m) == SymbolSequence(6, N));
}

TEST_CASE("decoded path is at least as likely as random alternatives")
{
    std::mt19937_64 gen(909);
    for (int i = 0; i < 200; ++i) {
        const HmmModel m = random_model(gen);
        const SymbolSequence x = random_sequence(gen, 20 + i % 80);
        const SymbolSequence s_star = viterbi_decode(x, m);
        const double best = joint_log_prob(x, s_star, m);
        for (int j = 0; j < 100; ++j) {
            const double alt = joint_log_prob(x, random_sequence(gen, x.size()), m);
            CHECK(best >= alt - kTieTolerance * std::abs(best));
        }
    }
}

TEST_CASE("trellis scores follow the max-product recurrence")
{
    std::mt19937_64 gen(55);
    for (int i = 0; i < 100; ++i) {
        const HmmModel m = random_model(gen);
        const SymbolSequence x = random_sequence(gen, 1 + i % 30);
        const Trellis t = build_trellis(x, m);
        REQUIRE(t.length() == x.size());
        for (std::size_t s = 0; s < 3; ++s) {
            CHECK(t.log_scores[0][s] ==
                  doctest::Approx(std::log(m.initial[s]) + std::log(m.emissions.r[index_of(x[0])][s])));
        }
        for (std::size_t k = 1; k < x.size(); ++k) {
            for (std::size_t j = 0; j < 3; ++j) {
                double best = -INFINITY;
                for (std::size_t i2 = 0; i2 < 3; ++i2) {
                    best = std::max(best, t.log_scores[k - 1][i2] + std::log(m.transitions.p[i2][j]));
                }
                CHECK(t.log_scores[k][j] ==
                      doctest::Approx(best + std::log(m.emissions.r[index_of(x[k])][j])));
                const std::size_t bp = index_of(t.backpointers[k][j]);
                CHECK(t.log_scores[k - 1][bp] + std::log(m.transitions.p[bp][j]) ==
                      doctest::Approx(best));
            }
        }
        for (const auto& row : t.log_scores) {
            for (double v : row) {
                CHECK(v <= 0.0);
            }
        }
        // Best final score equals the joint probability of the decoded path.
        const double last = *std::max_element(t.log_scores.back().begin(), t.log_scores.back().end());
        CHECK(joint_log_prob(x, viterbi_decode(x, m), m) == doctest::Approx(last));
    }
}

TEST_CASE("long sequences decode without underflow")
{
    RngStream rng(3, 0);
    const HmmModel m = reference_model();
    SymbolSequence x(5000);
    for (auto& v : x) {
        v = symbol_at(sample_categorical(std::vector<double>{0.1, 0.8, 0.1}, rng));
    }
    const SymbolSequence s = viterbi_decode(x, m);
    CHECK(s.size() == x.size());
    CHECK(std::isfinite(joint_log_prob(x, s, m)));
}
