#include "gridhmm/viterbi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gridhmm/error.hpp"

namespace gridhmm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LogModel {
    Matrix3 log_p;
    Matrix3 log_r;
    Vector3 log_initial;

    explicit LogModel(const HmmModel& model)
    {
        for (std::size_t i = 0; i < kNumStates; ++i) {
            log_initial[i] = std::log(model.initial[i]);
            for (std::size_t j = 0; j < kNumStates; ++j) {
                log_p[i][j] = std::log(model.transitions.p[i][j]);
                log_r[i][j] = std::log(model.emissions.r[i][j]);
            }
        }
    }

    double emission(StateSymbol x, std::size_t state) const { return log_r[index_of(x)][state]; }
};

double tie_floor(double best)
{
    return best - kTieTolerance * std::max(1.0, std::abs(best));
}

void require_nonempty(const SymbolSequence& x, const char* who)
{
    if (x.empty()) {
        throw ParameterError(std::string(who) + ": symbol sequence must be non-empty");
    }
}

}  // namespace

double joint_log_prob(const SymbolSequence& x, const SymbolSequence& s, const HmmModel& model)
{
    require_nonempty(x, "joint_log_prob");
    if (x.size() != s.size()) {
        throw ParameterError("joint_log_prob: observation length " + std::to_string(x.size()) +
                             " differs from state length " + std::to_string(s.size()));
    }
    const LogModel lm(model);
    double total = lm.log_initial[index_of(s[0])] + lm.emission(x[0], index_of(s[0]));
    for (std::size_t k = 1; k < x.size(); ++k) {
        total += lm.log_p[index_of(s[k - 1])][index_of(s[k])];
        total += lm.emission(x[k], index_of(s[k]));
    }
    return total;
}

Trellis build_trellis(const SymbolSequence& x, const HmmModel& model)
{
    require_nonempty(x, "build_trellis");
    require_valid(model);
    const LogModel lm(model);
    const std::size_t K = x.size();

    Trellis t;
    t.log_scores.resize(K);
    t.backpointers.resize(K);

    auto check_feasible = [&](std::size_t k) {
        const auto& row = t.log_scores[k];
        if (std::all_of(row.begin(), row.end(), [](double v) { return v == kNegInf; })) {
            throw InfeasibleObservationError(k + 1);
        }
    };

    for (std::size_t s = 0; s < kNumStates; ++s) {
        t.log_scores[0][s] = lm.log_initial[s] + lm.emission(x[0], s);
        t.backpointers[0][s] = symbol_at(s);
    }
    check_feasible(0);

    for (std::size_t k = 1; k < K; ++k) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            double best = kNegInf;
            std::size_t arg = 0;
            for (std::size_t i = 0; i < kNumStates; ++i) {
                const double cand = t.log_scores[k - 1][i] + lm.log_p[i][j];
                if (cand > best) {
                    best = cand;
                    arg = i;
                }
            }
            t.log_scores[k][j] = best + lm.emission(x[k], j);
            t.backpointers[k][j] = symbol_at(arg);
        }
        check_feasible(k);
    }
    return t;
}

SymbolSequence viterbi_decode(const SymbolSequence& x, const HmmModel& model)
{
    const Trellis trellis = build_trellis(x, model);
    const LogModel lm(model);
    const std::size_t K = x.size();

    const auto& last = trellis.log_scores.back();
    const double optimum = *std::max_element(last.begin(), last.end());
    const double floor = tie_floor(optimum);

    // suffix[k][j]: best log-probability of steps k+1..K given s_k = j.
    std::vector<Vector3> suffix(K);
    suffix[K - 1] = {0.0, 0.0, 0.0};
    for (std::size_t k = K - 1; k-- > 0;) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            double best = kNegInf;
            for (std::size_t i = 0; i < kNumStates; ++i) {
                best = std::max(best, lm.log_p[j][i] + lm.emission(x[k + 1], i) + suffix[k + 1][i]);
            }
            suffix[k][j] = best;
        }
    }

    SymbolSequence out(K);
    double prefix = 0.0;
    std::size_t prev = 0;
    for (std::size_t k = 0; k < K; ++k) {
        Vector3 step{};
        for (std::size_t s = 0; s < kNumStates; ++s) {
            const double enter = k == 0 ? lm.log_initial[s] : lm.log_p[prev][s];
            step[s] = prefix + enter + lm.emission(x[k], s);
        }
        std::size_t chosen = kNumStates;
        for (std::size_t s = 0; s < kNumStates; ++s) {
            if (step[s] + suffix[k][s] >= floor) {
                chosen = s;
                break;
            }
        }
        if (chosen == kNumStates) {
            // Only reachable if rounding pushed every continuation under the
            // floor; fall back to the best one.
            chosen = 0;
            for (std::size_t s = 1; s < kNumStates; ++s) {
                if (step[s] + suffix[k][s] > step[chosen] + suffix[k][chosen]) {
                    chosen = s;
                }
            }
        }
        out[k] = symbol_at(chosen);
        prefix = step[chosen];
        prev = chosen;
    }
    return out;
}

SymbolSequence brute_force_mlse(const SymbolSequence& x, const HmmModel& model)
{
    require_nonempty(x, "brute_force_mlse");
    if (x.size() > kBruteForceMaxLength) {
        throw SizeGuardError("brute_force_mlse: length " + std::to_string(x.size()) +
                             " exceeds the enumeration limit of " +
                             std::to_string(kBruteForceMaxLength));
    }
    require_valid(model);
    const std::size_t K = x.size();

    // Odometer over {-1, 0, +1}^K with position 0 most significant, so
    // sequences are visited in lexicographic order.
    auto for_each_sequence = [&](auto&& visit) {
        std::vector<std::size_t> digits(K, 0);
        SymbolSequence s(K, StateSymbol::Negative);
        while (true) {
            if (!visit(s)) {
                return;
            }
            std::size_t pos = K;
            while (pos > 0) {
                --pos;
                if (++digits[pos] < kNumStates) {
                    s[pos] = symbol_at(digits[pos]);
                    break;
                }
                digits[pos] = 0;
                s[pos] = StateSymbol::Negative;
                if (pos == 0) {
                    return;
                }
            }
        }
    };

    double optimum = kNegInf;
    for_each_sequence([&](const SymbolSequence& s) {
        optimum = std::max(optimum, joint_log_prob(x, s, model));
        return true;
    });
    if (optimum == kNegInf) {
        throw InfeasibleObservationError(1);
    }

    const double floor = tie_floor(optimum);
    SymbolSequence best;
    for_each_sequence([&](const SymbolSequence& s) {
        if (joint_log_prob(x, s, model) >= floor) {
            best = s;
            return false;
        }
        return true;
    });
    return best;
}

}  // namespace gridhmm
