#pragma once

#include <cstddef>
#include <vector>

#include "gridhmm/hmm_model.hpp"
#include "gridhmm/state.hpp"

namespace gridhmm {

/// Two joint log-probabilities closer than this (relative to the optimum,
/// floored at 1) are treated as tied. Sums taken in different orders differ
/// by a few ulps, so exact float equality cannot identify ties.
inline constexpr double kTieTolerance = 1e-9;

/// Forward partial-path scores and backpointers, K rows x 3 states.
///
/// log_scores[0][s]   = log Pi0(s) + log r(x_1, s)
/// log_scores[k][j]   = max_i (log_scores[k-1][i] + log p(i, j)) + log r(x_k, j)
/// backpointers[k][j] = smallest maximising i (row 0 is unused).
struct Trellis {
    std::vector<Vector3> log_scores;
    std::vector<std::array<StateSymbol, kNumStates>> backpointers;

    std::size_t length() const { return log_scores.size(); }
};

/// log[ Pi0(s_1) prod_k r(x_k, s_k) prod_{k>=2} p(s_{k-1}, s_k) ].
/// -infinity when any factor is zero. Throws ParameterError on length
/// mismatch or empty input.
double joint_log_prob(const SymbolSequence& x, const SymbolSequence& s, const HmmModel& model);

/// Forward pass. Throws InfeasibleObservationError if every score in some
/// row is -infinity.
Trellis build_trellis(const SymbolSequence& x, const HmmModel& model);

/// Maximum-likelihood state sequence for the observed symbols.
///
/// Among sequences whose score is tied with the optimum (see kTieTolerance)
/// the lexicographically smallest under -1 < 0 < +1 is returned. The forward
/// trellis supplies the optimum; a backward pass of best suffix scores then
/// lets the path be chosen greedily from k = 1, smallest state first.
/// O(9K) time, O(3K) space.
SymbolSequence viterbi_decode(const SymbolSequence& x, const HmmModel& model);

inline constexpr std::size_t kBruteForceMaxLength = 12;

/// Exhaustive 3^K search with the same scoring and tie rule as
/// viterbi_decode. Throws SizeGuardError for K > 12.
SymbolSequence brute_force_mlse(const SymbolSequence& x, const HmmModel& model);

}  // namespace gridhmm
