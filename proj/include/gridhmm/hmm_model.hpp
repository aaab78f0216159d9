#pragma once

#include <optional>
#include <string>

#include "gridhmm/detector.hpp"
#include "gridhmm/state.hpp"

namespace gridhmm {

/// Row-stochastic: p(i, j) = P(s[k] = j | s[k-1] = i).
struct TransitionMatrix {
    Matrix3 p{};

    double operator()(StateSymbol from, StateSymbol to) const
    {
        return p[index_of(from)][index_of(to)];
    }
};

/// Column-stochastic: r(i, j) = P(x[k] = i | s[k] = j). Rows are emitted
/// symbols, columns are true states.
struct EmissionMatrix {
    Matrix3 r{};

    double operator()(StateSymbol emitted, StateSymbol state) const
    {
        return r[index_of(emitted)][index_of(state)];
    }
};

struct HmmModel {
    TransitionMatrix transitions;
    EmissionMatrix emissions;
    Vector3 initial{};
};

/// Tolerance for stochasticity of hand-typed matrices.
inline constexpr double kUserStochasticTolerance = 1e-9;
/// Tolerance for matrices built by this library.
inline constexpr double kBuiltStochasticTolerance = 1e-12;

/// First invariant violated by a model, with its location and size.
struct ModelViolation {
    enum class Kind {
        TransitionEntryRange,
        TransitionRowSum,
        EmissionEntryRange,
        EmissionColumnSum,
        InitialEntryRange,
        InitialSum,
    };

    Kind kind;
    std::size_t row = 0;     // row of the offending entry or row sum
    std::size_t column = 0;  // column of the offending entry or column sum
    double value = 0.0;      // offending entry, or the sum that missed 1

    std::string message() const;
};

/// Checks, in order: P entries, P row sums, R entries, R column sums,
/// initial entries, initial sum. Returns the first violation or nullopt.
std::optional<ModelViolation> validate(const HmmModel& model,
                                       double tolerance = kUserStochasticTolerance);

/// Throws ParameterError carrying ModelViolation::message() if invalid.
void require_valid(const HmmModel& model, double tolerance = kUserStochasticTolerance);

/// Emission matrix of the Gaussian three-hypothesis detector. For true state
/// j with mean m_j:
///   r(-1, j) = 1 - Q((delta_{-1,0} - m_j) / sigma)
///   r( 0, j) = Q((delta_{-1,0} - m_j) / sigma) - Q((delta_{0,1} - m_j) / sigma)
///   r(+1, j) = Q((delta_{0,1} - m_j) / sigma)
/// Propagates DegenerateConfigError from compute_thresholds.
EmissionMatrix build_emission_matrix(const DetectorParams& params);

/// Stationary law pi with pi P = pi (row-vector convention).
///
/// The chain must be primitive (irreducible and aperiodic); for three states
/// that is equivalent to P^5 being strictly positive, which is checked first.
/// Power iteration then runs until successive iterates differ by at most
/// 1e-12 in max-norm, for at most 10^6 steps. Throws StructuralError for a
/// non-primitive chain or on non-convergence.
Vector3 stationary_distribution(const TransitionMatrix& transitions);

/// Row vector times matrix.
Vector3 left_multiply(const Vector3& v, const Matrix3& m);

}  // namespace gridhmm
