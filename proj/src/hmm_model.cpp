#include "gridhmm/hmm_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridhmm/error.hpp"

namespace gridhmm {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::optional<ModelViolation> check_entries(const Matrix3& m, ModelViolation::Kind kind)
{
    for (std::size_t i = 0; i < kNumStates; ++i) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            if (!in_unit_interval(m[i][j])) {
                return ModelViolation{kind, i, j, m[i][j]};
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::string ModelViolation::message() const
{
    std::ostringstream os;
    os.precision(12);
    switch (kind) {
    case Kind::TransitionEntryRange:
        os << "transition matrix entry (" << row << ", " << column << ") = " << value
           << " is outside [0, 1]";
        break;
    case Kind::TransitionRowSum:
        os << "transition matrix row " << row << " sums to " << value << ", expected 1";
        break;
    case Kind::EmissionEntryRange:
        os << "emission matrix entry (" << row << ", " << column << ") = " << value
           << " is outside [0, 1]";
        break;
    case Kind::EmissionColumnSum:
        os << "emission matrix column " << column << " sums to " << value << ", expected 1";
        break;
    case Kind::InitialEntryRange:
        os << "initial distribution component " << column << " = " << value
           << " is outside [0, 1]";
        break;
    case Kind::InitialSum:
        os << "initial distribution sums to " << value << ", expected 1";
        break;
    }
    return os.str();
}

std::optional<ModelViolation> validate(const HmmModel& model, double tolerance)
{
    using Kind = ModelViolation::Kind;
    const auto& p = model.transitions.p;
    const auto& r = model.emissions.r;

    if (auto v = check_entries(p, Kind::TransitionEntryRange)) {
        return v;
    }
    for (std::size_t i = 0; i < kNumStates; ++i) {
        const double sum = p[i][0] + p[i][1] + p[i][2];
        if (std::abs(sum - 1.0) > tolerance) {
            return ModelViolation{Kind::TransitionRowSum, i, 0, sum};
        }
    }
    if (auto v = check_entries(r, Kind::EmissionEntryRange)) {
        return v;
    }
    for (std::size_t j = 0; j < kNumStates; ++j) {
        const double sum = r[0][j] + r[1][j] + r[2][j];
        if (std::abs(sum - 1.0) > tolerance) {
            return ModelViolation{Kind::EmissionColumnSum, 0, j, sum};
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < kNumStates; ++i) {
        if (!in_unit_interval(model.initial[i])) {
            return ModelViolation{Kind::InitialEntryRange, 0, i, model.initial[i]};
        }
        total += model.initial[i];
    }
    if (std::abs(total - 1.0) > tolerance) {
        return ModelViolation{Kind::InitialSum, 0, 0, total};
    }
    return std::nullopt;
}

void require_valid(const HmmModel& model, double tolerance)
{
    if (auto v = validate(model, tolerance)) {
        throw ParameterError(v->message());
    }
}

EmissionMatrix build_emission_matrix(const DetectorParams& params)
{
    const Thresholds t = compute_thresholds(params);
    const double s = params.sigma();

    EmissionMatrix out;
    for (std::size_t j = 0; j < kNumStates; ++j) {
        const double m = params.means()[j];
        const double q_lo = q_function((t.delta_neg_zero() - m) / s);
        const double q_hi = q_function((t.delta_zero_pos() - m) / s);
        out.r[0][j] = 1.0 - q_lo;
        out.r[1][j] = q_lo - q_hi;
        out.r[2][j] = q_hi;
    }
    return out;
}

Vector3 left_multiply(const Vector3& v, const Matrix3& m)
{
    Vector3 out{};
    for (std::size_t j = 0; j < kNumStates; ++j) {
        out[j] = v[0] * m[0][j] + v[1] * m[1][j] + v[2] * m[2][j];
    }
    return out;
}

namespace {

using Pattern = std::array<std::array<bool, kNumStates>, kNumStates>;

Pattern boolean_product(const Pattern& a, const Pattern& b)
{
    Pattern out{};
    for (std::size_t i = 0; i < kNumStates; ++i) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            for (std::size_t k = 0; k < kNumStates; ++k) {
                out[i][j] = out[i][j] || (a[i][k] && b[k][j]);
            }
        }
    }
    return out;
}

// Wielandt: an n x n non-negative matrix is primitive iff its
// ((n-1)^2 + 1)-th power is strictly positive. For n = 3 that is P^5.
bool is_primitive(const Matrix3& p)
{
    Pattern base{};
    for (std::size_t i = 0; i < kNumStates; ++i) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            base[i][j] = p[i][j] > 0.0;
        }
    }
    Pattern power = base;
    for (int k = 1; k < 5; ++k) {
        power = boolean_product(power, base);
    }
    for (const auto& row : power) {
        for (bool positive : row) {
            if (!positive) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

Vector3 stationary_distribution(const TransitionMatrix& transitions)
{
    const auto& p = transitions.p;
    for (std::size_t i = 0; i < kNumStates; ++i) {
        for (std::size_t j = 0; j < kNumStates; ++j) {
            if (!in_unit_interval(p[i][j])) {
                throw ParameterError("stationary_distribution: transition entries must lie in [0, 1]");
            }
        }
        if (std::abs(p[i][0] + p[i][1] + p[i][2] - 1.0) > kUserStochasticTolerance) {
            throw ParameterError("stationary_distribution: transition rows must sum to 1");
        }
    }
    if (!is_primitive(p)) {
        throw StructuralError(
            "stationary_distribution: transition matrix is reducible or periodic");
    }

    constexpr double kConvergence = 1e-12;
    constexpr long kMaxIterations = 1'000'000;

    Vector3 pi = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (long it = 0; it < kMaxIterations; ++it) {
        Vector3 next = left_multiply(pi, p);
        const double total = next[0] + next[1] + next[2];
        double delta = 0.0;
        for (std::size_t j = 0; j < kNumStates; ++j) {
            next[j] /= total;
            delta = std::max(delta, std::abs(next[j] - pi[j]));
        }
        pi = next;
        if (delta <= kConvergence) {
            return pi;
        }
    }
    throw StructuralError("stationary_distribution: power iteration did not converge");
}

}  // namespace gridhmm
