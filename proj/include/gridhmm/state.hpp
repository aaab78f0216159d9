#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace gridhmm {

/// Ternary frequency-deviation label. Used both for hidden states and for
/// the symbols emitted by the detector. Ordered Negative < Zero < Positive.
enum class StateSymbol : std::int8_t { Negative = -1, Zero = 0, Positive = 1 };

inline constexpr std::size_t kNumStates = 3;
inline constexpr std::array<StateSymbol, kNumStates> kAllStates = {
    StateSymbol::Negative, StateSymbol::Zero, StateSymbol::Positive};

/// Position of a symbol in every 3-vector and 3x3 matrix: -1 -> 0, 0 -> 1, +1 -> 2.
constexpr std::size_t index_of(StateSymbol s)
{
    return static_cast<std::size_t>(static_cast<int>(s) + 1);
}

constexpr StateSymbol symbol_at(std::size_t index)
{
    return static_cast<StateSymbol>(static_cast<int>(index) - 1);
}

constexpr int to_int(StateSymbol s) { return static_cast<int>(s); }

/// Throws ParameterError unless value is -1, 0 or +1.
StateSymbol symbol_from_int(int value);

using SymbolSequence = std::vector<StateSymbol>;

using Vector3 = std::array<double, kNumStates>;
using Matrix3 = std::array<Vector3, kNumStates>;

}  // namespace gridhmm
