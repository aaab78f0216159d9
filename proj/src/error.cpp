#include "gridhmm/error.hpp"

#include <sstream>

namespace gridhmm {

namespace {

std::string describe_degenerate(double lo, double hi)
{
    std::ostringstream os;
    os.precision(17);
    os << "degenerate detector configuration: delta_neg_zero = " << lo
       << " is not below delta_zero_pos = " << hi;
    return os.str();
}

std::string join_violations(const std::vector<std::string>& v)
{
    std::string out = "validation failed";
    for (const auto& s : v) {
        out += "\n  ";
        out += s;
    }
    return out;
}

}  // namespace

DegenerateConfigError::DegenerateConfigError(double delta_neg_zero, double delta_zero_pos)
    : Error(describe_degenerate(delta_neg_zero, delta_zero_pos)),
      delta_neg_zero_(delta_neg_zero),
      delta_zero_pos_(delta_zero_pos)
{
}

InfeasibleObservationError::InfeasibleObservationError(std::size_t step)
    : Error("observation at step " + std::to_string(step) +
            " has zero probability under every state"),
      step_(step)
{
}

ValidationError::ValidationError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations))
{
}

}  // namespace gridhmm
