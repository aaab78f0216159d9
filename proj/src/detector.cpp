#include "gridhmm/detector.hpp"

#include <cmath>
#include <sstream>

#include "gridhmm/error.hpp"

namespace gridhmm {

StateSymbol symbol_from_int(int value)
{
    if (value < -1 || value > 1) {
        throw ParameterError("state symbol must be -1, 0 or 1, got " + std::to_string(value));
    }
    return static_cast<StateSymbol>(value);
}

DetectorParams::DetectorParams(double m_neg, double m_zero, double m_pos, double sigma,
                               Vector3 priors)
    : means_{m_neg, m_zero, m_pos}, sigma_(sigma), priors_(priors)
{
    for (double m : means_) {
        if (!std::isfinite(m)) {
            throw ParameterError("detector means must be finite");
        }
    }
    if (!(m_neg < m_zero && m_zero < m_pos)) {
        std::ostringstream os;
        os << "detector means must satisfy m_neg < m_zero < m_pos, got (" << m_neg << ", "
           << m_zero << ", " << m_pos << ")";
        throw ParameterError(os.str());
    }
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw ParameterError("sigma must be positive and finite, got " + std::to_string(sigma));
    }
    double total = 0.0;
    for (double p : priors_) {
        if (!std::isfinite(p) || !(p > 0.0)) {
            throw ParameterError("priors must be strictly positive");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ParameterError("priors must sum to 1, got " + std::to_string(total));
    }
}

DetectorParams DetectorParams::from_nominal(double f0, double delta_f_min, double delta_f_max,
                                            double sigma, Vector3 priors)
{
    return DetectorParams(f0 - delta_f_min, f0, f0 + delta_f_max, sigma, priors);
}

DetectorParams DetectorParams::with_sigma(double sigma) const
{
    return DetectorParams(means_[0], means_[1], means_[2], sigma, priors_);
}

Thresholds::Thresholds(double delta_neg_zero, double delta_zero_pos)
    : delta_neg_zero_(delta_neg_zero), delta_zero_pos_(delta_zero_pos)
{
    if (!(delta_neg_zero < delta_zero_pos)) {
        throw DegenerateConfigError(delta_neg_zero, delta_zero_pos);
    }
}

Thresholds compute_thresholds(const DetectorParams& params)
{
    const double var = params.sigma() * params.sigma();
    const auto& pi = params.priors();
    const double eta_neg_zero = std::log(pi[0] / pi[1]);
    const double eta_zero_pos = std::log(pi[1] / pi[2]);

    const double lo = 0.5 * (params.m_neg() + params.m_zero()) +
                      eta_neg_zero * var / (params.m_zero() - params.m_neg());
    const double hi = 0.5 * (params.m_zero() + params.m_pos()) +
                      eta_zero_pos * var / (params.m_pos() - params.m_zero());
    return Thresholds(lo, hi);
}

StateSymbol classify(double z, const Thresholds& thresholds)
{
    if (!std::isfinite(z)) {
        throw DomainError("classify: measurement must be finite");
    }
    if (z < thresholds.delta_neg_zero()) {
        return StateSymbol::Negative;
    }
    if (z < thresholds.delta_zero_pos()) {
        return StateSymbol::Zero;
    }
    return StateSymbol::Positive;
}

std::array<Probability, kNumStates> error_probabilities(const DetectorParams& params,
                                                        const Thresholds& thresholds)
{
    const double s = params.sigma();
    const double lo = thresholds.delta_neg_zero();
    const double hi = thresholds.delta_zero_pos();

    const double pe_neg = q_function((lo - params.m_neg()) / s);
    const double pe_zero =
        1.0 - (q_function((lo - params.m_zero()) / s) - q_function((hi - params.m_zero()) / s));
    const double pe_pos = 1.0 - q_function((hi - params.m_pos()) / s);
    return {Probability(pe_neg), Probability(pe_zero), Probability(pe_pos)};
}

std::array<Probability, kNumStates> detection_probabilities(const DetectorParams& params,
                                                            const Thresholds& thresholds)
{
    const auto pe = error_probabilities(params, thresholds);
    return {pe[0].complement(), pe[1].complement(), pe[2].complement()};
}

}  // namespace gridhmm
