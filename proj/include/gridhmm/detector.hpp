#pragma once

#include <array>

#include "gridhmm/gaussian.hpp"
#include "gridhmm/state.hpp"

namespace gridhmm {

/// Gaussian measurement model for the three-hypothesis test.
///
/// Measurements under state i are N(mean(i), sigma^2). The priors double as
/// the initial state distribution of the HMM.
class DetectorParams {
public:
    /// Throws ParameterError unless m_neg < m_zero < m_pos, sigma > 0 and the
    /// priors are strictly positive and sum to 1 within 1e-9.
    DetectorParams(double m_neg, double m_zero, double m_pos, double sigma, Vector3 priors);

    /// Means given as nominal frequency and the two deviation magnitudes:
    /// (f0 - delta_f_min, f0, f0 + delta_f_max).
    static DetectorParams from_nominal(double f0, double delta_f_min, double delta_f_max,
                                       double sigma, Vector3 priors);

    double m_neg() const { return means_[0]; }
    double m_zero() const { return means_[1]; }
    double m_pos() const { return means_[2]; }
    double mean(StateSymbol s) const { return means_[index_of(s)]; }
    const Vector3& means() const { return means_; }
    double sigma() const { return sigma_; }
    const Vector3& priors() const { return priors_; }

    /// Same means and priors, different noise level.
    DetectorParams with_sigma(double sigma) const;

private:
    Vector3 means_;
    double sigma_;
    Vector3 priors_;
};

/// Decision boundaries on the measurement axis.
class Thresholds {
public:
    /// Throws DegenerateConfigError unless delta_neg_zero < delta_zero_pos.
    Thresholds(double delta_neg_zero, double delta_zero_pos);

    double delta_neg_zero() const { return delta_neg_zero_; }
    double delta_zero_pos() const { return delta_zero_pos_; }

private:
    double delta_neg_zero_;
    double delta_zero_pos_;
};

/// Prior-adjusted ML thresholds:
///   delta_{-1,0} = (m_-1 + m_0)/2 + ln(pi(-1)/pi(0)) sigma^2 / (m_0 - m_-1)
///   delta_{0,1}  = (m_0 + m_1)/2  + ln(pi(0)/pi(1))  sigma^2 / (m_1 - m_0)
Thresholds compute_thresholds(const DetectorParams& params);

/// Three-region rule. The middle region is left-closed: a measurement exactly
/// on delta_{-1,0} is Zero and one exactly on delta_{0,1} is Positive.
StateSymbol classify(double z, const Thresholds& thresholds);

/// (P_e,-1, P_e,0, P_e,1): probability of deciding anything but the true state.
std::array<Probability, kNumStates> error_probabilities(const DetectorParams& params,
                                                        const Thresholds& thresholds);

/// Elementwise complement of error_probabilities.
std::array<Probability, kNumStates> detection_probabilities(const DetectorParams& params,
                                                            const Thresholds& thresholds);

}  // namespace gridhmm
