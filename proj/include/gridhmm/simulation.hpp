#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridhmm/detector.hpp"
#include "gridhmm/gaussian.hpp"
#include "gridhmm/hmm_model.hpp"
#include "gridhmm/state.hpp"

namespace gridhmm {

/// s_1 ~ initial, s_k | s_{k-1} = i ~ row i of P.
SymbolSequence simulate_states(const HmmModel& model, std::size_t length, RngStream& rng);

/// x_k | s_k = j ~ column j of R, independently per step.
SymbolSequence emit_symbols(const SymbolSequence& hidden, const EmissionMatrix& emissions,
                            RngStream& rng);

/// z_k ~ N(m_{s_k}, sigma^2), independently per step.
std::vector<double> synthesize_measurements(const SymbolSequence& hidden,
                                            const DetectorParams& params, RngStream& rng);

/// Fraction of positions where estimate and truth agree.
double accuracy(const SymbolSequence& estimate, const SymbolSequence& truth);

struct TrialResult {
    SymbolSequence hidden;
    SymbolSequence emitted;
    SymbolSequence decoded;
    double ht_accuracy = 0.0;
    double va_accuracy = 0.0;
};

/// One Monte Carlo trial on its own stream: simulate_states, then
/// emit_symbols, then viterbi_decode, all drawing from `rng` in that order.
TrialResult run_trial(const HmmModel& model, std::size_t length, RngStream& rng);

/// Accuracies are bucketed by whole percentage point: bin b holds accuracies
/// in [b, b+1) percent, b = 0..100, so 100% lands in bin 100.
inline constexpr std::size_t kHistogramBins = 101;

struct MonteCarloSummary {
    std::size_t trials = 0;
    std::size_t length = 0;
    // Accuracy statistics in percent; std is the population (1/n) value,
    // i.e. the moment-matched Gaussian fit.
    double ht_mean = 0.0;
    double ht_std = 0.0;
    double va_mean = 0.0;
    double va_std = 0.0;
    std::vector<std::size_t> histogram_ht = std::vector<std::size_t>(kHistogramBins, 0);
    std::vector<std::size_t> histogram_va = std::vector<std::size_t>(kHistogramBins, 0);
};

struct MonteCarloConfig {
    HmmModel model;
    std::size_t length = 100;
    std::size_t trials = 10'000;
    std::uint64_t base_seed = 0;
    /// 0 selects std::thread::hardware_concurrency().
    unsigned threads = 1;
};

/// Runs `trials` independent trials, trial t on RngStream(base_seed, t), and
/// reduces them in trial order. The result does not depend on `threads`.
MonteCarloSummary run_monte_carlo(const MonteCarloConfig& config);

/// Mean over a length-K chain of the state-occupancy marginals,
/// w_j = (1/K) sum_k P(s_k = j), propagated exactly from the initial law.
Vector3 mean_occupancy(const HmmModel& model, std::size_t length);

/// Expected hypothesis-test accuracy sum_j w_j r(j, j) for a length-K chain.
double expected_ht_accuracy(const HmmModel& model, std::size_t length);

/// SNR is 1/sigma, in decibels as 10 log10(1/sigma).
double sigma_from_snr_db(double snr_db);
double snr_db_from_sigma(double sigma);

struct SweepRow {
    double snr_db = 0.0;
    double sigma = 0.0;
    /// Empty when the prior-adjusted thresholds are degenerate at this sigma.
    std::optional<Vector3> detection;
};

/// Detection probabilities (P_d,-1, P_d,0, P_d,1) at each SNR in dB. The
/// template's sigma is ignored. Degenerate rows are reported, not thrown.
std::vector<SweepRow> detection_sweep(const DetectorParams& params_template,
                                      const std::vector<double>& snr_db_grid);

/// Same, for an explicit grid of sigma values.
std::vector<SweepRow> detection_sweep_sigma(const DetectorParams& params_template,
                                            const std::vector<double>& sigma_grid);

struct PredictionVector {
    Vector3 probs{};
    std::size_t horizon = 0;
};

/// initial * P^horizon, row-vector convention.
PredictionVector predict(const TransitionMatrix& transitions, const Vector3& initial,
                         std::size_t horizon);

}  // namespace gridhmm
