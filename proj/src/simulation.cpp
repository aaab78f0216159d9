#include "gridhmm/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "gridhmm/error.hpp"
#include "gridhmm/viterbi.hpp"

namespace gridhmm {

SymbolSequence simulate_states(const HmmModel& model, std::size_t length, RngStream& rng)
{
    if (length == 0) {
        throw ParameterError("simulate_states: length must be at least 1");
    }
    require_valid(model);

    SymbolSequence out(length);
    std::size_t state = sample_categorical(model.initial, rng);
    out[0] = symbol_at(state);
    for (std::size_t k = 1; k < length; ++k) {
        state = sample_categorical(model.transitions.p[state], rng);
        out[k] = symbol_at(state);
    }
    return out;
}

SymbolSequence emit_symbols(const SymbolSequence& hidden, const EmissionMatrix& emissions,
                            RngStream& rng)
{
    std::array<Vector3, kNumStates> columns{};
    for (std::size_t j = 0; j < kNumStates; ++j) {
        for (std::size_t i = 0; i < kNumStates; ++i) {
            columns[j][i] = emissions.r[i][j];
        }
    }
    SymbolSequence out(hidden.size());
    for (std::size_t k = 0; k < hidden.size(); ++k) {
        out[k] = symbol_at(sample_categorical(columns[index_of(hidden[k])], rng));
    }
    return out;
}

std::vector<double> synthesize_measurements(const SymbolSequence& hidden,
                                            const DetectorParams& params, RngStream& rng)
{
    std::vector<double> out(hidden.size());
    for (std::size_t k = 0; k < hidden.size(); ++k) {
        out[k] = sample_gaussian(params.mean(hidden[k]), params.sigma(), rng);
    }
    return out;
}

namespace {

std::size_t count_matches(const SymbolSequence& a, const SymbolSequence& b)
{
    std::size_t n = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        n += a[k] == b[k] ? 1 : 0;
    }
    return n;
}

}  // namespace

double accuracy(const SymbolSequence& estimate, const SymbolSequence& truth)
{
    if (estimate.size() != truth.size()) {
        throw ParameterError("accuracy: sequences differ in length (" +
                             std::to_string(estimate.size()) + " vs " +
                             std::to_string(truth.size()) + ")");
    }
    if (truth.empty()) {
        throw ParameterError("accuracy: sequences must be non-empty");
    }
    return static_cast<double>(count_matches(estimate, truth)) /
           static_cast<double>(truth.size());
}

TrialResult run_trial(const HmmModel& model, std::size_t length, RngStream& rng)
{
    TrialResult r;
    r.hidden = simulate_states(model, length, rng);
    r.emitted = emit_symbols(r.hidden, model.emissions, rng);
    r.decoded = viterbi_decode(r.emitted, model);
    r.ht_accuracy = accuracy(r.emitted, r.hidden);
    r.va_accuracy = accuracy(r.decoded, r.hidden);
    return r;
}

MonteCarloSummary run_monte_carlo(const MonteCarloConfig& config)
{
    if (config.trials == 0) {
        throw ParameterError("run_monte_carlo: trials must be at least 1");
    }
    if (config.length == 0) {
        throw ParameterError("run_monte_carlo: sequence length must be at least 1");
    }
    require_valid(config.model);

    struct Matches {
        std::size_t ht = 0;
        std::size_t va = 0;
    };
    std::vector<Matches> per_trial(config.trials);

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        try {
            for (std::size_t t = next++; t < config.trials && !failed; t = next++) {
                RngStream rng(config.base_seed, t);
                const TrialResult r = run_trial(config.model, config.length, rng);
                per_trial[t] = {count_matches(r.emitted, r.hidden),
                                count_matches(r.decoded, r.hidden)};
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            failed = true;
        }
    };

    unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(config.trials)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    // Reduce in trial order so the floating-point sums are independent of
    // scheduling.
    MonteCarloSummary s;
    s.trials = config.trials;
    s.length = config.length;
    const double K = static_cast<double>(config.length);
    double ht_sum = 0.0, va_sum = 0.0;
    for (const auto& m : per_trial) {
        ht_sum += 100.0 * static_cast<double>(m.ht) / K;
        va_sum += 100.0 * static_cast<double>(m.va) / K;
        ++s.histogram_ht[100 * m.ht / config.length];
        ++s.histogram_va[100 * m.va / config.length];
    }
    const double n = static_cast<double>(config.trials);
    s.ht_mean = ht_sum / n;
    s.va_mean = va_sum / n;
    double ht_ss = 0.0, va_ss = 0.0;
    for (const auto& m : per_trial) {
        const double dh = 100.0 * static_cast<double>(m.ht) / K - s.ht_mean;
        const double dv = 100.0 * static_cast<double>(m.va) / K - s.va_mean;
        ht_ss += dh * dh;
        va_ss += dv * dv;
    }
    s.ht_std = std::sqrt(ht_ss / n);
    s.va_std = std::sqrt(va_ss / n);
    return s;
}

Vector3 mean_occupancy(const HmmModel& model, std::size_t length)
{
    if (length == 0) {
        throw ParameterError("mean_occupancy: length must be at least 1");
    }
    Vector3 marginal = model.initial;
    Vector3 total = marginal;
    for (std::size_t k = 1; k < length; ++k) {
        marginal = left_multiply(marginal, model.transitions.p);
        for (std::size_t j = 0; j < kNumStates; ++j) {
            total[j] += marginal[j];
        }
    }
    for (double& w : total) {
        w /= static_cast<double>(length);
    }
    return total;
}

double expected_ht_accuracy(const HmmModel& model, std::size_t length)
{
    const Vector3 w = mean_occupancy(model, length);
    double acc = 0.0;
    for (std::size_t j = 0; j < kNumStates; ++j) {
        acc += w[j] * model.emissions.r[j][j];
    }
    return acc;
}

double sigma_from_snr_db(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

double snr_db_from_sigma(double sigma) { return 10.0 * std::log10(1.0 / sigma); }

namespace {

SweepRow sweep_point(const DetectorParams& params_template, double snr_db, double sigma)
{
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw ParameterError("detection_sweep: grid point gives non-positive or non-finite sigma");
    }
    SweepRow row{snr_db, sigma, std::nullopt};
    const DetectorParams params = params_template.with_sigma(sigma);
    try {
        const Thresholds t = compute_thresholds(params);
        const auto pd = detection_probabilities(params, t);
        row.detection = Vector3{pd[0], pd[1], pd[2]};
    } catch (const DegenerateConfigError&) {
        row.detection.reset();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> detection_sweep(const DetectorParams& params_template,
                                      const std::vector<double>& snr_db_grid)
{
    std::vector<SweepRow> rows;
    rows.reserve(snr_db_grid.size());
    for (double db : snr_db_grid) {
        if (!std::isfinite(db)) {
            throw ParameterError("detection_sweep: SNR grid values must be finite");
        }
        rows.push_back(sweep_point(params_template, db, sigma_from_snr_db(db)));
    }
    return rows;
}

std::vector<SweepRow> detection_sweep_sigma(const DetectorParams& params_template,
                                            const std::vector<double>& sigma_grid)
{
    std::vector<SweepRow> rows;
    rows.reserve(sigma_grid.size());
    for (double sigma : sigma_grid) {
        rows.push_back(sweep_point(params_template, snr_db_from_sigma(sigma), sigma));
    }
    return rows;
}

PredictionVector predict(const TransitionMatrix& transitions, const Vector3& initial,
                         std::size_t horizon)
{
    HmmModel check;
    check.transitions = transitions;
    check.emissions.r = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    check.initial = initial;
    require_valid(check);

    PredictionVector out{initial, horizon};
    for (std::size_t m = 0; m < horizon; ++m) {
        out.probs = left_multiply(out.probs, transitions.p);
    }
    return out;
}

}  // namespace gridhmm
