#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridhmm/detector.hpp"
#include "gridhmm/hmm_model.hpp"

namespace gridhmm {

/// Everything a CLI run needs, validated on load.
///
/// File format: `key = value` lines grouped under `[section]` headers, `#`
/// starts a comment. Matrix sections hold three rows of three numbers
/// (comma- or space-separated).
///
///   [detector]      m_neg, m_zero, m_pos  -- or --  f0, delta_f_min, delta_f_max
///                   sigma, priors = a, b, c
///   [transitions]   3 rows, row i = P(next | current = i)
///   [emissions]     optional, 3 rows, row i = P(emitted = i | state)
///   [simulation]    K, trials, base_seed, horizon, snr_db = ..., sigma_grid = ...
struct RunConfig {
    DetectorParams detector;
    std::optional<TransitionMatrix> transitions;
    std::optional<EmissionMatrix> explicit_emissions;
    std::size_t length = 100;
    std::size_t trials = 10'000;
    std::uint64_t base_seed = 0;
    std::vector<double> snr_db_grid;
    std::vector<double> sigma_grid;
    std::size_t horizon = 10;
    /// Informational messages produced while loading (applied defaults).
    std::vector<std::string> notices;

    /// Explicit emission matrix when given, otherwise the analytic one.
    EmissionMatrix emissions() const;
    /// (P, R, priors). Throws ValidationError if no transition matrix was given.
    HmmModel model() const;
};

/// Throws IoError if the file cannot be read, ValidationError listing every
/// syntax error (with line numbers) and invariant violation otherwise.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text);

struct MeasurementRecord {
    std::string key_text;  // index or timestamp exactly as written
    double key = 0.0;
    double z_hz = 0.0;
    std::size_t line = 0;  // 1-based line in the source file
};

/// Frequency samples keyed by a strictly increasing index (`k`) or numeric
/// timestamp (`timestamp`).
struct MeasurementSeries {
    std::string key_column;
    std::vector<MeasurementRecord> records;
};

/// CSV with a header whose first column is `k` or `timestamp` and which has
/// a `z_hz` column; other columns are ignored, `#` lines are skipped.
/// Throws IoError if unreadable, ValidationError with row numbers otherwise.
MeasurementSeries load_measurements(const std::filesystem::path& path);
MeasurementSeries parse_measurements(std::string_view text);

/// Shortest round-trippable form (17 significant digits).
std::string format_double(double v);

}  // namespace gridhmm
