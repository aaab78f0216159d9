#include "gridhmm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "gridhmm/error.hpp"
#include "gridhmm/io.hpp"
#include "gridhmm/simulation.hpp"
#include "gridhmm/viterbi.hpp"

namespace gridhmm {

namespace {

struct Options {
    std::string config;
    std::string input;
    std::string output = "stdout";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    unsigned threads = 0;
};

const char* kDefaultSweepNote = "no snr_db or sigma_grid in config; sweeping 0..20 dB in 0.5 dB steps";

std::vector<double> default_snr_grid()
{
    std::vector<double> g;
    for (int i = 0; i <= 40; ++i) {
        g.push_back(0.5 * i);
    }
    return g;
}

void cmd_emission(const RunConfig& cfg, std::ostream& out)
{
    const Thresholds t = compute_thresholds(cfg.detector);
    const EmissionMatrix r = cfg.emissions();
    out << "emitted,state_neg,state_zero,state_pos\n";
    for (std::size_t i = 0; i < kNumStates; ++i) {
        out << to_int(symbol_at(i));
        for (std::size_t j = 0; j < kNumStates; ++j) {
            out << ',' << format_double(r.r[i][j]);
        }
        out << '\n';
    }
    out << "# command=emission source=" << (cfg.explicit_emissions ? "config" : "analytic")
        << " delta_neg_zero=" << format_double(t.delta_neg_zero())
        << " delta_zero_pos=" << format_double(t.delta_zero_pos()) << '\n';
}

SymbolSequence detect_all(const MeasurementSeries& series, const Thresholds& t)
{
    SymbolSequence x;
    x.reserve(series.records.size());
    for (const auto& rec : series.records) {
        x.push_back(classify(rec.z_hz, t));
    }
    return x;
}

void cmd_detect(const RunConfig& cfg, const MeasurementSeries& series, std::ostream& out)
{
    const Thresholds t = compute_thresholds(cfg.detector);
    const SymbolSequence x = detect_all(series, t);
    out << series.key_column << ",z_hz,x\n";
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto& rec = series.records[k];
        out << rec.key_text << ',' << format_double(rec.z_hz) << ',' << to_int(x[k]) << '\n';
    }
    out << "# command=detect records=" << x.size() << '\n';
}

void cmd_decode(const RunConfig& cfg, const MeasurementSeries& series, std::ostream& out)
{
    const HmmModel model = cfg.model();
    const Thresholds t = compute_thresholds(cfg.detector);
    const SymbolSequence x = detect_all(series, t);
    const SymbolSequence s_star = viterbi_decode(x, model);
    out << series.key_column << ",z_hz,x,s_star\n";
    std::size_t changed = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const auto& rec = series.records[k];
        out << rec.key_text << ',' << format_double(rec.z_hz) << ',' << to_int(x[k]) << ','
            << to_int(s_star[k]) << '\n';
        changed += x[k] != s_star[k] ? 1 : 0;
    }
    out << "# command=decode records=" << x.size() << " corrected=" << changed << '\n';
}

void cmd_simulate(const RunConfig& cfg, std::uint64_t seed, std::ostream& out)
{
    const HmmModel model = cfg.model();
    const Thresholds t = compute_thresholds(cfg.detector);
    RngStream rng(seed, 0);
    const SymbolSequence s = simulate_states(model, cfg.length, rng);
    const std::vector<double> z = synthesize_measurements(s, cfg.detector, rng);
    out << "k,s,z_hz,x\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out << (k + 1) << ',' << to_int(s[k]) << ',' << format_double(z[k]) << ','
            << to_int(classify(z[k], t)) << '\n';
    }
    out << "# command=simulate K=" << cfg.length << " seed=" << seed << '\n';
}

void cmd_montecarlo(const RunConfig& cfg, std::uint64_t seed, std::size_t trials,
                    unsigned threads, std::ostream& out)
{
    MonteCarloConfig mc;
    mc.model = cfg.model();
    mc.length = cfg.length;
    mc.trials = trials;
    mc.base_seed = seed;
    mc.threads = threads;
    const MonteCarloSummary s = run_monte_carlo(mc);

    out << "bin_pct,ht_count,va_count\n";
    for (std::size_t b = 0; b < kHistogramBins; ++b) {
        out << b << ',' << s.histogram_ht[b] << ',' << s.histogram_va[b] << '\n';
    }
    out << "# command=montecarlo trials=" << s.trials << " K=" << s.length
        << " base_seed=" << seed << " ht_mean=" << format_double(s.ht_mean)
        << " ht_std=" << format_double(s.ht_std) << " va_mean=" << format_double(s.va_mean)
        << " va_std=" << format_double(s.va_std)
        << " ht_expected=" << format_double(100.0 * expected_ht_accuracy(mc.model, mc.length))
        << '\n';
}

void cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    std::vector<SweepRow> rows;
    if (!cfg.sigma_grid.empty()) {
        rows = detection_sweep_sigma(cfg.detector, cfg.sigma_grid);
    } else if (!cfg.snr_db_grid.empty()) {
        rows = detection_sweep(cfg.detector, cfg.snr_db_grid);
    } else {
        err << "notice: " << kDefaultSweepNote << '\n';
        rows = detection_sweep(cfg.detector, default_snr_grid());
    }
    out << "snr_db,sigma,pd_neg,pd_zero,pd_pos,status\n";
    std::size_t degenerate = 0;
    for (const auto& row : rows) {
        out << format_double(row.snr_db) << ',' << format_double(row.sigma);
        if (row.detection) {
            for (double p : *row.detection) {
                out << ',' << format_double(p);
            }
            out << ",ok\n";
        } else {
            out << ",,,,degenerate\n";
            ++degenerate;
        }
    }
    out << "# command=sweep rows=" << rows.size() << " degenerate=" << degenerate << '\n';
}

void cmd_predict(const RunConfig& cfg, std::ostream& out)
{
    if (!cfg.transitions) {
        throw ValidationError({"transitions: this command needs a [transitions] matrix"});
    }
    out << "m,p_neg,p_zero,p_pos\n";
    PredictionVector pv = predict(*cfg.transitions, cfg.detector.priors(), 0);
    for (std::size_t m = 0; m <= cfg.horizon; ++m) {
        if (m > 0) {
            pv = predict(*cfg.transitions, pv.probs, 1);
            pv.horizon = m;
        }
        out << m << ',' << format_double(pv.probs[0]) << ',' << format_double(pv.probs[1])
            << ',' << format_double(pv.probs[2]) << '\n';
    }
    out << "# command=predict horizon=" << cfg.horizon << '\n';
}

void emit(const std::string& data, const std::string& target, std::ostream& out)
{
    if (target.empty() || target == "stdout" || target == "-") {
        out << data;
        out.flush();
        return;
    }
    std::ofstream file(target, std::ios::binary);
    if (!file) {
        throw IoError("cannot open output file " + target);
    }
    file << data;
    if (!file) {
        throw IoError("error writing " + target);
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Grid-frequency deviation estimation with a three-hypothesis detector and "
                 "Viterbi decoding"};
    app.name("gridhmm");
    app.require_subcommand(1);
    app.fallthrough();

    Options opt;
    app.add_option("--config", opt.config, "Run configuration file");
    app.add_option("--input", opt.input, "Measurement CSV (k,z_hz or timestamp,z_hz)");
    app.add_option("--output", opt.output, "Output file, or stdout");
    app.add_option("--seed", opt.seed, "Base seed, overrides the config");
    app.add_option("--trials", opt.trials, "Monte Carlo trials, overrides the config")
        ->check(CLI::PositiveNumber);
    app.add_option("--threads", opt.threads, "Worker threads for montecarlo (0 = all cores)");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"emission", "Print the emission matrix and thresholds"},
        {"detect", "Classify each measurement"},
        {"decode", "Classify measurements, then Viterbi-decode the symbols"},
        {"simulate", "Generate a synthetic k,s,z_hz,x trace"},
        {"montecarlo", "Hypothesis-test vs Viterbi accuracy over many trials"},
        {"sweep", "Detection probabilities versus SNR"},
        {"predict", "State distribution over horizons 0..m"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (opt.config.empty()) {
            throw ValidationError({"--config is required"});
        }
        const RunConfig cfg = parse_config(opt.config);
        for (const auto& n : cfg.notices) {
            err << "notice: " << n << '\n';
        }

        std::optional<MeasurementSeries> series;
        if (command == "detect" || command == "decode") {
            if (opt.input.empty()) {
                throw ValidationError({"--input is required for " + command});
            }
            series = load_measurements(opt.input);
        }

        const std::uint64_t seed = opt.seed.value_or(cfg.base_seed);
        std::ostringstream data;
        if (command == "emission") {
            cmd_emission(cfg, data);
        } else if (command == "detect") {
            cmd_detect(cfg, *series, data);
        } else if (command == "decode") {
            cmd_decode(cfg, *series, data);
        } else if (command == "simulate") {
            cmd_simulate(cfg, seed, data);
        } else if (command == "montecarlo") {
            cmd_montecarlo(cfg, seed, opt.trials.value_or(cfg.trials), opt.threads, data);
        } else if (command == "sweep") {
            cmd_sweep(cfg, data, err);
        } else if (command == "predict") {
            cmd_predict(cfg, data);
        }
        emit(data.str(), opt.output, out);
        return kExitOk;
    } catch (const IoError& e) {
        err << "gridhmm " << command << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        err << "gridhmm " << command << ": " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace gridhmm
