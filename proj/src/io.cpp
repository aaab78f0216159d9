#include "gridhmm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gridhmm/error.hpp"

namespace gridhmm {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view s)
{
    const auto hash = s.find('#');
    return hash == std::string_view::npos ? s : s.substr(0, hash);
}

std::optional<double> parse_finite(std::string_view text)
{
    text = trim(text);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() ||
        !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

template <typename Int>
std::optional<Int> parse_integer(std::string_view text)
{
    text = trim(text);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return v;
}

// Numbers separated by commas and/or whitespace.
std::optional<std::vector<double>> parse_list(std::string_view text)
{
    std::vector<double> out;
    std::string token;
    auto flush = [&]() -> bool {
        if (token.empty()) {
            return true;
        }
        auto v = parse_finite(token);
        token.clear();
        if (!v) {
            return false;
        }
        out.push_back(*v);
        return true;
    };
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
            if (!flush()) {
                return std::nullopt;
            }
        } else {
            token.push_back(c);
        }
    }
    if (!flush()) {
        return std::nullopt;
    }
    return out;
}

struct Entry {
    std::string value;
    std::size_t line;
};

struct RawConfig {
    // section -> key -> entry
    std::map<std::string, std::map<std::string, Entry>> values;
    // section -> matrix rows
    std::map<std::string, std::vector<Entry>> rows;
};

const std::map<std::string, std::vector<std::string>>& known_keys()
{
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"detector",
         {"m_neg", "m_zero", "m_pos", "f0", "delta_f_min", "delta_f_max", "sigma", "priors"}},
        {"simulation", {"K", "trials", "base_seed", "horizon", "snr_db", "sigma_grid"}},
    };
    return keys;
}

bool is_matrix_section(const std::string& s) { return s == "transitions" || s == "emissions"; }

RawConfig tokenize(std::string_view text, std::vector<std::string>& errors)
{
    RawConfig raw;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto line_view = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto line = trim(strip_comment(line_view));
        if (line.empty()) {
            continue;
        }
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back(where + "unterminated section header");
                continue;
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!is_matrix_section(section) && !known_keys().contains(section)) {
                errors.push_back(where + "unknown section [" + section + "]");
            }
            continue;
        }
        if (section.empty()) {
            errors.push_back(where + "entry outside of any section");
            continue;
        }
        if (is_matrix_section(section)) {
            raw.rows[section].push_back({std::string(line), line_no});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back(where + "expected `key = value`");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            errors.push_back(where + "missing key before `=`");
            continue;
        }
        const auto it = known_keys().find(section);
        if (it != known_keys().end() &&
            std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
            errors.push_back(where + "unknown key `" + key + "` in [" + section + "]");
            continue;
        }
        auto& slot = raw.values[section];
        if (slot.contains(key)) {
            errors.push_back(where + "duplicate key `" + key + "` in [" + section + "]");
            continue;
        }
        slot[key] = {value, line_no};
    }
    return raw;
}

class ConfigReader {
public:
    ConfigReader(const RawConfig& raw, std::vector<std::string>& errors)
        : raw_(raw), errors_(errors)
    {
    }

    const Entry* find(const std::string& section, const std::string& key) const
    {
        const auto s = raw_.values.find(section);
        if (s == raw_.values.end()) {
            return nullptr;
        }
        const auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }

    std::optional<double> number(const std::string& section, const std::string& key)
    {
        const Entry* e = find(section, key);
        if (!e) {
            return std::nullopt;
        }
        auto v = parse_finite(e->value);
        if (!v) {
            error(*e, key, "expected a finite number, got `" + e->value + "`");
        }
        return v;
    }

    template <typename Int>
    std::optional<Int> integer(const std::string& section, const std::string& key)
    {
        const Entry* e = find(section, key);
        if (!e) {
            return std::nullopt;
        }
        auto v = parse_integer<Int>(e->value);
        if (!v) {
            error(*e, key, "expected a non-negative integer, got `" + e->value + "`");
        }
        return v;
    }

    std::optional<std::vector<double>> list(const std::string& section, const std::string& key)
    {
        const Entry* e = find(section, key);
        if (!e) {
            return std::nullopt;
        }
        auto v = parse_list(e->value);
        if (!v) {
            error(*e, key, "expected a list of finite numbers, got `" + e->value + "`");
        }
        return v;
    }

    std::optional<Matrix3> matrix(const std::string& section)
    {
        const auto it = raw_.rows.find(section);
        if (it == raw_.rows.end()) {
            return std::nullopt;
        }
        const auto& rows = it->second;
        if (rows.size() != kNumStates) {
            errors_.push_back(section + ": expected 3 rows, got " + std::to_string(rows.size()));
            return std::nullopt;
        }
        Matrix3 m{};
        bool ok = true;
        for (std::size_t i = 0; i < kNumStates; ++i) {
            auto values = parse_list(rows[i].value);
            if (!values || values->size() != kNumStates) {
                errors_.push_back("line " + std::to_string(rows[i].line) + ": " + section +
                                  " row " + std::to_string(i) +
                                  " must hold three finite numbers");
                ok = false;
                continue;
            }
            std::copy(values->begin(), values->end(), m[i].begin());
        }
        return ok ? std::optional<Matrix3>(m) : std::nullopt;
    }

    void error(const Entry& e, const std::string& key, const std::string& what)
    {
        errors_.push_back("line " + std::to_string(e.line) + ": `" + key + "`: " + what);
    }

    void error(const std::string& what) { errors_.push_back(what); }

private:
    const RawConfig& raw_;
    std::vector<std::string>& errors_;
};

}  // namespace

EmissionMatrix RunConfig::emissions() const
{
    return explicit_emissions ? *explicit_emissions : build_emission_matrix(detector);
}

HmmModel RunConfig::model() const
{
    if (!transitions) {
        throw ValidationError({"transitions: this command needs a [transitions] matrix"});
    }
    return HmmModel{*transitions, emissions(), detector.priors()};
}

RunConfig parse_config_text(std::string_view text)
{
    std::vector<std::string> errors;
    std::vector<std::string> notices;
    const RawConfig raw = tokenize(text, errors);
    ConfigReader rd(raw, errors);

    // Means: exactly one convention.
    const bool has_direct = rd.find("detector", "m_neg") || rd.find("detector", "m_zero") ||
                            rd.find("detector", "m_pos");
    const bool has_nominal = rd.find("detector", "f0") || rd.find("detector", "delta_f_min") ||
                             rd.find("detector", "delta_f_max");
    std::optional<Vector3> means;
    if (has_direct && has_nominal) {
        rd.error("detector: means given both as (m_neg, m_zero, m_pos) and as "
                 "(f0, delta_f_min, delta_f_max); use one convention");
    } else if (has_direct) {
        auto a = rd.number("detector", "m_neg");
        auto b = rd.number("detector", "m_zero");
        auto c = rd.number("detector", "m_pos");
        for (const char* k : {"m_neg", "m_zero", "m_pos"}) {
            if (!rd.find("detector", k)) {
                rd.error(std::string("detector: missing `") + k + "`");
            }
        }
        if (a && b && c) {
            means = Vector3{*a, *b, *c};
        }
    } else if (has_nominal) {
        auto f0 = rd.number("detector", "f0");
        auto dmin = rd.number("detector", "delta_f_min");
        auto dmax = rd.number("detector", "delta_f_max");
        for (const char* k : {"f0", "delta_f_min", "delta_f_max"}) {
            if (!rd.find("detector", k)) {
                rd.error(std::string("detector: missing `") + k + "`");
            }
        }
        if (f0 && dmin && dmax) {
            means = Vector3{*f0 - *dmin, *f0, *f0 + *dmax};
        }
    } else {
        rd.error("detector: means are required (m_neg, m_zero, m_pos or f0, delta_f_min, "
                 "delta_f_max)");
    }
    if (means && !((*means)[0] < (*means)[1] && (*means)[1] < (*means)[2])) {
        rd.error("detector: means must satisfy m_neg < m_zero < m_pos, got (" +
                 format_double((*means)[0]) + ", " + format_double((*means)[1]) + ", " +
                 format_double((*means)[2]) + ")");
        means.reset();
    }

    auto sigma = rd.number("detector", "sigma");
    if (!rd.find("detector", "sigma")) {
        rd.error("detector: missing `sigma`");
    } else if (sigma && !(*sigma > 0.0)) {
        rd.error("sigma: must be positive, got " + format_double(*sigma));
        sigma.reset();
    }

    std::optional<Vector3> priors;
    if (rd.find("detector", "priors")) {
        if (auto p = rd.list("detector", "priors")) {
            if (p->size() != kNumStates) {
                rd.error("priors: expected 3 values, got " + std::to_string(p->size()));
            } else {
                Vector3 v{(*p)[0], (*p)[1], (*p)[2]};
                const double sum = v[0] + v[1] + v[2];
                bool ok = true;
                if (!(v[0] > 0.0 && v[1] > 0.0 && v[2] > 0.0)) {
                    rd.error("priors: every component must be strictly positive");
                    ok = false;
                }
                if (std::abs(sum - 1.0) > kUserStochasticTolerance) {
                    rd.error("priors: must sum to 1, got " + format_double(sum));
                    ok = false;
                }
                if (ok) {
                    priors = v;
                }
            }
        }
    } else {
        priors = Vector3{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        notices.push_back("priors not given; using equal priors (1/3, 1/3, 1/3)");
    }

    std::optional<TransitionMatrix> transitions;
    if (auto m = rd.matrix("transitions")) {
        HmmModel probe{TransitionMatrix{*m}, EmissionMatrix{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}},
                       {1.0, 0.0, 0.0}};
        if (auto v = validate(probe)) {
            rd.error("transitions: " + v->message());
        } else {
            transitions = TransitionMatrix{*m};
        }
    }

    std::optional<EmissionMatrix> emissions;
    if (auto m = rd.matrix("emissions")) {
        HmmModel probe{TransitionMatrix{{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}}, EmissionMatrix{*m},
                       {1.0, 0.0, 0.0}};
        if (auto v = validate(probe)) {
            rd.error("emissions: " + v->message());
        } else {
            emissions = EmissionMatrix{*m};
        }
    }

    std::optional<DetectorParams> detector;
    if (means && sigma && priors) {
        detector.emplace((*means)[0], (*means)[1], (*means)[2], *sigma, *priors);
        try {
            compute_thresholds(*detector);
        } catch (const DegenerateConfigError& e) {
            rd.error(std::string("detector: ") + e.what());
        }
    }

    RunConfig cfg{detector.value_or(DetectorParams(-1, 0, 1, 1, {0.25, 0.5, 0.25})), {}, {}, 100,
                  10'000, 0, {}, {}, 10, {}};
    if (auto k = rd.integer<std::size_t>("simulation", "K")) {
        if (*k == 0) {
            rd.error("K: sequence length must be at least 1");
        }
        cfg.length = *k;
    }
    if (auto t = rd.integer<std::size_t>("simulation", "trials")) {
        if (*t == 0) {
            rd.error("trials: must be at least 1");
        }
        cfg.trials = *t;
    }
    if (auto s = rd.integer<std::uint64_t>("simulation", "base_seed")) {
        cfg.base_seed = *s;
    }
    if (auto h = rd.integer<std::size_t>("simulation", "horizon")) {
        cfg.horizon = *h;
    }
    if (auto g = rd.list("simulation", "snr_db")) {
        cfg.snr_db_grid = *g;
    }
    if (auto g = rd.list("simulation", "sigma_grid")) {
        for (double s : *g) {
            if (!(s > 0.0)) {
                rd.error("sigma_grid: every value must be positive");
                break;
            }
        }
        cfg.sigma_grid = *g;
    }
    if (!cfg.snr_db_grid.empty() && !cfg.sigma_grid.empty()) {
        rd.error("simulation: give either `snr_db` or `sigma_grid`, not both");
    }

    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    cfg.transitions = transitions;
    cfg.explicit_emissions = emissions;
    cfg.notices = std::move(notices);
    return cfg;
}

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading " + path.string());
    }
    return ss.str();
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) {
            return out;
        }
        pos = comma + 1;
    }
}

}  // namespace

RunConfig parse_config(const std::filesystem::path& path)
{
    return parse_config_text(read_file(path));
}

MeasurementSeries parse_measurements(std::string_view text)
{
    MeasurementSeries series;
    std::vector<std::string> errors;
    std::optional<std::size_t> z_col;
    std::size_t n_cols = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split_fields(line);
        const std::string where = "row " + std::to_string(line_no) + ": ";

        if (series.key_column.empty()) {
            if (fields[0] != "k" && fields[0] != "timestamp") {
                throw ValidationError({where + "header must start with `k` or `timestamp`"});
            }
            series.key_column = std::string(fields[0]);
            for (std::size_t c = 1; c < fields.size(); ++c) {
                if (fields[c] == "z_hz") {
                    z_col = c;
                }
            }
            if (!z_col) {
                throw ValidationError({where + "header has no `z_hz` column"});
            }
            n_cols = fields.size();
            continue;
        }

        if (fields.size() != n_cols) {
            errors.push_back(where + "expected " + std::to_string(n_cols) + " fields, got " +
                             std::to_string(fields.size()));
            continue;
        }
        const auto key = parse_finite(fields[0]);
        const auto z = parse_finite(fields[*z_col]);
        if (!key) {
            errors.push_back(where + "cannot parse " + series.key_column + " `" +
                             std::string(fields[0]) + "`");
        }
        if (!z) {
            errors.push_back(where + "cannot parse z_hz `" + std::string(fields[*z_col]) + "`");
        }
        if (!key || !z) {
            continue;
        }
        if (!series.records.empty() && !(*key > series.records.back().key)) {
            errors.push_back(where + series.key_column + " " + std::string(fields[0]) +
                             " does not increase (previous " + series.records.back().key_text +
                             " on row " + std::to_string(series.records.back().line) + ")");
        }
        series.records.push_back({std::string(fields[0]), *key, *z, line_no});
    }

    if (series.key_column.empty()) {
        throw ValidationError({"measurement file is empty"});
    }
    if (series.records.empty()) {
        errors.push_back("measurement file has a header but no records");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return series;
}

MeasurementSeries load_measurements(const std::filesystem::path& path)
{
    return parse_measurements(read_file(path));
}

}  // namespace gridhmm
