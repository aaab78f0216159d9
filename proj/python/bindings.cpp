#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "gridhmm/detector.hpp"
#include "gridhmm/error.hpp"
#include "gridhmm/gaussian.hpp"
#include "gridhmm/hmm_model.hpp"
#include "gridhmm/simulation.hpp"
#include "gridhmm/viterbi.hpp"

namespace py = pybind11;
using namespace gridhmm;

namespace {

// Symbols cross the boundary as plain ints in {-1, 0, 1}.
SymbolSequence to_symbols(const std::vector<int>& v)
{
    SymbolSequence out;
    out.reserve(v.size());
    for (int s : v) {
        out.push_back(symbol_from_int(s));
    }
    return out;
}

std::vector<int> to_ints(const SymbolSequence& s)
{
    std::vector<int> out;
    out.reserve(s.size());
    for (auto v : s) {
        out.push_back(to_int(v));
    }
    return out;
}

HmmModel make_model(const Matrix3& transitions, const Matrix3& emissions, const Vector3& initial)
{
    return HmmModel{TransitionMatrix{transitions}, EmissionMatrix{emissions}, initial};
}

}  // namespace

PYBIND11_MODULE(_gridhmm, m)
{
    m.doc() = "Three-hypothesis Gaussian detector, HMM model and Viterbi decoder";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "GridHmmError");
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<DegenerateConfigError>(m, "DegenerateConfigError", base.ptr());
    py::register_exception<InfeasibleObservationError>(m, "InfeasibleObservationError",
                                                       base.ptr());
    py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
    py::register_exception<SizeGuardError>(m, "SizeGuardError", base.ptr());

    m.def("q_function", [](double x) { return q_function(x).value(); }, py::arg("x"),
          "Upper-tail probability of the standard normal.");

    py::class_<DetectorParams>(m, "DetectorParams")
        .def(py::init<double, double, double, double, Vector3>(), py::arg("m_neg"),
             py::arg("m_zero"), py::arg("m_pos"), py::arg("sigma"), py::arg("priors"))
        .def_static("from_nominal", &DetectorParams::from_nominal, py::arg("f0"),
                    py::arg("delta_f_min"), py::arg("delta_f_max"), py::arg("sigma"),
                    py::arg("priors"))
        .def_property_readonly("means", &DetectorParams::means)
        .def_property_readonly("sigma", &DetectorParams::sigma)
        .def_property_readonly("priors", &DetectorParams::priors)
        .def("with_sigma", &DetectorParams::with_sigma, py::arg("sigma"));

    py::class_<Thresholds>(m, "Thresholds")
        .def(py::init<double, double>(), py::arg("delta_neg_zero"), py::arg("delta_zero_pos"))
        .def_property_readonly("delta_neg_zero", &Thresholds::delta_neg_zero)
        .def_property_readonly("delta_zero_pos", &Thresholds::delta_zero_pos);

    m.def("compute_thresholds", &compute_thresholds, py::arg("params"));
    m.def("classify", [](double z, const Thresholds& t) { return to_int(classify(z, t)); },
          py::arg("z"), py::arg("thresholds"));
    m.def("error_probabilities", [](const DetectorParams& p, const Thresholds& t) {
        const auto e = error_probabilities(p, t);
        return Vector3{e[0], e[1], e[2]};
    });
    m.def("detection_probabilities", [](const DetectorParams& p, const Thresholds& t) {
        const auto d = detection_probabilities(p, t);
        return Vector3{d[0], d[1], d[2]};
    });

    m.def("build_emission_matrix",
          [](const DetectorParams& p) { return build_emission_matrix(p).r; }, py::arg("params"),
          "Column-stochastic R, rows = emitted symbol, columns = true state.");
    m.def("stationary_distribution",
          [](const Matrix3& p) { return stationary_distribution(TransitionMatrix{p}); },
          py::arg("transitions"));
    m.def(
        "validate",
        [](const Matrix3& p, const Matrix3& r, const Vector3& init) -> std::optional<std::string> {
            if (auto v = validate(make_model(p, r, init))) {
                return v->message();
            }
            return std::nullopt;
        },
        py::arg("transitions"), py::arg("emissions"), py::arg("initial"),
        "None when valid, else a description of the first violation.");

    m.def(
        "joint_log_prob",
        [](const std::vector<int>& x, const std::vector<int>& s, const Matrix3& p,
           const Matrix3& r, const Vector3& init) {
            return joint_log_prob(to_symbols(x), to_symbols(s), make_model(p, r, init));
        },
        py::arg("x"), py::arg("s"), py::arg("transitions"), py::arg("emissions"),
        py::arg("initial"));
    m.def(
        "viterbi_decode",
        [](const std::vector<int>& x, const Matrix3& p, const Matrix3& r, const Vector3& init) {
            return to_ints(viterbi_decode(to_symbols(x), make_model(p, r, init)));
        },
        py::arg("x"), py::arg("transitions"), py::arg("emissions"), py::arg("initial"));
    m.def(
        "brute_force_mlse",
        [](const std::vector<int>& x, const Matrix3& p, const Matrix3& r, const Vector3& init) {
            return to_ints(brute_force_mlse(to_symbols(x), make_model(p, r, init)));
        },
        py::arg("x"), py::arg("transitions"), py::arg("emissions"), py::arg("initial"));

    m.def(
        "predict",
        [](const Matrix3& p, const Vector3& init, std::size_t horizon) {
            return predict(TransitionMatrix{p}, init, horizon).probs;
        },
        py::arg("transitions"), py::arg("initial"), py::arg("horizon"));

    m.def(
        "detection_sweep",
        [](const DetectorParams& tmpl, const std::vector<double>& snr_db) {
            py::list rows;
            for (const auto& r : detection_sweep(tmpl, snr_db)) {
                py::object pd = r.detection ? py::cast(*r.detection) : py::none();
                rows.append(py::make_tuple(r.snr_db, r.sigma, pd));
            }
            return rows;
        },
        py::arg("params"), py::arg("snr_db"),
        "List of (snr_db, sigma, (pd_neg, pd_zero, pd_pos) or None).");

    m.def(
        "simulate",
        [](const Matrix3& p, const DetectorParams& params, std::size_t length,
           std::uint64_t seed) {
            const HmmModel model = make_model(p, build_emission_matrix(params).r, params.priors());
            RngStream rng(seed, 0);
            const auto s = simulate_states(model, length, rng);
            const auto z = synthesize_measurements(s, params, rng);
            return py::make_tuple(to_ints(s), z);
        },
        py::arg("transitions"), py::arg("params"), py::arg("length"), py::arg("seed"),
        "Hidden states and noisy measurements, drawn from stream (seed, 0).");

    m.def(
        "run_monte_carlo",
        [](const Matrix3& p, const Matrix3& r, const Vector3& init, std::size_t length,
           std::size_t trials, std::uint64_t seed, unsigned threads) {
            MonteCarloConfig cfg{make_model(p, r, init), length, trials, seed, threads};
            MonteCarloSummary s;
            {
                py::gil_scoped_release release;
                s = run_monte_carlo(cfg);
            }
            py::dict d;
            d["trials"] = s.trials;
            d["length"] = s.length;
            d["ht_mean"] = s.ht_mean;
            d["ht_std"] = s.ht_std;
            d["va_mean"] = s.va_mean;
            d["va_std"] = s.va_std;
            d["histogram_ht"] = s.histogram_ht;
            d["histogram_va"] = s.histogram_va;
            return d;
        },
        py::arg("transitions"), py::arg("emissions"), py::arg("initial"),
        py::arg("length") = 100, py::arg("trials") = 10000, py::arg("seed") = 0,
        py::arg("threads") = 1);
}
