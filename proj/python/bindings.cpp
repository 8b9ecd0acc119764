#include "speedprior/enumerate.hpp"
#include "speedprior/measures.hpp"
#include "speedprior/predictor.hpp"
#include "speedprior/priors.hpp"
#include "speedprior/verify.hpp"
#include "speedprior/vm.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace speedprior;

namespace {

// Rationals cross as fractions.Fraction; inputs may be a Fraction, an int or
// a "num/den" string.
py::object fraction(const Rational& q)
{
    return py::module_::import("fractions").attr("Fraction")(to_string(q));
}

Rational rational_arg(const py::handle& h)
{
    return parse_rational(py::str(h).cast<std::string>());
}

py::dict estimate_dict(const priors::PriorEstimate& e)
{
    py::dict d;
    d["kind"] = priors::to_string(e.kind);
    d["x"] = e.target.text();
    d["lower"] = fraction(e.lower);
    d["tail"] = fraction(e.tail);
    d["upper"] = fraction(e.upper());
    d["k"] = e.phases_used;
    d["epsilon"] = fraction(e.epsilon);
    d["certified"] = e.certified;
    if (!e.diagnostic.empty()) {
        d["diagnostic"] = e.diagnostic;
    }
    return d;
}

py::object json_to_py(const nlohmann::ordered_json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Speed prior estimation on the REF-1 reference machine";

    m.def(
        "computes",
        [](const std::string& program, const std::string& x, std::uint64_t budget) {
            const auto r = vm::computes(BitString(program), BitString(x), budget);
            py::dict d;
            d["verdict"] = vm::to_string(r.verdict);
            d["steps"] = r.steps;
            d["reason"] = vm::to_string(r.reason);
            return d;
        },
        py::arg("program"), py::arg("x"), py::arg("budget"));

    m.def(
        "enumerate",
        [](int k, const std::string& mode, unsigned workers) {
            enumerate::EnumerationOptions o;
            o.workers = workers;
            const auto ledger =
                enumerate::enumerate_up_to_phase(k, mode == "naive" ? enumerate::Mode::Naive : enumerate::Mode::Tree, o);
            py::list out;
            for (const auto& r : ledger.records) {
                py::dict d;
                d["program"] = r.program.text();
                d["output"] = r.output.text();
                d["time"] = r.time;
                d["first_phase"] = r.first_phase;
                out.append(d);
            }
            return out;
        },
        py::arg("k"), py::arg("mode") = "tree", py::arg("workers") = 1);

    m.def("naive_step_count", [](int k) {
        return *enumerate::enumerate_up_to_phase(k, enumerate::Mode::Naive).naive_step_count;
    });
    m.def("first_phase", &enumerate::first_phase, py::arg("program_length"), py::arg("time"));
    m.def(
        "kt_complexity",
        [](const std::string& x, int k_max) {
            const auto v = enumerate::kt_complexity(BitString(x), k_max);
            py::dict d;
            d["exact"] = v.status == enumerate::Exactness::Exact;
            d["program_length"] = v.program_length;
            d["time"] = v.time;
            d["lower_bound"] = v.lower_bound;
            return d;
        },
        py::arg("x"), py::arg("k_max"));
    m.def(
        "km_complexity",
        [](const std::string& x, int k_max) {
            const auto v = enumerate::km_complexity(BitString(x), k_max);
            return py::make_tuple(v.length, v.status == enumerate::Exactness::Exact);
        },
        py::arg("x"), py::arg("k_max"));

    py::class_<priors::PriorEngine>(m, "PriorEngine")
        .def(py::init<>())
        .def("set_horizon", [](priors::PriorEngine& e, const std::string& z) { e.set_horizon(BitString(z)); })
        .def(
            "estimate",
            [](priors::PriorEngine& e, const std::string& kind, const std::string& x, const py::object& eps, int k_cap) {
                return estimate_dict(e.estimate(priors::parse_kind(kind), BitString(x), rational_arg(eps), k_cap));
            },
            py::arg("kind"), py::arg("x"), py::arg("epsilon") = "1/2", py::arg("k_cap") = 20)
        .def(
            "at_phase",
            [](priors::PriorEngine& e, const std::string& kind, const std::string& x, int k) {
                return estimate_dict(e.at_phase(priors::parse_kind(kind), BitString(x), k));
            },
            py::arg("kind"), py::arg("x"), py::arg("k"))
        .def(
            "conditional",
            [](priors::PriorEngine& e, const std::string& kind, const std::string& prefix, int bit, const py::object& eps,
               int k_cap) {
                const auto iv = e.conditional(priors::parse_kind(kind), BitString(prefix), bit != 0, rational_arg(eps), k_cap);
                return py::make_tuple(fraction(iv.low), fraction(iv.high));
            },
            py::arg("kind"), py::arg("prefix"), py::arg("bit"), py::arg("epsilon") = "1/2", py::arg("k_cap") = 20)
        .def_property_readonly("searches_run", &priors::PriorEngine::searches_run);

    m.def("measure", [](const std::string& spec, const std::string& x) {
        return fraction(measures::measure_eval(measures::MeasureSpec::parse(spec, x.size()), BitString(x)));
    });
    m.def("output_interval", [](const std::string& spec, const std::string& x) {
        const auto iv = measures::output_interval(measures::MeasureSpec::parse(spec, x.size()), BitString(x));
        return py::make_tuple(fraction(iv.low), fraction(iv.high));
    });
    m.def(
        "decoder_run",
        [](const std::string& spec, const std::string& input, std::size_t max_output) {
            return measures::decoder_run(measures::MeasureSpec::parse(spec, max_output), BitString(input), max_output).text();
        },
        py::arg("spec"), py::arg("input"), py::arg("max_output") = 64);
    m.def(
        "decoder_km",
        [](const std::string& spec, const std::string& x, std::size_t depth_cap) {
            return measures::decoder_km(measures::MeasureSpec::parse(spec, x.size()), BitString(x), depth_cap);
        },
        py::arg("spec"), py::arg("x"), py::arg("depth_cap") = 64);
    m.def("decoder_mass", [](const std::string& spec, const std::string& x, std::size_t depth) {
        return fraction(measures::decoder_mass(measures::MeasureSpec::parse(spec, x.size()), BitString(x), depth));
    });

    m.def(
        "predict",
        [](const std::string& env, const std::string& kind, std::size_t n, const py::object& eps, std::uint64_t seed,
           int k_cap, const std::string& loss, bool tie_break) {
            priors::PriorEngine engine;
            predictor::PredictorOptions o;
            o.k_cap = k_cap;
            o.tie_break = tie_break;
            const auto trace =
                predictor::run_experiment(engine, measures::MeasureSpec::parse(env, n), priors::parse_kind(kind), n,
                                          rational_arg(eps), seed, predictor::LossSpec::parse(loss), o);
            py::dict d = json_to_py(nlohmann::ordered_json::parse(predictor::summary_json(trace)));
            d["csv"] = predictor::trace_csv(trace);
            return d;
        },
        py::arg("env"), py::arg("kind"), py::arg("n"), py::arg("epsilon") = "1/2", py::arg("seed") = 0,
        py::arg("k_cap") = 24, py::arg("loss") = "0-1", py::arg("tie_break") = false);

    m.def(
        "adversarial_sequence",
        [](const std::string& kind, const py::object& eps, std::size_t n, int k_cap) {
            priors::PriorEngine engine;
            predictor::PredictorOptions o;
            o.k_cap = k_cap;
            return predictor::adversarial_sequence(engine, priors::parse_kind(kind), rational_arg(eps), n, o).text();
        },
        py::arg("kind"), py::arg("epsilon"), py::arg("n"), py::arg("k_cap") = 24);

    m.def(
        "verify",
        [](const std::string& suite, int k, std::size_t n, int k_cap, std::uint64_t seeds) {
            verify::SuiteOptions o;
            o.k = k;
            o.n = n;
            o.k_cap = k_cap;
            o.seeds = seeds;
            const auto r = verify::run_suite(suite, o);
            py::dict d;
            d["suite"] = r.suite;
            d["passed"] = r.passed;
            d["data"] = json_to_py(r.data);
            d["failures"] = r.failures;
            return d;
        },
        py::arg("suite"), py::arg("k") = 0, py::arg("n") = 0, py::arg("k_cap") = 0, py::arg("seeds") = 30);
    m.attr("SUITES") = verify::suite_names();
}
