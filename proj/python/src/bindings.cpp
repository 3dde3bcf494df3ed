#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "zipper/core.hpp"
#include "zipper/engine.hpp"
#include "zipper/errors.hpp"
#include "zipper/simlab.hpp"
#include "zipper/simulate_config.hpp"
#include "zipper/split.hpp"

namespace py = pybind11;

namespace {

using namespace zipper;

// Reports and archives cross the boundary as JSON text; the Python side
// decodes them into dicts.
std::string run_test(const Vector& y, const Matrix& x, const std::vector<std::string>& columns,
                     const std::vector<std::size_t>& drop, const std::string& learner,
                     const std::optional<std::string>& restricted_learner,
                     const std::string& criterion, std::size_t folds,
                     std::optional<double> tau, std::size_t auto_tau, double tau_cap,
                     double alpha, std::uint64_t seed, const std::string& mode) {
    const Dataset data = make_dataset(y, x, columns);
    TestConfig config;
    config.folds = folds;
    config.slider = tau ? SliderConfig::fixed(*tau) : SliderConfig::automatic(auto_tau, tau_cap);
    config.alpha = alpha;
    config.criterion = criterion;
    config.full = make_learner(learner);
    config.restricted = make_learner(restricted_learner.value_or(learner), drop);
    config.seed = seed;
    config.mode = test_mode_from_name(mode);
    config.validate(data.n(), data.p());
    TestReport report;
    {
        py::gil_scoped_release release;
        report = run_zipper_test(data, config);
    }
    return to_json(report).dump();
}

std::string simulate(const std::string& scenario_json, std::size_t reps, std::uint64_t seed,
                     std::size_t threads) {
    const auto doc = nlohmann::json::parse(scenario_json);
    const SimulationConfig config = parse_simulation_config({{"scenarios", {doc}}});
    const ScenarioEntry& e = config.scenarios.front();
    nlohmann::json cells = nlohmann::json::array();
    py::gil_scoped_release release;
    for (const TestMode mode : e.modes) {
        const auto sliders = mode == TestMode::zipper ? e.sliders : std::vector<SliderSetting>{{}};
        for (const auto& slider : sliders) {
            const ScenarioResult r =
                run_scenario(e.dgp, e.test_config(mode, slider), reps, seed, e.gap(), threads);
            cells.push_back({{"mode", std::string(to_string(mode))},
                             {"tau", mode == TestMode::zipper ? slider.label()
                                     : mode == TestMode::tau_zero ? "0"
                                                                  : "1"},
                             {"result", to_json(r)}});
        }
    }
    return nlohmann::json{{"schema", "zipper.scenario_archive/1"},
                          {"scenario", e.to_json()},
                          {"reps", reps},
                          {"cells", cells}}
        .dump();
}

py::tuple generate_data(const std::string& scenario_json, std::uint64_t seed) {
    const auto doc = nlohmann::json::parse(scenario_json);
    const SimulationConfig config = parse_simulation_config({{"scenarios", {doc}}});
    RandomSource source(seed);
    Dataset d = generate(config.scenarios.front().dgp, source);
    return py::make_tuple(d.y, d.x);
}

std::string plan(std::size_t n, std::size_t folds, double tau, std::uint64_t seed) {
    RandomSource source(seed);
    return to_json(make_plan(n, folds, tau, source)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Zipper goodness-of-fit test (C++ core)";
    m.attr("__version__") = ZIPPER_VERSION;

    // Translators run newest first, so the base class goes in first.
    py::register_exception<Error>(m, "ZipperError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("run_test", &run_test, py::arg("y"), py::arg("x"), py::arg("columns"), py::arg("drop"),
          py::arg("learner"), py::arg("restricted_learner"), py::arg("criterion"),
          py::arg("folds"), py::arg("tau"), py::arg("auto_tau"), py::arg("tau_cap"),
          py::arg("alpha"), py::arg("seed"), py::arg("mode"));
    m.def("simulate", &simulate, py::arg("scenario_json"), py::arg("reps"), py::arg("seed"),
          py::arg("threads") = 0);
    m.def("generate", &generate_data, py::arg("scenario_json"), py::arg("seed"));
    m.def("plan", &plan, py::arg("n"), py::arg("folds"), py::arg("tau"), py::arg("seed"));
    m.def("analytic_power", &analytic_power, py::arg("psi"), py::arg("sigma2"),
          py::arg("score_var_restricted"), py::arg("contrast_var"), py::arg("n"), py::arg("tau"),
          py::arg("alpha") = 0.05);
    m.def(
        "select_slider",
        [](std::size_t n, std::size_t n0, double cap) {
            return select_slider(n, SliderConfig::automatic(n0, cap));
        },
        py::arg("n"), py::arg("n0") = 50, py::arg("cap") = 0.9);
    m.def("normal_cdf", &std_normal_cdf, py::arg("x"));
    m.def("normal_quantile", &std_normal_quantile, py::arg("p"));
}
