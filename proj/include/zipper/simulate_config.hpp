#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zipper/engine.hpp"
#include "zipper/simlab.hpp"

namespace zipper {

// One slider setting of a scenario grid: a fixed tau or the automatic rule.
struct SliderSetting {
    std::optional<double> tau;  // empty = automatic
    std::string label() const;
};

// One scenario block of a simulation config file.
struct ScenarioEntry {
    std::string name;
    DgpSpec dgp;
    std::optional<SpecificationScenario> specification;
    std::string learner = "ols";
    std::optional<std::string> restricted_learner;
    std::vector<std::size_t> drop = {0, 1};
    std::string criterion = "squared";
    std::size_t folds = 5;
    double alpha = 0.05;
    std::size_t n0 = 50;
    double tau_cap = 0.9;
    std::vector<SliderSetting> sliders = {SliderSetting{}};
    std::vector<TestMode> modes = {TestMode::zipper};
    std::optional<double> true_gap;

    // Test configuration for one (mode, slider) cell of the grid.
    TestConfig test_config(TestMode mode, const SliderSetting& slider) const;
    // True gap when it is known: configured value, else known_gap() for the
    // default drop of the first two covariates, 0 for specification (i).
    std::optional<double> gap() const;
    nlohmann::json to_json() const;
};

struct SimulationConfig {
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::vector<ScenarioEntry> scenarios;
};

// Throws ConfigError naming any unknown key.
SimulationConfig parse_simulation_config(const nlohmann::json& doc);
SimulationConfig load_simulation_config(const std::filesystem::path& path);

}  // namespace zipper
