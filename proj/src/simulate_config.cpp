#include "zipper/simulate_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "zipper/errors.hpp"

namespace zipper {

namespace {

using nlohmann::json;

const std::set<std::string> kTopKeys = {"schema", "reps", "seed", "scenarios"};
const std::set<std::string> kScenarioKeys = {
    "name",     "family",  "n",          "p",        "delta",     "beta_rule", "rho",
    "snr",      "beta",    "mu",         "noise_sd", "t3_scale",  "specification",
    "learner",  "restricted_learner",    "drop",     "criterion", "folds",     "alpha",
    "n0",       "tau_cap", "tau",        "modes",    "true_gap"};

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) unknown.push_back(key);
    }
    if (unknown.empty()) return;
    std::string list;
    for (const auto& key : unknown) list += (list.empty() ? "" : ", ") + key;
    throw ConfigError(where + ": unknown key(s): " + list);
}

template <typename T>
T read(const json& object, const char* key, T fallback, const std::string& where) {
    if (!object.contains(key)) return fallback;
    try {
        return object.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": key '" + key + "' has the wrong type");
    }
}

std::vector<SliderSetting> read_sliders(const json& value, const std::string& where) {
    auto one = [&](const json& item) {
        if (item.is_string() && item.get<std::string>() == "auto") return SliderSetting{};
        if (item.is_number()) {
            const double tau = item.get<double>();
            if (!(tau >= 0.0 && tau < 1.0)) {
                throw ConfigError(where + ": slider must lie in [0,1)");
            }
            return SliderSetting{tau};
        }
        throw ConfigError(where + ": 'tau' entries must be numbers or \"auto\"");
    };
    std::vector<SliderSetting> out;
    if (value.is_array()) {
        for (const auto& item : value) out.push_back(one(item));
    } else {
        out.push_back(one(value));
    }
    if (out.empty()) throw ConfigError(where + ": 'tau' list is empty");
    return out;
}

ScenarioEntry read_scenario(const json& doc, std::size_t index) {
    std::string where = "scenario " + std::to_string(index);
    if (!doc.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown(doc, kScenarioKeys, where);

    ScenarioEntry e;
    e.name = read<std::string>(doc, "name", "scenario" + std::to_string(index), where);
    where = "scenario '" + e.name + "'";
    if (e.name.empty() || e.name.find_first_of("/\\\t\n") != std::string::npos) {
        throw ConfigError(where + ": name must be non-empty without tabs or path separators");
    }

    if (doc.contains("specification")) {
        e.specification =
            specification_scenario_from_name(read<std::string>(doc, "specification", "", where));
        const auto n = read<std::size_t>(doc, "n", 500, where);
        const auto p = read<std::size_t>(doc, "p", 5, where);
        e.dgp = specification_dgp(*e.specification, n, p);
        e.learner = "best_subset(s=2)";
        e.restricted_learner = "ols";
        e.drop.clear();
        for (std::size_t j = 2; j < p; ++j) e.drop.push_back(j);
    } else {
        DgpSpec& d = e.dgp;
        d.family = dgp_family_from_name(read<std::string>(doc, "family", "normal", where));
        d.n = read<std::size_t>(doc, "n", d.n, where);
        d.p = read<std::size_t>(doc, "p", d.family == DgpFamily::mean_shift ? 0 : d.p, where);
        d.delta = read<double>(doc, "delta", d.delta, where);
        d.rho = read<double>(doc, "rho", d.rho, where);
        d.snr = read<double>(doc, "snr", d.snr, where);
        d.mu = read<double>(doc, "mu", d.mu, where);
        d.noise_sd = read<double>(doc, "noise_sd", d.noise_sd, where);
        if (doc.contains("beta")) {
            const auto beta = read<std::vector<double>>(doc, "beta", {}, where);
            d.fixed_beta = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
            d.beta_rule = BetaRule::fixed;
        }
        d.beta_rule = beta_rule_from_name(
            read<std::string>(doc, "beta_rule", std::string(to_string(d.beta_rule)), where));
        const auto scale = read<std::string>(doc, "t3_scale", "third", where);
        if (scale == "third") {
            d.t3_scale = T3Scale::literal_third;
        } else if (scale == "unit_variance") {
            d.t3_scale = T3Scale::unit_variance;
        } else {
            throw ConfigError(where + ": t3_scale must be \"third\" or \"unit_variance\"");
        }
        if (d.family == DgpFamily::mean_shift) {
            e.learner = "mean_only";
            e.restricted_learner = "zero";
            e.drop.clear();
        } else if (d.family == DgpFamily::binomial) {
            e.learner = "logistic";
            e.criterion = "cross_entropy";
        }
        e.learner = read<std::string>(doc, "learner", e.learner, where);
        if (doc.contains("restricted_learner")) {
            e.restricted_learner = read<std::string>(doc, "restricted_learner", "", where);
        }
        e.drop = read<std::vector<std::size_t>>(doc, "drop", e.drop, where);
    }
    try {
        e.dgp.validate();
    } catch (const ConfigError& err) {
        throw ConfigError(where + ": " + err.what());
    }

    e.criterion = read<std::string>(doc, "criterion", e.criterion, where);
    e.folds = read<std::size_t>(doc, "folds", e.folds, where);
    e.alpha = read<double>(doc, "alpha", e.alpha, where);
    e.n0 = read<std::size_t>(doc, "n0", e.n0, where);
    e.tau_cap = read<double>(doc, "tau_cap", e.tau_cap, where);
    if (doc.contains("tau")) e.sliders = read_sliders(doc.at("tau"), where);
    if (doc.contains("modes")) {
        e.modes.clear();
        for (const auto& name : read<std::vector<std::string>>(doc, "modes", {}, where)) {
            e.modes.push_back(test_mode_from_name(name));
        }
        if (e.modes.empty()) throw ConfigError(where + ": 'modes' list is empty");
    }
    if (doc.contains("true_gap")) e.true_gap = read<double>(doc, "true_gap", 0.0, where);
    for (const std::size_t j : e.drop) {
        if (j >= e.dgp.p) throw ConfigError(where + ": drop index out of range");
    }
    try {
        for (const TestMode mode : e.modes) {
            for (const auto& slider : e.sliders) {
                e.test_config(mode, slider).validate(e.dgp.n, e.dgp.p);
            }
        }
    } catch (const ConfigError& err) {
        throw ConfigError(where + ": " + err.what());
    }
    return e;
}

}  // namespace

std::string SliderSetting::label() const {
    if (!tau) return "auto";
    std::ostringstream s;
    s << *tau;
    return s.str();
}

TestConfig ScenarioEntry::test_config(TestMode mode, const SliderSetting& slider) const {
    TestConfig c;
    c.folds = folds;
    c.alpha = alpha;
    c.criterion = criterion;
    c.mode = mode;
    c.slider = slider.tau ? SliderConfig::fixed(*slider.tau) : SliderConfig::automatic(n0, tau_cap);
    c.full = make_learner(learner);
    c.restricted = make_learner(restricted_learner.value_or(learner), drop);
    return c;
}

std::optional<double> ScenarioEntry::gap() const {
    if (true_gap) return true_gap;
    if (specification) {
        return *specification == SpecificationScenario::i ? std::optional<double>(0.0)
                                                            : std::nullopt;
    }
    if (dgp.family == DgpFamily::mean_shift) return known_gap(dgp);
    if (drop == std::vector<std::size_t>{0, 1} && !restricted_learner) return known_gap(dgp);
    return std::nullopt;
}

nlohmann::json ScenarioEntry::to_json() const {
    json sliders = json::array();
    for (const auto& s : this->sliders) {
        sliders.push_back(s.tau ? json(*s.tau) : json("auto"));
    }
    json modes = json::array();
    for (const TestMode m : this->modes) modes.push_back(std::string(to_string(m)));
    json doc = {{"name", name},
                {"dgp", zipper::to_json(dgp)},
                {"learner", learner},
                {"restricted_learner", restricted_learner.value_or(learner)},
                {"drop", drop},
                {"criterion", criterion},
                {"folds", folds},
                {"alpha", alpha},
                {"n0", n0},
                {"tau_cap", tau_cap},
                {"tau", sliders},
                {"modes", modes}};
    if (specification) {
        static const char* names[] = {"i", "ii", "iii"};
        doc["specification"] = names[static_cast<int>(*specification)];
    }
    const auto truth = gap();
    doc["true_gap"] = truth ? json(*truth) : json(nullptr);
    return doc;
}

SimulationConfig parse_simulation_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("simulation config: expected a JSON object");
    reject_unknown(doc, kTopKeys, "simulation config");
    SimulationConfig config;
    if (doc.contains("reps")) config.reps = read<std::size_t>(doc, "reps", 0, "simulation config");
    if (doc.contains("seed")) config.seed = read<std::uint64_t>(doc, "seed", 0, "simulation config");
    if (!doc.contains("scenarios") || !doc.at("scenarios").is_array() ||
        doc.at("scenarios").empty()) {
        throw ConfigError("simulation config: 'scenarios' must be a non-empty array");
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc.at("scenarios").size(); ++i) {
        config.scenarios.push_back(read_scenario(doc.at("scenarios")[i], i));
        if (!names.insert(config.scenarios.back().name).second) {
            throw ConfigError("simulation config: duplicate scenario name '" +
                              config.scenarios.back().name + "'");
        }
    }
    return config;
}

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file " + path.string() + ": " + e.what());
    }
    return parse_simulation_config(doc);
}

}  // namespace zipper
