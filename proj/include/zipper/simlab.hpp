#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zipper/dataset.hpp"
#include "zipper/engine.hpp"

namespace zipper {

// normal:     Y = X beta + sigma_Y e,       e ~ N(0, 1)
// t3:         Y = X beta + sigma_Y e / 3,   e ~ t_3 (or / sqrt(3), see T3Scale)
// binomial:   Y ~ Bernoulli(logistic(X beta))
// mean_shift: Y = mu + e with no covariates (the test of E[Y] = 0)
enum class DgpFamily { normal, binomial, t3, mean_shift };

// low_dim:  beta = (delta, delta, 5, 0, 5, 0_{p-5})
// high_dim: beta = (delta, delta, 5_q, 0_{p-q-2}), q = max(1, round(0.01 p))
// fixed:    beta supplied verbatim
enum class BetaRule { low_dim, high_dim, fixed };

enum class T3Scale { literal_third, unit_variance };

std::string_view to_string(DgpFamily family);
std::string_view to_string(BetaRule rule);
DgpFamily dgp_family_from_name(std::string_view name);
BetaRule beta_rule_from_name(std::string_view name);

struct DgpSpec {
    DgpFamily family = DgpFamily::normal;
    std::size_t n = 500;
    std::size_t p = 5;
    double delta = 0.0;
    BetaRule beta_rule = BetaRule::low_dim;
    double rho = 0.2;
    double snr = 3.0;
    Vector fixed_beta;
    double mu = 0.0;
    double noise_sd = 1.0;  // mean_shift only
    T3Scale t3_scale = T3Scale::literal_third;

    void validate() const;
    Vector beta() const;
    // Matrix with entries rho^|i-j|.
    Matrix covariance() const;
    // sigma_Y, calibrated so beta0' Sigma beta0 / sigma_Y^2 = snr where beta0
    // is beta with delta set to zero.
    double response_sd() const;
};

Dataset generate(const DgpSpec& spec, RandomSource& source);

// Value of the predictiveness gap for the variable-importance test that
// drops the first two covariates, when it is known in closed form:
// mu^2 for mean_shift, 0 when delta = 0 (or the fixed beta vanishes there).
std::optional<double> known_gap(const DgpSpec& spec);

struct ScenarioResult {
    std::size_t reps = 0;
    std::size_t completed = 0;
    std::size_t failures = 0;
    double alpha = 0.05;
    double rejection_rate = 0.0;
    double mean_gap = 0.0;
    double mean_tau = 0.0;
    std::optional<double> true_gap;
    std::optional<double> coverage;
    bool failed = false;
    double wall_seconds = 0.0;

    // Per completed replication, in replication order.
    std::vector<std::size_t> replication_ids;
    std::vector<double> p_values;
    std::vector<double> statistics;
    std::vector<double> gap_estimates;
    std::vector<double> ci_lower;
    std::vector<double> ci_upper;
    std::vector<std::string> failure_messages;
};

// Replication r draws its data from stream r of master_seed, so results do
// not depend on the number of worker threads.
ScenarioResult run_scenario(const DgpSpec& spec, const TestConfig& config, std::size_t reps,
                            std::uint64_t master_seed,
                            std::optional<double> true_gap = std::nullopt,
                            std::size_t threads = 0);

enum class SpecificationScenario { i, ii, iii };
SpecificationScenario specification_scenario_from_name(std::string_view name);

// Model-specification check: restricted class is OLS on the first two
// covariates, full class is exhaustive best-2-subset OLS.
DgpSpec specification_dgp(SpecificationScenario scenario, std::size_t n, std::size_t p);
TestConfig specification_config(std::size_t p, const TestConfig& base = {});

ScenarioResult run_specification_scenario(SpecificationScenario scenario, std::size_t n,
                                          std::size_t p, std::size_t reps, std::uint64_t seed,
                                          const TestConfig& base = {}, std::size_t threads = 0);

nlohmann::json to_json(const DgpSpec& spec);
nlohmann::json to_json(const ScenarioResult& result, bool with_records = true);

}  // namespace zipper
