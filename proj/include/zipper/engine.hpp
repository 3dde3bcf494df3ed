#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zipper/criteria.hpp"
#include "zipper/dataset.hpp"
#include "zipper/learners.hpp"
#include "zipper/split.hpp"

namespace zipper {

// zipper: overlapping splits at the configured slider.
// tau_zero: non-overlapping halves (vanilla cross-fitting with an extra split).
// tau_one_naive: both criteria on the whole fold; kept to exhibit degeneracy,
// carries no validity guarantee.
enum class TestMode { zipper, tau_zero, tau_one_naive };

std::string_view to_string(TestMode mode);
TestMode test_mode_from_name(std::string_view name);

struct TestConfig {
    std::size_t folds = 5;
    SliderConfig slider = SliderConfig::automatic(50);
    double alpha = 0.05;
    std::string criterion = "squared";
    std::shared_ptr<const Learner> full;
    std::shared_ptr<const Learner> restricted;
    std::uint64_t seed = 0;
    TestMode mode = TestMode::zipper;

    void validate(std::size_t n, std::size_t p) const;
};

struct FoldResult {
    std::size_t fold = 0;
    double value_full = 0.0;
    double value_restricted = 0.0;
    double score_var_full = 0.0;
    double score_var_restricted = 0.0;
    double contrast_var = 0.0;  // mean squared difference of the two influence vectors
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    std::size_t size_o = 0;
    std::vector<std::string> warnings;
};

struct TestReport {
    TestMode mode = TestMode::zipper;
    bool validity_guaranteed = true;
    std::size_t n = 0;
    std::size_t p = 0;
    std::size_t folds = 0;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::string criterion;
    nlohmann::json full_learner;
    nlohmann::json restricted_learner;

    double tau_nominal = 0.0;
    double tau_realized = 0.0;
    double effective_size = 0.0;  // sum of evaluation-split sizes, n / (2 - tau)

    double gap_estimate = 0.0;
    double var_null = 0.0;
    double var_full = 0.0;
    double sd_null = 0.0;
    double sd_full = 0.0;
    double statistic = 0.0;
    double p_value = 1.0;
    double ci_lower = 0.0;
    double ci_upper = 0.0;
    bool reject = false;
    std::vector<std::string> warnings;

    std::vector<FoldResult> fold_results;
    ZipperPlan plan;
};

TestReport run_zipper_test(const Dataset& data, const TestConfig& config);
TestReport run_zipper_test(const Dataset& data, const TestConfig& config, RandomSource source);

// Runs the test with the mode forced to tau_zero or tau_one_naive.
TestReport baseline_mode(const Dataset& data, const TestConfig& config, TestMode mode);

// (1 - tau) * mean over folds of (score_var_full + score_var_restricted).
double null_variance(std::span<const FoldResult> folds, double tau);

// mean over folds of (1 - tau)(score_var_full + score_var_restricted) + tau * contrast_var.
double calibrated_variance(std::span<const FoldResult> folds, double tau);

// Large-sample power of the one-sided level-alpha test at slider tau.
double analytic_power(double gap, double score_var_full, double score_var_restricted, double contrast_var,
                      double n, double tau, double alpha);

nlohmann::json to_json(const TestReport& report);

}  // namespace zipper
