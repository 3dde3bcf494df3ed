#include "zipper/engine.hpp"

#include <cmath>
#include <string>

namespace zipper {

std::string_view to_string(TestMode mode) {
    switch (mode) {
        case TestMode::zipper: return "zipper";
        case TestMode::tau_zero: return "tau_zero";
        case TestMode::tau_one_naive: return "tau_one_naive";
    }
    return "zipper";
}

TestMode test_mode_from_name(std::string_view name) {
    if (name == "zipper") return TestMode::zipper;
    if (name == "tau_zero") return TestMode::tau_zero;
    if (name == "tau_one_naive") return TestMode::tau_one_naive;
    throw ConfigError("unknown test mode '" + std::string(name) +
                      "' (expected zipper | tau_zero | tau_one_naive)");
}

void TestConfig::validate(std::size_t n, std::size_t p) const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!full || !restricted) throw ConfigError("both learners must be set");
    slider.validate();
    if (folds < 2) throw ConfigError("fold count must be at least 2");
    (void)Criterion::from_name(criterion);
    active_columns(p, full->restriction());
    active_columns(p, restricted->restriction());
    if (!nested_in(*restricted, *full, p)) {
        throw ConfigError("restricted learner '" + restricted->spec().to_string() +
                          "' is not nested in full learner '" + full->spec().to_string() + "'");
    }
}

double null_variance(std::span<const FoldResult> folds, double tau) {
    if (folds.empty()) throw ConfigError("null_variance: no fold results");
    double acc = 0.0;
    for (const auto& f : folds) acc += f.score_var_full + f.score_var_restricted;
    return (1.0 - tau) * acc / static_cast<double>(folds.size());
}

double calibrated_variance(std::span<const FoldResult> folds, double tau) {
    if (folds.empty()) throw ConfigError("calibrated_variance: no fold results");
    double acc = 0.0;
    for (const auto& f : folds) {
        acc += (1.0 - tau) * (f.score_var_full + f.score_var_restricted) + tau * f.contrast_var;
    }
    return acc / static_cast<double>(folds.size());
}

double analytic_power(double gap, double score_var_full, double score_var_restricted, double contrast_var,
                      double n, double tau, double alpha) {
    if (score_var_full < 0.0 || score_var_restricted < 0.0 || contrast_var < 0.0) {
        throw DomainError("analytic_power: variances must be non-negative");
    }
    if (!(tau >= 0.0 && tau < 1.0)) throw DomainError("analytic_power: slider must lie in [0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("analytic_power: alpha must lie in (0,1)");
    if (!(n > 0.0)) throw DomainError("analytic_power: n must be positive");
    const double null_part = (1.0 - tau) * (score_var_full + score_var_restricted);
    const double variance = null_part + tau * contrast_var;
    if (!(variance > 0.0)) throw DegenerateVarianceError("analytic_power: limiting variance is zero");
    const double sd = std::sqrt(variance);
    const double sd_null = std::sqrt(null_part);
    const double z = std_normal_quantile(1.0 - alpha);
    return std_normal_cdf(-sd_null / sd * z + std::sqrt(n / (2.0 - tau)) * gap / sd);
}

namespace {

// Tau = 1 plan: every testing fold is used whole by both criteria.
ZipperPlan naive_plan(std::size_t n, std::size_t folds, RandomSource& source) {
    RandomSource fold_source = source.derive(0);
    ZipperPlan plan;
    plan.folds = make_folds(n, folds, fold_source);
    plan.tau_nominal = 1.0;
    for (std::size_t k = 0; k < folds; ++k) {
        ZipperSplit s;
        s.fold = k;
        s.o = plan.folds.members(k);
        s.tau_nominal = 1.0;
        plan.splits.push_back(std::move(s));
    }
    return plan;
}

double sum_over(const Vector& scores, const std::vector<std::size_t>& subset,
                const std::vector<Eigen::Index>& position) {
    double acc = 0.0;
    for (auto i : subset) acc += scores[position[i]];
    return acc;
}

PredictionFunction fit_on_fold(const Learner& learner, const Matrix& x, const Vector& y,
                               RandomSource source, std::size_t fold, const char* which) {
    try {
        return learner.fit(x, y, source);
    } catch (const std::exception& e) {
        throw LearnerError(fold, std::string(which) + " learner failed on fold " +
                                     std::to_string(fold) + ": " + e.what());
    }
}

}  // namespace

TestReport run_zipper_test(const Dataset& data, const TestConfig& config) {
    return run_zipper_test(data, config, RandomSource(config.seed));
}

TestReport run_zipper_test(const Dataset& data, const TestConfig& config, RandomSource source) {
    data.validate();
    const std::size_t n = data.n();
    const std::size_t p = data.p();
    config.validate(n, p);
    const Criterion criterion = Criterion::from_name(config.criterion);

    TestReport report;
    report.mode = config.mode;
    report.validity_guaranteed = config.mode != TestMode::tau_one_naive;
    if (n < 8 * config.folds) {
        // the split itself still has to be feasible; that is checked by the plan
        report.warnings.push_back("fewer than 8 observations per fold (n=" + std::to_string(n) +
                                  ", K=" + std::to_string(config.folds) +
                                  "); the normal approximation is doubtful");
    }
    report.n = n;
    report.p = p;
    report.folds = config.folds;
    report.alpha = config.alpha;
    report.seed = source.seed();
    report.criterion = criterion.name();
    report.full_learner = config.full->describe();
    report.restricted_learner = config.restricted->describe();

    if (config.mode == TestMode::tau_one_naive) {
        report.plan = naive_plan(n, config.folds, source);
    } else {
        const double tau =
            config.mode == TestMode::tau_zero ? 0.0 : select_slider(n, config.slider);
        report.plan = make_plan(n, config.folds, tau, source);
    }
    report.tau_nominal = report.plan.tau_nominal;

    std::vector<Eigen::Index> position(n, 0);
    double score_ss = 0.0;
    std::size_t score_count = 0;
    double contrast = 0.0;
    for (std::size_t k = 0; k < config.folds; ++k) {
        const ZipperSplit& split = report.plan.splits[k];
        const auto train = report.plan.folds.complement(k);
        const auto test = report.plan.folds.members(k);
        for (std::size_t pos = 0; pos < test.size(); ++pos) {
            position[test[pos]] = static_cast<Eigen::Index>(pos);
        }

        const Matrix xtr = data.x(train, Eigen::all);
        const Vector ytr = data.y(train);
        const Matrix xte = data.x(test, Eigen::all);
        const Vector yte = data.y(test);
        const PredictionFunction f_full = fit_on_fold(*config.full, xtr, ytr,
                                                      source.derive(1000 + 2 * k), k, "full");
        const PredictionFunction f_restricted = fit_on_fold(
            *config.restricted, xtr, ytr, source.derive(1001 + 2 * k), k, "restricted");

        Vector g_full;
        Vector g_restricted;
        try {
            g_full = criterion.scores(yte, f_full.predict(xte));
            g_restricted = criterion.scores(yte, f_restricted.predict(xte));
        } catch (const DomainError& e) {
            throw LearnerError(k, "fold " + std::to_string(k) + ": " + e.what());
        }
        score_ss += g_full.squaredNorm() + g_restricted.squaredNorm();
        score_count += 2 * static_cast<std::size_t>(yte.size());

        const double m = static_cast<double>(split.m());
        FoldResult fr;
        fr.fold = k;
        fr.size_a = split.a.size();
        fr.size_b = split.b.size();
        fr.size_o = split.o.size();
        // Realised weights |a|/m and |o|/m turn the weighted criteria into
        // plain sums over the evaluation splits.
        fr.value_full = (sum_over(g_full, split.a, position) + sum_over(g_full, split.o, position)) / m;
        fr.value_restricted =
            (sum_over(g_restricted, split.b, position) + sum_over(g_restricted, split.o, position)) /
            m;

        const InfluenceVector phi = centre_scores(g_full);
        const InfluenceVector phi_s = centre_scores(g_restricted);
        fr.score_var_full = influence_variance(phi);
        fr.score_var_restricted = influence_variance(phi_s);
        fr.contrast_var = influence_variance(InfluenceVector{phi.values - phi_s.values});
        for (const auto& w : f_full.warnings) fr.warnings.push_back("full: " + w);
        for (const auto& w : f_restricted.warnings) fr.warnings.push_back("restricted: " + w);

        contrast += fr.value_full - fr.value_restricted;
        report.fold_results.push_back(std::move(fr));
    }

    report.gap_estimate = contrast / static_cast<double>(config.folds);
    report.tau_realized = report.plan.tau_realized();
    report.effective_size = static_cast<double>(report.plan.total_m());

    const double tau_null = config.mode == TestMode::tau_one_naive ? 0.0 : report.tau_realized;
    report.var_null = null_variance(report.fold_results, tau_null);
    report.var_full = calibrated_variance(report.fold_results, report.tau_realized);
    report.sd_null = std::sqrt(report.var_null);
    report.sd_full = std::sqrt(report.var_full);

    const double scale = score_count > 0 ? std::sqrt(score_ss / static_cast<double>(score_count)) : 0.0;
    if (!(report.sd_null > 1e-12 * scale)) {
        throw DegenerateVarianceError(
            "null variance estimate is zero: every influence value is identical; "
            "use larger testing folds (fewer folds) or check the response");
    }

    const double root_m = std::sqrt(report.effective_size);
    report.statistic = root_m * report.gap_estimate / report.sd_null;
    report.p_value = std_normal_sf(report.statistic);
    report.reject = report.statistic > std_normal_quantile(1.0 - config.alpha);
    const double half = std_normal_quantile(1.0 - config.alpha / 2.0) * report.sd_full / root_m;
    report.ci_lower = report.gap_estimate - half;
    report.ci_upper = report.gap_estimate + half;
    return report;
}

TestReport baseline_mode(const Dataset& data, const TestConfig& config, TestMode mode) {
    TestConfig forced = config;
    forced.mode = mode;
    return run_zipper_test(data, forced);
}

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.fold_results) {
        folds.push_back({{"fold", f.fold},
                         {"value_full", f.value_full},
                         {"value_restricted", f.value_restricted},
                         {"score_var_full", f.score_var_full},
                         {"score_var_restricted", f.score_var_restricted},
                         {"contrast_var", f.contrast_var},
                         {"size_a", f.size_a},
                         {"size_b", f.size_b},
                         {"size_o", f.size_o},
                         {"warnings", f.warnings}});
    }
    nlohmann::json doc = {
        {"schema", "zipper.test_report/1"},
        {"mode", std::string(to_string(r.mode))},
        {"validity_guaranteed", r.validity_guaranteed},
        {"n", r.n},
        {"p", r.p},
        {"folds", r.folds},
        {"alpha", r.alpha},
        {"seed", r.seed},
        {"criterion", r.criterion},
        {"full_learner", r.full_learner},
        {"restricted_learner", r.restricted_learner},
        {"tau_nominal", r.tau_nominal},
        {"tau_realized", r.tau_realized},
        {"effective_size", r.effective_size},
        {"gap_estimate", r.gap_estimate},
        {"var_null", r.var_null},
        {"var_full", r.var_full},
        {"sd_null", r.sd_null},
        {"sd_full", r.sd_full},
        {"statistic", r.statistic},
        {"p_value", r.p_value},
        {"ci", {{"level", 1.0 - r.alpha}, {"lower", r.ci_lower}, {"upper", r.ci_upper}}},
        {"reject", r.reject},
        {"fold_results", std::move(folds)},
        {"plan", to_json(r.plan)}};
    if (!r.warnings.empty()) doc["warnings"] = r.warnings;
    if (!r.validity_guaranteed) doc["note"] = "no validity guarantee: degenerate under the null";
    return doc;
}

}  // namespace zipper
