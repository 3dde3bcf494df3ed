#include "zipper/simlab.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <string>

#include "zipper/parallel.hpp"

namespace zipper {

std::string_view to_string(DgpFamily family) {
    switch (family) {
        case DgpFamily::normal: return "normal";
        case DgpFamily::binomial: return "binomial";
        case DgpFamily::t3: return "t3";
        case DgpFamily::mean_shift: return "mean_shift";
    }
    return "normal";
}

std::string_view to_string(BetaRule rule) {
    switch (rule) {
        case BetaRule::low_dim: return "low_dim";
        case BetaRule::high_dim: return "high_dim";
        case BetaRule::fixed: return "fixed";
    }
    return "low_dim";
}

DgpFamily dgp_family_from_name(std::string_view name) {
    if (name == "normal") return DgpFamily::normal;
    if (name == "binomial") return DgpFamily::binomial;
    if (name == "t3") return DgpFamily::t3;
    if (name == "mean_shift") return DgpFamily::mean_shift;
    throw ConfigError("unknown family '" + std::string(name) +
                      "' (expected normal | binomial | t3 | mean_shift)");
}

BetaRule beta_rule_from_name(std::string_view name) {
    if (name == "low_dim") return BetaRule::low_dim;
    if (name == "high_dim") return BetaRule::high_dim;
    if (name == "fixed") return BetaRule::fixed;
    throw ConfigError("unknown beta rule '" + std::string(name) +
                      "' (expected low_dim | high_dim | fixed)");
}

namespace {

std::size_t high_dim_count(std::size_t p) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.01 * static_cast<double>(p))));
}

Vector beta_with(const DgpSpec& spec, double delta) {
    const auto p = static_cast<Eigen::Index>(spec.p);
    Vector beta = Vector::Zero(p);
    switch (spec.beta_rule) {
        case BetaRule::low_dim:
            beta[0] = delta;
            beta[1] = delta;
            beta[2] = 5.0;
            beta[4] = 5.0;
            break;
        case BetaRule::high_dim: {
            beta[0] = delta;
            beta[1] = delta;
            const auto q = static_cast<Eigen::Index>(high_dim_count(spec.p));
            beta.segment(2, q).setConstant(5.0);
            break;
        }
        case BetaRule::fixed:
            beta = spec.fixed_beta;
            break;
    }
    return beta;
}

}  // namespace

void DgpSpec::validate() const {
    if (n < 1) throw ConfigError("dgp: n must be positive");
    if (family == DgpFamily::mean_shift) {
        if (p != 0) throw ConfigError("dgp: mean_shift has no covariates (p must be 0)");
        if (!(noise_sd > 0.0)) throw ConfigError("dgp: noise_sd must be positive");
        return;
    }
    if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("dgp: rho must lie in (-1, 1)");
    if (family != DgpFamily::binomial && !(snr > 0.0)) throw ConfigError("dgp: snr must be positive");
    switch (beta_rule) {
        case BetaRule::low_dim:
            if (p < 5) throw ConfigError("dgp: low_dim rule needs p >= 5");
            break;
        case BetaRule::high_dim:
            if (p < high_dim_count(p) + 2) throw ConfigError("dgp: high_dim rule needs p >= q + 2");
            break;
        case BetaRule::fixed:
            if (static_cast<std::size_t>(fixed_beta.size()) != p) {
                throw ConfigError("dgp: fixed beta must have length p");
            }
            break;
    }
}

Vector DgpSpec::beta() const { return beta_with(*this, delta); }

Matrix DgpSpec::covariance() const {
    const auto q = static_cast<Eigen::Index>(p);
    Matrix s(q, q);
    for (Eigen::Index i = 0; i < q; ++i) {
        for (Eigen::Index j = 0; j < q; ++j) {
            s(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
        }
    }
    return s;
}

double DgpSpec::response_sd() const {
    if (family == DgpFamily::mean_shift) return noise_sd;
    const Vector b0 = beta_with(*this, 0.0);
    const double signal = b0.dot(covariance() * b0);
    if (!(signal > 0.0)) throw ConfigError("dgp: signal variance is zero; cannot calibrate snr");
    return std::sqrt(signal / snr);
}

Dataset generate(const DgpSpec& spec, RandomSource& source) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    Dataset d;
    d.response_name = "y";
    if (spec.family == DgpFamily::mean_shift) {
        d.x.resize(n, 0);
        d.y = Vector::Constant(n, spec.mu) + spec.noise_sd * sample_normal(source, spec.n);
        return d;
    }

    const Matrix l = cholesky(spec.covariance());
    Matrix z(n, p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) z(i, j) = source.normal();
    }
    d.x = z * l.transpose();
    for (Eigen::Index j = 0; j < p; ++j) d.columns.push_back("x" + std::to_string(j + 1));

    const Vector mean = d.x * spec.beta();
    d.y.resize(n);
    switch (spec.family) {
        case DgpFamily::normal: {
            const double sd = spec.response_sd();
            for (Eigen::Index i = 0; i < n; ++i) d.y[i] = mean[i] + sd * source.normal();
            break;
        }
        case DgpFamily::t3: {
            const double scale = spec.response_sd() /
                                 (spec.t3_scale == T3Scale::literal_third ? 3.0 : std::sqrt(3.0));
            for (Eigen::Index i = 0; i < n; ++i) d.y[i] = mean[i] + scale * source.student_t(3);
            break;
        }
        case DgpFamily::binomial:
            for (Eigen::Index i = 0; i < n; ++i) {
                d.y[i] = source.uniform() < logistic(mean[i]) ? 1.0 : 0.0;
            }
            d.response_type = ResponseType::binary;
            break;
        case DgpFamily::mean_shift:
            break;
    }
    return d;
}

std::optional<double> known_gap(const DgpSpec& spec) {
    if (spec.family == DgpFamily::mean_shift) return spec.mu * spec.mu;
    const Vector beta = spec.beta();
    if (beta.size() >= 2 && beta[0] == 0.0 && beta[1] == 0.0) return 0.0;
    return std::nullopt;
}

ScenarioResult run_scenario(const DgpSpec& spec, const TestConfig& config, std::size_t reps,
                            std::uint64_t master_seed, std::optional<double> true_gap,
                            std::size_t threads) {
    if (reps < 1) throw ConfigError("run_scenario: reps must be at least 1");
    spec.validate();
    const auto start = std::chrono::steady_clock::now();

    struct Slot {
        bool ok = false;
        double p_value = 0.0, statistic = 0.0, psi = 0.0, lower = 0.0, upper = 0.0, tau = 0.0;
        std::string error;
    };
    std::vector<Slot> slots(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            RandomSource rep(master_seed, r);
            RandomSource data_source = rep.derive(1);
            try {
                const Dataset data = generate(spec, data_source);
                const TestReport report = run_zipper_test(data, config, rep.derive(2));
                slots[r] = Slot{true,           report.p_value,  report.statistic,
                                report.gap_estimate, report.ci_lower, report.ci_upper,
                                report.tau_realized, {}};
            } catch (const Error& e) {
                slots[r].error = e.what();
            }
        },
        threads);

    ScenarioResult out;
    out.reps = reps;
    out.alpha = config.alpha;
    out.true_gap = true_gap;
    std::size_t rejections = 0;
    std::size_t covered = 0;
    double psi_sum = 0.0;
    double tau_sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        const Slot& s = slots[r];
        if (!s.ok) {
            ++out.failures;
            out.failure_messages.push_back("replication " + std::to_string(r) + ": " + s.error);
            continue;
        }
        ++out.completed;
        out.replication_ids.push_back(r);
        out.p_values.push_back(s.p_value);
        out.statistics.push_back(s.statistic);
        out.gap_estimates.push_back(s.psi);
        out.ci_lower.push_back(s.lower);
        out.ci_upper.push_back(s.upper);
        if (s.p_value <= config.alpha) ++rejections;
        if (true_gap && s.lower <= *true_gap && *true_gap <= s.upper) ++covered;
        psi_sum += s.psi;
        tau_sum += s.tau;
    }
    if (out.completed > 0) {
        const double done = static_cast<double>(out.completed);
        out.rejection_rate = static_cast<double>(rejections) / done;
        out.mean_gap = psi_sum / done;
        out.mean_tau = tau_sum / done;
        if (true_gap) out.coverage = static_cast<double>(covered) / done;
    }
    out.failed = out.completed == 0 || static_cast<double>(out.failures) > 0.01 * static_cast<double>(reps);
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

SpecificationScenario specification_scenario_from_name(std::string_view name) {
    if (name == "i") return SpecificationScenario::i;
    if (name == "ii") return SpecificationScenario::ii;
    if (name == "iii") return SpecificationScenario::iii;
    throw ConfigError("unknown specification scenario '" + std::string(name) +
                      "' (expected i | ii | iii)");
}

DgpSpec specification_dgp(SpecificationScenario scenario, std::size_t n, std::size_t p) {
    if (p < 4) throw ConfigError("specification scenario needs p >= 4");
    DgpSpec spec;
    spec.family = DgpFamily::normal;
    spec.n = n;
    spec.p = p;
    spec.beta_rule = BetaRule::fixed;
    spec.snr = 1.0;
    spec.fixed_beta = Vector::Zero(static_cast<Eigen::Index>(p));
    switch (scenario) {
        case SpecificationScenario::i:
            spec.fixed_beta[0] = 0.4;
            spec.fixed_beta[1] = 0.4;
            break;
        case SpecificationScenario::ii:
            spec.fixed_beta[0] = 0.4;
            spec.fixed_beta[2] = 0.4;
            break;
        case SpecificationScenario::iii:
            spec.fixed_beta[2] = 0.4;
            spec.fixed_beta[3] = 0.4;
            break;
    }
    return spec;
}

TestConfig specification_config(std::size_t p, const TestConfig& base) {
    TestConfig config = base;
    Restriction beyond_first_two;
    for (std::size_t j = 2; j < p; ++j) beyond_first_two.push_back(j);
    config.full = make_learner("best_subset(s=2)");
    config.restricted = make_learner("ols", beyond_first_two);
    config.criterion = "squared";
    return config;
}

ScenarioResult run_specification_scenario(SpecificationScenario scenario, std::size_t n,
                                          std::size_t p, std::size_t reps, std::uint64_t seed,
                                          const TestConfig& base, std::size_t threads) {
    const DgpSpec spec = specification_dgp(scenario, n, p);
    const std::optional<double> truth =
        scenario == SpecificationScenario::i ? std::optional<double>(0.0) : std::nullopt;
    return run_scenario(spec, specification_config(p, base), reps, seed, truth, threads);
}

nlohmann::json to_json(const DgpSpec& spec) {
    nlohmann::json doc = {{"family", std::string(to_string(spec.family))},
                          {"n", spec.n},
                          {"p", spec.p}};
    if (spec.family == DgpFamily::mean_shift) {
        doc["mu"] = spec.mu;
        doc["noise_sd"] = spec.noise_sd;
        return doc;
    }
    doc["delta"] = spec.delta;
    doc["beta_rule"] = std::string(to_string(spec.beta_rule));
    doc["rho"] = spec.rho;
    if (spec.family != DgpFamily::binomial) doc["snr"] = spec.snr;
    if (spec.beta_rule == BetaRule::fixed) {
        doc["beta"] = std::vector<double>(spec.fixed_beta.begin(), spec.fixed_beta.end());
    }
    if (spec.family == DgpFamily::t3) {
        doc["t3_scale"] = spec.t3_scale == T3Scale::literal_third ? "third" : "unit_variance";
    }
    return doc;
}

nlohmann::json to_json(const ScenarioResult& r, bool with_records) {
    nlohmann::json doc = {{"reps", r.reps},
                          {"completed", r.completed},
                          {"failures", r.failures},
                          {"failed", r.failed},
                          {"alpha", r.alpha},
                          {"rejection_rate", r.rejection_rate},
                          {"mean_gap", r.mean_gap},
                          {"mean_tau", r.mean_tau},
                          {"wall_seconds", r.wall_seconds},
                          {"failure_messages", r.failure_messages}};
    doc["true_gap"] = r.true_gap ? nlohmann::json(*r.true_gap) : nlohmann::json(nullptr);
    doc["coverage"] = r.coverage ? nlohmann::json(*r.coverage) : nlohmann::json(nullptr);
    if (with_records) {
        nlohmann::json records = nlohmann::json::array();
        for (std::size_t k = 0; k < r.completed; ++k) {
            records.push_back({{"replication", r.replication_ids[k]},
                               {"p_value", r.p_values[k]},
                               {"statistic", r.statistics[k]},
                               {"gap_estimate", r.gap_estimates[k]},
                               {"ci_lower", r.ci_lower[k]},
                               {"ci_upper", r.ci_upper[k]}});
        }
        doc["records"] = std::move(records);
    }
    return doc;
}

}  // namespace zipper
