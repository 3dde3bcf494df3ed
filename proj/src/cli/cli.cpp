#include "zipper/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "zipper/dataset.hpp"
#include "zipper/engine.hpp"
#include "zipper/errors.hpp"
#include "zipper/parallel.hpp"
#include "zipper/simlab.hpp"
#include "zipper/simulate_config.hpp"
#include "zipper/stats.hpp"

#ifndef ZIPPER_VERSION
#define ZIPPER_VERSION "0.0.0"
#endif

namespace zipper {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public Error {
public:
    using Error::Error;
};

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Locale-free fixed formatting for TSV cells.
std::string fixed(double value, int digits) {
    if (std::isnan(value)) return "NA";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, digits);
    return std::string(buf, res.ptr);
}

std::string shortest(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string significant(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::stringstream s(item);
        std::string token;
        while (std::getline(s, token, ',')) {
            if (!token.empty()) out.push_back(token);
        }
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IngestionError("cannot write " + path.string());
    f << text;
    if (!f) throw IngestionError("failed writing " + path.string());
}

json manifest(const std::string& command, const std::vector<std::string>& args, json config,
              std::uint64_t seed, const std::string& started) {
    return {{"command", command},
            {"argv", args},
            {"config", std::move(config)},
            {"seed", seed},
            {"version", ZIPPER_VERSION},
            {"started_at", started},
            {"finished_at", utc_now()}};
}

// ---- test ------------------------------------------------------------------

struct TestArgs {
    std::string data;
    std::string response;
    std::vector<std::string> drop;
    std::vector<std::string> features;
    bool no_covariates = false;
    std::string learner = "ols";
    std::string restricted_learner;
    std::string criterion = "squared";
    std::optional<double> tau;
    std::size_t auto_tau = 50;
    double tau_cap = 0.9;
    std::size_t folds = 5;
    double alpha = 0.05;
    std::size_t bonferroni = 1;
    std::uint64_t seed = 0;
    std::string mode = "zipper";
    std::string na = "fail";
    std::string out;
};

void add_test_options(CLI::App& cmd, TestArgs& a) {
    cmd.add_option("--data", a.data, "CSV file with a header row")->required();
    cmd.add_option("--response", a.response, "response column name")->required();
    cmd.add_option("--drop", a.drop, "covariates to drop from the restricted model (names or 0-based indices, comma separated)");
    cmd.add_option("--features", a.features, "covariate columns to use (default: all but the response)");
    cmd.add_flag("--no-covariates", a.no_covariates, "use no covariate columns");
    cmd.add_option("--learner", a.learner, "full-model learner, e.g. ols, logistic, lasso_linear, best_subset(2)")
        ->capture_default_str();
    cmd.add_option("--restricted-learner", a.restricted_learner,
                   "restricted-model learner (default: same as --learner)");
    cmd.add_option("--criterion", a.criterion, "squared | cross_entropy")->capture_default_str();
    auto* tau = cmd.add_option_function<double>(
        "--tau",
        [&a](const double& value) {
            if (!(value >= 0.0 && value < 1.0)) throw CLI::ValidationError("--tau", "slider must lie in [0,1)");
            a.tau = value;
        },
        "fixed slider in [0,1)");
    auto* auto_tau = cmd.add_option("--auto-tau", a.auto_tau,
                                    "automatic slider from the minimum evaluation size n0")
                         ->capture_default_str();
    tau->excludes(auto_tau);
    cmd.add_option("--tau-cap", a.tau_cap, "upper bound for the automatic slider")->capture_default_str();
    cmd.add_option("--folds", a.folds, "number of cross-fitting folds")->capture_default_str();
    cmd.add_option("--alpha", a.alpha, "test level")->capture_default_str();
    cmd.add_option("--bonferroni", a.bonferroni, "number of tests for a Bonferroni-adjusted level")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--seed", a.seed, "random seed")->capture_default_str();
    cmd.add_option("--mode", a.mode, "zipper | tau_zero | tau_one_naive")->capture_default_str();
    cmd.add_option("--na", a.na, "missing-value policy: fail | drop_rows")->capture_default_str();
    cmd.add_option("--out", a.out, "write the JSON report here ('-' for stdout instead of the summary)");
}

json test_config_echo(const TestArgs& a, const Dataset& data, const Restriction& dropped,
                      double alpha) {
    json drop_names = json::array();
    for (const auto j : dropped) drop_names.push_back(data.columns[j]);
    return {{"data", a.data},
            {"response", a.response},
            {"features", data.columns},
            {"drop", drop_names},
            {"learner", a.learner},
            {"restricted_learner", a.restricted_learner.empty() ? a.learner : a.restricted_learner},
            {"criterion", a.criterion},
            {"tau", a.tau ? json(*a.tau) : json("auto")},
            {"auto_tau_n0", a.auto_tau},
            {"tau_cap", a.tau_cap},
            {"folds", a.folds},
            {"alpha", a.alpha},
            {"bonferroni", a.bonferroni},
            {"alpha_used", alpha},
            {"seed", a.seed},
            {"mode", a.mode},
            {"na", a.na}};
}

void print_summary(std::ostream& out, const TestReport& r, const Dataset& data,
                   const Restriction& dropped) {
    std::string dropped_names;
    for (const auto j : dropped) dropped_names += (dropped_names.empty() ? "" : ",") + data.columns[j];
    out << "zipper test: n=" << r.n << " p=" << r.p << " folds=" << r.folds
        << " mode=" << to_string(r.mode) << "\n";
    if (!dropped_names.empty()) out << "  dropped     " << dropped_names << "\n";
    out << "  slider      tau=" << fixed(r.tau_nominal, 4) << " (realized " << fixed(r.tau_realized, 4)
        << ")\n";
    out << "  estimate    gap_estimate=" << significant(r.gap_estimate) << "\n";
    out << "  statistic   T=" << fixed(r.statistic, 4) << "  p=" << significant(r.p_value) << "\n";
    out << "  " << fixed(100.0 * (1.0 - r.alpha), 1) << "% CI    [" << significant(r.ci_lower) << ", "
        << significant(r.ci_upper) << "]\n";
    out << "  decision    " << (r.reject ? "reject" : "do not reject") << " H0 at alpha="
        << significant(r.alpha) << "\n";
    if (!r.validity_guaranteed) out << "  note        no validity guarantee in this mode\n";
    for (const auto& fold : r.fold_results) {
        for (const auto& w : fold.warnings) out << "  warning     fold " << fold.fold << ": " << w << "\n";
    }
    for (const auto& w : r.warnings) out << "  warning     " << w << "\n";
}

int cmd_test(const TestArgs& a, const std::vector<std::string>& args, std::ostream& out) {
    const std::string started = utc_now();
    NaPolicy na;
    if (a.na == "fail") {
        na = NaPolicy::fail;
    } else if (a.na == "drop_rows") {
        na = NaPolicy::drop_rows;
    } else {
        throw UsageError("--na must be fail or drop_rows");
    }
    if (a.no_covariates && !a.features.empty()) throw UsageError("--features conflicts with --no-covariates");
    if (a.no_covariates && !a.drop.empty()) throw UsageError("--drop needs covariates");
    const TestMode mode = test_mode_from_name(a.mode);

    const auto features = split_list(a.features);
    const Dataset data = ingest_csv(a.data, a.response, features, na, a.no_covariates);

    Restriction dropped;
    for (const auto& name : split_list(a.drop)) dropped.push_back(data.column_index(name));
    dropped = normalize_restriction(dropped);
    if (dropped.empty() && a.restricted_learner.empty()) {
        throw UsageError("nothing to test: give --drop or a --restricted-learner");
    }

    const double alpha = a.alpha / static_cast<double>(a.bonferroni);
    TestConfig config;
    config.folds = a.folds;
    config.slider = a.tau ? SliderConfig::fixed(*a.tau) : SliderConfig::automatic(a.auto_tau, a.tau_cap);
    config.alpha = alpha;
    config.criterion = a.criterion;
    config.full = make_learner(a.learner);
    config.restricted =
        make_learner(a.restricted_learner.empty() ? a.learner : a.restricted_learner, dropped);
    config.seed = a.seed;
    config.mode = mode;
    config.validate(data.n(), data.p());

    const TestReport report = run_zipper_test(data, config);
    json doc = to_json(report);
    doc["manifest"] = manifest("test", args, test_config_echo(a, data, dropped, alpha), a.seed, started);

    if (a.out == "-") {
        out << doc.dump(2) << "\n";
        return kExitOk;
    }
    print_summary(out, report, data, dropped);
    if (!a.out.empty()) {
        write_text(a.out, doc.dump(2) + "\n");
        out << "  report      " << a.out << "\n";
    }
    return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::string out = "results";
    std::size_t threads = 0;
};

const char* kTsvHeader =
    "scenario\tfamily\tn\tp\tdelta\tlearner\tmode\ttau\ttau_realized\treps\tcompleted\t"
    "failures\trejection_pct\tse_pct\tmean_psi\tcoverage_pct\tstatus\n";

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
    const std::string started = utc_now();
    const SimulationConfig config = load_simulation_config(a.config);
    const std::size_t reps = a.reps.value_or(config.reps.value_or(500));
    const std::uint64_t seed = a.seed.value_or(config.seed.value_or(0));
    if (reps < 1) throw UsageError("--reps must be at least 1");

    const fs::path dir(a.out);
    fs::create_directories(dir);
    std::string tsv = kTsvHeader;
    bool any_failed = false;

    for (std::size_t s = 0; s < config.scenarios.size(); ++s) {
        const ScenarioEntry& e = config.scenarios[s];
        // Every cell of one scenario shares the seed, so cells differ only in
        // the method and not in the simulated data.
        const std::uint64_t scenario_seed = seed + s;
        const auto truth = e.gap();
        json cells = json::array();
        for (const TestMode mode : e.modes) {
            const std::vector<SliderSetting> sliders =
                mode == TestMode::zipper ? e.sliders : std::vector<SliderSetting>{SliderSetting{}};
            for (const auto& slider : sliders) {
                const TestConfig tc = e.test_config(mode, slider);
                const ScenarioResult r = run_scenario(e.dgp, tc, reps, scenario_seed, truth, a.threads);
                any_failed = any_failed || r.failed;
                const std::string tau_label = mode == TestMode::zipper ? slider.label()
                                              : mode == TestMode::tau_zero ? "0"
                                                                           : "1";
                tsv += e.name + "\t" + std::string(to_string(e.dgp.family)) + "\t" +
                       std::to_string(e.dgp.n) + "\t" + std::to_string(e.dgp.p) + "\t" +
                       shortest(e.dgp.delta) + "\t" + e.learner + "\t" +
                       std::string(to_string(mode)) + "\t" + tau_label + "\t" +
                       fixed(r.mean_tau, 4) + "\t" + std::to_string(r.reps) + "\t" +
                       std::to_string(r.completed) + "\t" + std::to_string(r.failures) + "\t" +
                       fixed(100.0 * r.rejection_rate, 1) + "\t" +
                       fixed(100.0 * binomial_se(r.rejection_rate, std::max<std::size_t>(r.completed, 1)), 2) +
                       "\t" + fixed(r.mean_gap, 6) + "\t" +
                       (r.coverage ? fixed(100.0 * *r.coverage, 1) : std::string("NA")) + "\t" +
                       (r.failed ? "failed" : "ok") + "\n";
                json cell = {{"mode", std::string(to_string(mode))},
                             {"tau", tau_label},
                             {"seed", scenario_seed},
                             {"result", to_json(r)}};
                cells.push_back(std::move(cell));
                out << e.name << " " << to_string(mode) << " tau=" << tau_label
                    << " rejection=" << fixed(100.0 * r.rejection_rate, 1) << "%"
                    << (r.failed ? " FAILED" : "") << "\n";
                for (const auto& m : r.failure_messages) err << "  " << m << "\n";
            }
        }
        json archive = {{"schema", "zipper.scenario_archive/1"},
                        {"scenario", e.to_json()},
                        {"reps", reps},
                        {"cells", std::move(cells)}};
        archive["manifest"] = manifest("simulate", args,
                                       {{"config", a.config},
                                        {"reps", reps},
                                        {"seed", seed},
                                        {"out", a.out},
                                        {"threads", a.threads == 0 ? thread_count() : a.threads}},
                                       seed, started);
        write_text(dir / (e.name + ".json"), archive.dump(2) + "\n");
    }
    write_text(dir / "results.tsv", tsv);
    out << "wrote " << (dir / "results.tsv").string() << "\n";
    return any_failed ? kExitFailure : kExitOk;
}

// ---- power -----------------------------------------------------------------

struct PowerArgs {
    double psi = 0.0;
    double sigma2 = 0.0;
    double sigma2s = 0.0;
    double contrast_var = 0.0;
    double n = 0.0;
    double alpha = 0.05;
    std::string tau_grid = "0:0.9:0.1";
    std::string out;
};

double parse_number(const std::string& text) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw UsageError("--tau-grid: '" + text + "' is not a number");
    }
    return value;
}

// "0,0.2,0.5" or "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream s(text);
        std::string token;
        while (std::getline(s, token, ':')) parts.push_back(token);
        if (parts.size() != 3) throw UsageError("--tau-grid range must be start:stop:step");
        const double start = parse_number(parts[0]);
        const double stop = parse_number(parts[1]);
        const double step = parse_number(parts[2]);
        if (!(step > 0.0) || stop < start) throw UsageError("--tau-grid range is empty");
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    } else {
        for (const auto& token : split_list({text})) grid.push_back(parse_number(token));
    }
    if (grid.empty()) throw UsageError("--tau-grid is empty");
    for (const double t : grid) {
        if (!(t >= 0.0 && t < 1.0)) throw UsageError("slider must lie in [0,1)");
    }
    return grid;
}

int cmd_power(const PowerArgs& a, std::ostream& out) {
    const auto grid = parse_grid(a.tau_grid);
    std::string tsv = "tau\tpower\tsd_null\tsd\n";
    for (const double tau : grid) {
        const double power = analytic_power(a.psi, a.sigma2, a.sigma2s, a.contrast_var, a.n, tau, a.alpha);
        const double sd_null = std::sqrt((1.0 - tau) * (a.sigma2 + a.sigma2s));
        const double sd = std::sqrt(sd_null * sd_null + tau * a.contrast_var);
        tsv += fixed(tau, 4) + "\t" + fixed(power, 8) + "\t" + fixed(sd_null, 8) + "\t" + fixed(sd, 8) + "\n";
    }
    if (a.out.empty()) {
        out << tsv;
    } else {
        write_text(a.out, tsv);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zipper goodness-of-fit test: variable-importance inference by cross-fitting", "zipper"};
    app.set_version_flag("--version", ZIPPER_VERSION);
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "run the test on a CSV dataset");
    add_test_options(*test, test_args);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "run Monte Carlo scenarios from a JSON config");
    sim->add_option("config", sim_args.config, "scenario config file (JSON)")->required();
    sim->add_option("--reps", sim_args.reps, "replications per cell (default: config value or 500)");
    sim->add_option("--seed", sim_args.seed, "master seed (default: config value or 0)");
    sim->add_option("--out", sim_args.out, "output directory")->capture_default_str();
    sim->add_option("--threads", sim_args.threads, "worker threads (default: ZIPPER_THREADS or all cores)");

    PowerArgs power_args;
    auto* power = app.add_subcommand("power", "analytic power curve over a slider grid");
    power->add_option("--psi", power_args.psi, "predictiveness gap")->required();
    power->add_option("--sigma2", power_args.sigma2, "variance of the full-model influence values")->required();
    power->add_option("--sigma2s", power_args.sigma2s, "variance of the restricted-model influence values")
        ->required();
    power->add_option("--eta2", power_args.contrast_var, "mean squared difference of the two influence values")
        ->required();
    power->add_option("--n", power_args.n, "sample size")->required();
    power->add_option("--alpha", power_args.alpha, "test level")->capture_default_str();
    power->add_option("--tau-grid", power_args.tau_grid, "comma list or start:stop:step")
        ->capture_default_str();
    power->add_option("--out", power_args.out, "TSV file (default: stdout)");

    std::vector<std::string> argv_store = {"zipper"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*test) return cmd_test(test_args, args, out);
        if (*sim) return cmd_simulate(sim_args, args, out, err);
        if (*power) return cmd_power(power_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace zipper
