#include "zipper/split.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace zipper {

std::vector<std::size_t> FoldPlan::members(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::complement(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::sizes() const {
    std::vector<std::size_t> out(folds, 0);
    for (auto f : assignment) ++out[f];
    return out;
}

FoldPlan make_folds(std::size_t n, std::size_t folds, RandomSource& source) {
    if (folds < 2 || folds > n) {
        throw ConfigError("make_folds: fold count K=" + std::to_string(folds) +
                          " must satisfy 2 <= K <= n (n=" + std::to_string(n) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    source.shuffle(order.begin(), order.end());

    FoldPlan plan;
    plan.n = n;
    plan.folds = folds;
    plan.assignment.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) plan.assignment[order[pos]] = pos % folds;
    return plan;
}

SplitSizes split_sizes(std::size_t fold_size, double tau) {
    if (!(tau >= 0.0 && tau < 1.0)) {
        throw ConfigError("slider must lie in [0,1)");
    }
    // Relative slack keeps exact fractions such as tau = 8/9 from rounding up.
    const double exact = static_cast<double>(fold_size) / (2.0 - tau);
    auto m = static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
    m = std::clamp(m, (fold_size + 1) / 2, fold_size);
    return SplitSizes{m, fold_size - m, 2 * m - fold_size};
}

ZipperSplit zipper_split(std::span<const std::size_t> fold, double tau, RandomSource& source,
                         std::size_t fold_id) {
    if (fold.size() < 4) {
        throw SplitError("zipper_split: fold " + std::to_string(fold_id) + " has " +
                         std::to_string(fold.size()) + " observations; at least 4 are required");
    }
    const SplitSizes sizes = split_sizes(fold.size(), tau);
    if (sizes.a < 1) {
        throw SplitError("zipper_split: fold " + std::to_string(fold_id) +
                         " is too small for tau=" + std::to_string(tau) +
                         "; lower the slider or the fold count");
    }

    std::vector<std::size_t> shuffled(fold.begin(), fold.end());
    source.shuffle(shuffled.begin(), shuffled.end());

    ZipperSplit split;
    split.fold = fold_id;
    split.tau_nominal = tau;
    const auto a_end = shuffled.begin() + static_cast<std::ptrdiff_t>(sizes.a);
    const auto b_end = a_end + static_cast<std::ptrdiff_t>(sizes.a);
    split.a.assign(shuffled.begin(), a_end);
    split.b.assign(a_end, b_end);
    split.o.assign(b_end, shuffled.end());
    std::sort(split.a.begin(), split.a.end());
    std::sort(split.b.begin(), split.b.end());
    std::sort(split.o.begin(), split.o.end());
    return split;
}

SliderConfig SliderConfig::fixed(double tau) {
    SliderConfig c;
    c.mode = Mode::fixed;
    c.tau_fixed = tau;
    c.validate();
    return c;
}

SliderConfig SliderConfig::automatic(std::size_t n0, double cap) {
    SliderConfig c;
    c.mode = Mode::automatic;
    c.n0 = n0;
    c.tau_cap = cap;
    c.validate();
    return c;
}

void SliderConfig::validate() const {
    if (!(tau_fixed >= 0.0 && tau_fixed < 1.0)) throw ConfigError("slider must lie in [0,1)");
    if (!(tau_cap >= 0.0 && tau_cap < 1.0)) throw ConfigError("slider cap must lie in [0,1)");
    if (n0 < 2) throw ConfigError("target two-sample size n0 must be at least 2");
}

double select_slider(std::size_t n, const SliderConfig& config) {
    config.validate();
    if (config.mode == SliderConfig::Mode::fixed) return config.tau_fixed;
    const double nn = static_cast<double>(n);
    const double n0 = static_cast<double>(config.n0);
    if (nn <= n0) return 0.0;
    const double tau0 = (nn - 2.0 * n0) / (nn - n0);
    return std::max(0.0, std::min(config.tau_cap, tau0));
}

std::size_t ZipperPlan::total_m() const {
    std::size_t total = 0;
    for (const auto& s : splits) total += s.m();
    return total;
}

std::size_t ZipperPlan::total_overlap() const {
    std::size_t total = 0;
    for (const auto& s : splits) total += s.o.size();
    return total;
}

double ZipperPlan::tau_realized() const {
    const std::size_t m = total_m();
    return m == 0 ? 0.0 : static_cast<double>(total_overlap()) / static_cast<double>(m);
}

ZipperPlan make_plan(std::size_t n, std::size_t folds, double tau, RandomSource& source) {
    if (folds < 2 || folds * 4 > n) {
        throw ConfigError("fold count K=" + std::to_string(folds) +
                          " must satisfy 2 <= K <= n/4 (n=" + std::to_string(n) + ")");
    }
    RandomSource fold_source = source.derive(0);
    ZipperPlan plan;
    plan.folds = make_folds(n, folds, fold_source);
    plan.tau_nominal = tau;
    // Overlap membership is drawn independently for every fold.
    for (std::size_t k = 0; k < folds; ++k) {
        RandomSource split_source = source.derive(1 + k);
        const auto members = plan.folds.members(k);
        plan.splits.push_back(zipper_split(members, tau, split_source, k));
    }
    return plan;
}

nlohmann::json to_json(const FoldPlan& plan) {
    return {{"n", plan.n}, {"folds", plan.folds}, {"assignment", plan.assignment}};
}

nlohmann::json to_json(const ZipperPlan& plan) {
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& s : plan.splits) {
        splits.push_back({{"fold", s.fold},
                          {"a", s.a},
                          {"b", s.b},
                          {"o", s.o},
                          {"tau_realized", s.tau_realized()}});
    }
    return {{"n", plan.folds.n},
            {"folds", plan.folds.folds},
            {"assignment", plan.folds.assignment},
            {"tau_nominal", plan.tau_nominal},
            {"tau_realized", plan.tau_realized()},
            {"splits", std::move(splits)}};
}

ZipperPlan plan_from_json(const nlohmann::json& doc) {
    ZipperPlan plan;
    plan.folds.n = doc.at("n").get<std::size_t>();
    plan.folds.folds = doc.at("folds").get<std::size_t>();
    plan.folds.assignment = doc.at("assignment").get<std::vector<std::size_t>>();
    plan.tau_nominal = doc.at("tau_nominal").get<double>();
    if (plan.folds.assignment.size() != plan.folds.n) {
        throw ConfigError("plan: assignment length does not match n");
    }
    for (const auto& s : doc.at("splits")) {
        ZipperSplit split;
        split.fold = s.at("fold").get<std::size_t>();
        split.a = s.at("a").get<std::vector<std::size_t>>();
        split.b = s.at("b").get<std::vector<std::size_t>>();
        split.o = s.at("o").get<std::vector<std::size_t>>();
        split.tau_nominal = plan.tau_nominal;
        plan.splits.push_back(std::move(split));
    }
    return plan;
}

}  // namespace zipper
