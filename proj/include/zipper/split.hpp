#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "zipper/core.hpp"

namespace zipper {

// Balanced K-fold partition of {0, ..., n-1}. Fold ids are zero-based.
struct FoldPlan {
    std::size_t n = 0;
    std::size_t folds = 0;
    std::vector<std::size_t> assignment;  // observation -> fold id

    std::vector<std::size_t> members(std::size_t fold) const;
    std::vector<std::size_t> complement(std::size_t fold) const;
    std::vector<std::size_t> sizes() const;
};

FoldPlan make_folds(std::size_t n, std::size_t folds, RandomSource& source);

// One testing fold divided into a (full model only), b (restricted model
// only) and the shared overlap o. |a| == |b|; each evaluation split has
// m = |a| + |o| observations.
struct ZipperSplit {
    std::size_t fold = 0;
    std::vector<std::size_t> a;
    std::vector<std::size_t> b;
    std::vector<std::size_t> o;
    double tau_nominal = 0.0;

    std::size_t fold_size() const { return a.size() + b.size() + o.size(); }
    std::size_t m() const { return a.size() + o.size(); }
    double tau_realized() const {
        return m() == 0 ? 0.0 : static_cast<double>(o.size()) / static_cast<double>(m());
    }
};

// Split geometry for a fold of size n_k: m = ceil(n_k / (2 - tau)),
// |o| = 2m - n_k, |a| = |b| = n_k - m.
struct SplitSizes {
    std::size_t m;
    std::size_t a;
    std::size_t o;
};
SplitSizes split_sizes(std::size_t fold_size, double tau);

ZipperSplit zipper_split(std::span<const std::size_t> fold, double tau, RandomSource& source,
                         std::size_t fold_id = 0);

struct SliderConfig {
    enum class Mode { fixed, automatic };

    Mode mode = Mode::fixed;
    double tau_fixed = 0.0;
    std::size_t n0 = 50;
    double tau_cap = 0.9;

    static SliderConfig fixed(double tau);
    static SliderConfig automatic(std::size_t n0, double cap = 0.9);
    void validate() const;
};

// Fixed mode returns tau_fixed; automatic mode returns
// clamp((n - 2 n0) / (n - n0), 0, tau_cap).
double select_slider(std::size_t n, const SliderConfig& config);

// Fold partition plus the per-fold zipper splits used by one test run.
struct ZipperPlan {
    FoldPlan folds;
    std::vector<ZipperSplit> splits;
    double tau_nominal = 0.0;

    std::size_t total_m() const;
    std::size_t total_overlap() const;
    double tau_realized() const;
};

ZipperPlan make_plan(std::size_t n, std::size_t folds, double tau, RandomSource& source);

nlohmann::json to_json(const FoldPlan& plan);
nlohmann::json to_json(const ZipperPlan& plan);
ZipperPlan plan_from_json(const nlohmann::json& doc);

}  // namespace zipper
