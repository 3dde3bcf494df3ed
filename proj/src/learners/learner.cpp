#include <algorithm>
#include <charconv>
#include <set>
#include <string>

#include "zipper/learners.hpp"

namespace zipper {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(const LearnerSpec& spec, const std::string& key) {
    const std::string& text = spec.params.at(key);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("learner " + spec.name + ": parameter " + key + "='" + text +
                          "' is not a number");
    }
    return v;
}

std::size_t parse_count(const LearnerSpec& spec, const std::string& key) {
    const double v = parse_double(spec, key);
    if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw ConfigError("learner " + spec.name + ": parameter " + key +
                          " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

void check_keys(const LearnerSpec& spec, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : spec.params) {
        if (!ok.count(k)) {
            throw ConfigError("learner " + spec.name + ": unknown parameter '" + k + "'");
        }
    }
}

class ConstantLearner final : public Learner {
public:
    ConstantLearner(LearnerSpec spec, bool zero) : spec_(std::move(spec)), zero_(zero) {
        check_keys(spec_, {});
    }
    PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource&) const override {
        const auto p = static_cast<std::size_t>(x.cols());
        PredictionFunction f = zero_ ? fit_zero(p) : fit_mean(y, p);
        f.excluded.resize(p);
        for (std::size_t j = 0; j < p; ++j) f.excluded[j] = j;
        return f;
    }
    const LearnerSpec& spec() const override { return spec_; }
    ClassKind class_kind() const override { return zero_ ? ClassKind::zero : ClassKind::constant; }
    std::optional<std::size_t> max_support() const override { return 0; }

private:
    LearnerSpec spec_;
    bool zero_;
};

class OlsLearner final : public Learner {
public:
    explicit OlsLearner(LearnerSpec spec) : spec_(std::move(spec)) { check_keys(spec_, {}); }
    PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource&) const override {
        return fit_ols(x, y, spec_.restriction);
    }
    const LearnerSpec& spec() const override { return spec_; }
    ClassKind class_kind() const override { return ClassKind::linear; }

private:
    LearnerSpec spec_;
};

class LogisticLearner final : public Learner {
public:
    explicit LogisticLearner(LearnerSpec spec) : spec_(std::move(spec)) {
        check_keys(spec_, {"max_iter", "tol"});
        if (spec_.params.count("max_iter")) {
            options_.max_iterations = static_cast<int>(parse_count(spec_, "max_iter"));
        }
        if (spec_.params.count("tol")) options_.gradient_tolerance = parse_double(spec_, "tol");
    }
    PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource&) const override {
        return fit_logistic(x, y, spec_.restriction, options_);
    }
    const LearnerSpec& spec() const override { return spec_; }
    ClassKind class_kind() const override { return ClassKind::linear; }

private:
    LearnerSpec spec_;
    LogisticOptions options_;
};

class LassoLearner final : public Learner {
public:
    LassoLearner(LearnerSpec spec, Family family) : spec_(std::move(spec)), family_(family) {
        check_keys(spec_, {"cv_folds", "grid", "min_ratio", "tol", "lambda"});
        if (spec_.params.count("cv_folds")) options_.cv_folds = parse_count(spec_, "cv_folds");
        if (spec_.params.count("grid")) options_.grid_size = parse_count(spec_, "grid");
        if (spec_.params.count("min_ratio")) options_.min_ratio = parse_double(spec_, "min_ratio");
        if (spec_.params.count("tol")) options_.tolerance = parse_double(spec_, "tol");
        if (spec_.params.count("lambda")) options_.lambda = parse_double(spec_, "lambda");
        if (options_.cv_folds < 2) throw ConfigError("lasso: cv_folds must be at least 2");
        if (!(options_.min_ratio > 0.0 && options_.min_ratio < 1.0)) {
            throw ConfigError("lasso: min_ratio must lie in (0, 1)");
        }
        if (!(options_.tolerance > 0.0)) throw ConfigError("lasso: tol must be positive");
    }
    PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource& source) const override {
        return fit_lasso(x, y, family_, spec_.restriction, options_, source);
    }
    const LearnerSpec& spec() const override { return spec_; }
    ClassKind class_kind() const override { return ClassKind::linear; }

private:
    LearnerSpec spec_;
    Family family_;
    LassoOptions options_;
};

class BestSubsetLearner final : public Learner {
public:
    explicit BestSubsetLearner(LearnerSpec spec) : spec_(std::move(spec)) {
        check_keys(spec_, {"s", "family"});
        if (!spec_.params.count("s")) throw ConfigError("best_subset: subset size s is required");
        size_ = parse_count(spec_, "s");
        if (spec_.params.count("family")) {
            const auto& fam = spec_.params.at("family");
            if (fam == "linear") family_ = Family::linear;
            else if (fam == "logistic") family_ = Family::logistic;
            else throw ConfigError("best_subset: family must be linear or logistic");
        }
    }
    PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource&) const override {
        return fit_best_subset(x, y, size_, family_, spec_.restriction);
    }
    const LearnerSpec& spec() const override { return spec_; }
    ClassKind class_kind() const override { return ClassKind::linear; }
    std::optional<std::size_t> max_support() const override { return size_; }

private:
    LearnerSpec spec_;
    std::size_t size_ = 1;
    Family family_ = Family::linear;
};

}  // namespace

LearnerSpec LearnerSpec::parse(std::string_view text) {
    LearnerSpec spec;
    const std::string s = trim(text);
    const auto open = s.find('(');
    if (open == std::string::npos) {
        spec.name = s;
    } else {
        if (s.back() != ')') throw ConfigError("learner spec '" + s + "': missing ')'");
        spec.name = trim(std::string_view(s).substr(0, open));
        const std::string body = s.substr(open + 1, s.size() - open - 2);
        std::size_t start = 0;
        while (start <= body.size()) {
            const auto comma = body.find(',', start);
            const std::string item =
                trim(std::string_view(body).substr(start, comma == std::string::npos
                                                              ? std::string::npos
                                                              : comma - start));
            if (!item.empty()) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) {
                    if (spec.name != "best_subset" || spec.params.count("s")) {
                        throw ConfigError("learner spec '" + s + "': expected key=value, got '" +
                                          item + "'");
                    }
                    spec.params["s"] = item;
                } else {
                    spec.params[trim(std::string_view(item).substr(0, eq))] =
                        trim(std::string_view(item).substr(eq + 1));
                }
            }
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    if (spec.name.empty()) throw ConfigError("empty learner spec");
    return spec;
}

std::string LearnerSpec::to_string() const {
    if (params.empty()) return name;
    std::string out = name + "(";
    bool first = true;
    for (const auto& [k, v] : params) {
        if (!first) out += ",";
        out += k + "=" + v;
        first = false;
    }
    return out + ")";
}

nlohmann::json Learner::describe() const {
    return {{"name", spec().name},
            {"spec", spec().to_string()},
            {"params", spec().params},
            {"excluded", spec().restriction}};
}

std::shared_ptr<const Learner> make_learner(const LearnerSpec& spec_in) {
    LearnerSpec spec = spec_in;
    spec.restriction = normalize_restriction(spec.restriction);
    if (spec.name == "ols") return std::make_shared<OlsLearner>(std::move(spec));
    if (spec.name == "logistic") return std::make_shared<LogisticLearner>(std::move(spec));
    if (spec.name == "lasso_linear") {
        return std::make_shared<LassoLearner>(std::move(spec), Family::linear);
    }
    if (spec.name == "lasso_logistic") {
        return std::make_shared<LassoLearner>(std::move(spec), Family::logistic);
    }
    if (spec.name == "mean_only") return std::make_shared<ConstantLearner>(std::move(spec), false);
    if (spec.name == "zero") return std::make_shared<ConstantLearner>(std::move(spec), true);
    if (spec.name == "best_subset") return std::make_shared<BestSubsetLearner>(std::move(spec));
    throw ConfigError("unknown learner '" + spec.name +
                      "' (expected ols | logistic | lasso_linear | lasso_logistic | mean_only | "
                      "zero | best_subset(s))");
}

std::shared_ptr<const Learner> make_learner(std::string_view spec_text, Restriction restriction) {
    LearnerSpec spec = LearnerSpec::parse(spec_text);
    spec.restriction = std::move(restriction);
    return make_learner(spec);
}

bool nested_in(const Learner& restricted, const Learner& full, std::size_t p) {
    using K = Learner::ClassKind;
    const K r = restricted.class_kind();
    const K f = full.class_kind();
    if (r == K::zero) return true;
    if (f == K::zero) return false;
    if (r == K::constant) return true;
    if (f == K::constant) return false;
    if (r == K::opaque || f == K::opaque) return true;

    const auto r_active = active_columns(p, restricted.restriction());
    const auto f_active = active_columns(p, full.restriction());
    for (auto j : r_active) {
        if (!std::binary_search(f_active.begin(), f_active.end(), j)) return false;
    }
    if (const auto cap = full.max_support()) {
        const std::size_t used = restricted.max_support()
                                     ? std::min(*restricted.max_support(), r_active.size())
                                     : r_active.size();
        if (used > *cap) return false;
    }
    return true;
}

}  // namespace zipper
