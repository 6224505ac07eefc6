#include "eqcov/synthetic.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

namespace eqcov {

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("normal quantile level must lie in (0,1)");
    }
    static const boost::math::normal_distribution<double> unit;
    return boost::math::quantile(unit, p);
}

double normal_cdf(double x) {
    static const boost::math::normal_distribution<double> unit;
    return boost::math::cdf(unit, x);
}

namespace {
double feature_sum(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0);
}
}  // namespace

double MeanFunction::operator()(std::span<const double> x) const {
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::constant: return intercept;
        case Kind::linear_sum: return intercept + slope * feature_sum(x);
    }
    return 0.0;
}

double ScaleFunction::operator()(std::span<const double> x) const {
    switch (kind) {
        case Kind::constant: return base;
        case Kind::affine_sum: return base + slope * feature_sum(x);
    }
    return base;
}

void SyntheticSpec::validate() const {
    if (proportions.empty() || proportions.size() != groups.size()) {
        throw ConfigError("synthetic spec needs one group model per proportion");
    }
    double total = 0.0;
    for (double p : proportions) {
        if (!(p >= 0.0)) throw ConfigError("group proportions must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("group proportions must sum to 1");
    }
    if (feature_dim <= 0) throw ConfigError("feature_dim must be positive");
    if (count == 0) throw ConfigError("sample count must be positive");
    if (feature_dist == FeatureDist::uniform && !(feature_lo < feature_hi)) {
        throw ConfigError("uniform feature bounds must satisfy lo < hi");
    }
    for (const GroupModel& g : groups) {
        if (g.scale.kind == ScaleFunction::Kind::constant && g.scale.base < 0.0) {
            throw ConfigError("constant noise scale must be non-negative");
        }
    }
}

double SyntheticSpec::conditional_mean(int group, std::span<const double> x) const {
    return groups.at(group).mean(x);
}

double SyntheticSpec::conditional_scale(int group, std::span<const double> x) const {
    const double s = groups.at(group).scale(x);
    if (s < 0.0) {
        throw ConfigError("noise scale is negative at a drawn feature point");
    }
    return s;
}

double SyntheticSpec::conditional_quantile(int group, std::span<const double> x,
                                           double tau) const {
    return conditional_mean(group, x) + conditional_scale(group, x) * normal_quantile(tau);
}

SyntheticSampler::SyntheticSampler(SyntheticSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    cumulative_.reserve(spec_.proportions.size());
    double acc = 0.0;
    for (double p : spec_.proportions) {
        acc += p;
        cumulative_.push_back(acc);
    }
    cumulative_.back() = 1.0;
}

int SyntheticSampler::draw_group(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    for (std::size_t a = 0; a < cumulative_.size(); ++a) {
        if (u <= cumulative_[a]) return static_cast<int>(a);
    }
    return static_cast<int>(cumulative_.size()) - 1;
}

std::vector<double> SyntheticSampler::draw_features(Rng& rng) const {
    std::vector<double> x(spec_.feature_dim);
    if (spec_.feature_dist == SyntheticSpec::FeatureDist::standard_normal) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : x) v = normal(rng);
    } else {
        std::uniform_real_distribution<double> uniform(spec_.feature_lo, spec_.feature_hi);
        for (double& v : x) v = uniform(rng);
    }
    return x;
}

Sample SyntheticSampler::draw_from_group(int group, Rng& rng) const {
    Sample s;
    s.group = group;
    s.features = draw_features(rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double eps = normal(rng);
    s.response = spec_.conditional_mean(group, s.features) +
                 spec_.conditional_scale(group, s.features) * eps;
    return s;
}

Sample SyntheticSampler::draw(Rng& rng) const {
    return draw_from_group(draw_group(rng), rng);
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    SyntheticSampler sampler(spec);
    Rng rng = make_rng(seed);
    std::vector<Sample> rows;
    rows.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        rows.push_back(sampler.draw(rng));
    }
    return Dataset::from_samples(std::move(rows));
}

namespace {

NLOHMANN_JSON_SERIALIZE_ENUM(MeanFunction::Kind, {
    {MeanFunction::Kind::zero, "zero"},
    {MeanFunction::Kind::constant, "constant"},
    {MeanFunction::Kind::linear_sum, "linear_sum"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(ScaleFunction::Kind, {
    {ScaleFunction::Kind::constant, "constant"},
    {ScaleFunction::Kind::affine_sum, "affine_sum"},
})

NLOHMANN_JSON_SERIALIZE_ENUM(SyntheticSpec::FeatureDist, {
    {SyntheticSpec::FeatureDist::standard_normal, "standard_normal"},
    {SyntheticSpec::FeatureDist::uniform, "uniform"},
})

}  // namespace

void to_json(nlohmann::json& j, const SyntheticSpec& spec) {
    nlohmann::json groups = nlohmann::json::array();
    for (const GroupModel& g : spec.groups) {
        groups.push_back({
            {"mean", {{"kind", g.mean.kind}, {"intercept", g.mean.intercept}, {"slope", g.mean.slope}}},
            {"scale", {{"kind", g.scale.kind}, {"base", g.scale.base}, {"slope", g.scale.slope}}},
        });
    }
    j = nlohmann::json{
        {"proportions", spec.proportions},
        {"groups", std::move(groups)},
        {"feature_dim", spec.feature_dim},
        {"count", spec.count},
        {"feature_dist", spec.feature_dist},
        {"feature_lo", spec.feature_lo},
        {"feature_hi", spec.feature_hi},
    };
}

void from_json(const nlohmann::json& j, SyntheticSpec& spec) {
    spec.proportions = j.at("proportions").get<std::vector<double>>();
    spec.groups.clear();
    for (const auto& g : j.at("groups")) {
        GroupModel gm;
        gm.mean.kind = g.at("mean").at("kind").get<MeanFunction::Kind>();
        gm.mean.intercept = g.at("mean").at("intercept").get<double>();
        gm.mean.slope = g.at("mean").at("slope").get<double>();
        gm.scale.kind = g.at("scale").at("kind").get<ScaleFunction::Kind>();
        gm.scale.base = g.at("scale").at("base").get<double>();
        gm.scale.slope = g.at("scale").at("slope").get<double>();
        spec.groups.push_back(gm);
    }
    spec.feature_dim = j.at("feature_dim").get<int>();
    spec.count = j.at("count").get<std::size_t>();
    spec.feature_dist = j.at("feature_dist").get<SyntheticSpec::FeatureDist>();
    spec.feature_lo = j.at("feature_lo").get<double>();
    spec.feature_hi = j.at("feature_hi").get<double>();
}

}  // namespace eqcov
