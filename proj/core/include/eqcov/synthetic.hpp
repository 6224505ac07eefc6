#ifndef EQCOV_SYNTHETIC_HPP
#define EQCOV_SYNTHETIC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqcov/dataset.hpp"
#include "eqcov/random.hpp"

namespace eqcov {

// Standard normal quantile / CDF (shared by the generator oracle and the
// coverage test harnesses).
double normal_quantile(double p);
double normal_cdf(double x);

// Conditional mean families with closed forms. linear_sum is
// intercept + slope * sum_j x_j.
struct MeanFunction {
    enum class Kind { zero, constant, linear_sum };
    Kind kind = Kind::zero;
    double intercept = 0.0;
    double slope = 0.0;

    double operator()(std::span<const double> x) const;
    static MeanFunction zero() { return {}; }
    static MeanFunction constant(double c) { return {Kind::constant, c, 0.0}; }
    static MeanFunction linear(double intercept, double slope) {
        return {Kind::linear_sum, intercept, slope};
    }
};

// Conditional noise-scale families; affine_sum is base + slope * sum_j x_j
// and must stay non-negative on the feature support.
struct ScaleFunction {
    enum class Kind { constant, affine_sum };
    Kind kind = Kind::constant;
    double base = 1.0;
    double slope = 0.0;

    double operator()(std::span<const double> x) const;
    static ScaleFunction constant(double c) { return {Kind::constant, c, 0.0}; }
    static ScaleFunction affine(double base, double slope) {
        return {Kind::affine_sum, base, slope};
    }
};

struct GroupModel {
    MeanFunction mean;
    ScaleFunction scale;
};

// Test-bed distribution: group ~ proportions, features i.i.d. from the base
// distribution, response = mean_a(x) + scale_a(x) * eps with eps ~ N(0,1).
// Conditional quantiles are analytic: q_tau(x, a) = mean + scale * z_tau.
struct SyntheticSpec {
    enum class FeatureDist { standard_normal, uniform };

    std::vector<double> proportions;   // one per group label 0..G-1
    std::vector<GroupModel> groups;    // same length as proportions
    int feature_dim = 1;
    std::size_t count = 0;
    FeatureDist feature_dist = FeatureDist::standard_normal;
    double feature_lo = 0.0;  // uniform bounds
    double feature_hi = 1.0;

    void validate() const;
    int group_count() const { return static_cast<int>(proportions.size()); }

    double conditional_mean(int group, std::span<const double> x) const;
    double conditional_scale(int group, std::span<const double> x) const;
    double conditional_quantile(int group, std::span<const double> x, double tau) const;
};

void to_json(nlohmann::json& j, const SyntheticSpec& spec);
void from_json(const nlohmann::json& j, SyntheticSpec& spec);

// Stateless draw helpers; callers own the engine so parallel trials can use
// independently derived seeds.
class SyntheticSampler {
public:
    explicit SyntheticSampler(SyntheticSpec spec);

    const SyntheticSpec& spec() const { return spec_; }
    int draw_group(Rng& rng) const;
    std::vector<double> draw_features(Rng& rng) const;
    Sample draw(Rng& rng) const;
    Sample draw_from_group(int group, Rng& rng) const;

private:
    SyntheticSpec spec_;
    std::vector<double> cumulative_;
};

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace eqcov

#endif  // EQCOV_SYNTHETIC_HPP
