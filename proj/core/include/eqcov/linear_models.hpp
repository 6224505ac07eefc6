#ifndef EQCOV_LINEAR_MODELS_HPP
#define EQCOV_LINEAR_MODELS_HPP

#include "eqcov/models.hpp"

namespace eqcov {

struct AffineFunction {
    std::vector<double> weights;
    double intercept = 0.0;

    double operator()(std::span<const double> x) const;
    friend bool operator==(const AffineFunction&, const AffineFunction&) = default;
};

void to_json(nlohmann::json& j, const AffineFunction& f);
void from_json(const nlohmann::json& j, AffineFunction& f);

// Full-batch subgradient schedule for the pinball objective.
struct StepSchedule {
    int iterations = 3000;
    double initial_step = 0.05;
};

// Affine predictor minimizing the empirical pinball loss at `level`; the fit
// runs on internally standardized data and keeps the best iterate seen.
// Deterministic (no randomness involved).
AffineFunction fit_linear_quantile(const TrainData& data, double level,
                                   const StepSchedule& schedule = {});

// Ordinary least squares with a small ridge term for degenerate designs.
AffineFunction fit_linear_mean(const TrainData& data, double ridge = 1e-8);

class LinearQuantilePair final : public QuantilePairModel {
public:
    LinearQuantilePair(AffineFunction lo, AffineFunction hi, double alpha_lo,
                       double alpha_hi);
    std::pair<double, double> predict(std::span<const double> x) const override;
    std::pair<double, double> levels() const override { return {alpha_lo_, alpha_hi_}; }
    int feature_dim() const override { return static_cast<int>(lo_.weights.size()); }
    nlohmann::json to_json() const override;

private:
    AffineFunction lo_, hi_;
    double alpha_lo_, alpha_hi_;
};

class LinearMeanModel final : public MeanModel {
public:
    explicit LinearMeanModel(AffineFunction fn) : fn_(std::move(fn)) {}
    double predict(std::span<const double> x) const override { return fn_(x); }
    int feature_dim() const override { return static_cast<int>(fn_.weights.size()); }
    nlohmann::json to_json() const override;

private:
    AffineFunction fn_;
};

// Convenience fitters matching the net-based ones.
QuantilePairPtr fit_linear_quantile_pair(const TrainData& data, double alpha_lo,
                                         double alpha_hi, const StepSchedule& schedule = {});
MeanModelPtr fit_linear_mean_model(const TrainData& data, double ridge = 1e-8);

}  // namespace eqcov

#endif  // EQCOV_LINEAR_MODELS_HPP
