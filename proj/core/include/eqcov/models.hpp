#ifndef EQCOV_MODELS_HPP
#define EQCOV_MODELS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "eqcov/dataset.hpp"
#include "eqcov/synthetic.hpp"

namespace eqcov {

// Asymmetric piecewise-linear loss whose population minimizer is the
// conditional quantile at `level`:
//   rho(t) = level * t        if t > 0
//            (level - 1) * t  otherwise,   t = y - yhat.
double pinball_loss(double residual, double level);

enum class TrainingMode { joint, groupwise };

// Appendix-style two-hidden-layer network hyperparameters.
struct NetConfig {
    std::vector<int> hidden = {64, 64};
    double learning_rate = 5e-4;
    int batch_size = 64;
    double weight_decay = 1e-6;
    double dropout = 0.1;
    int max_epochs = 1000;
    double validation_fraction = 0.1;  // held-out slice for early stopping
    std::uint64_t seed = 0;

    void validate() const;
};

void to_json(nlohmann::json& j, const NetConfig& c);
void from_json(const nlohmann::json& j, NetConfig& c);

// (x, y) pairs as used by the fitting routines; group labels are not the
// model's business.
struct TrainData {
    std::vector<std::vector<double>> x;
    std::vector<double> y;

    std::size_t size() const { return y.size(); }
    int feature_dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
};

TrainData make_train_data(const Dataset& dataset, std::span<const std::size_t> indices);
TrainData make_train_data(const Dataset& dataset);

// Per-epoch history of a network fit; selected_epoch is 1-based.
struct FitReport {
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
    int selected_epoch = 0;
};

// Lower/upper conditional-quantile pair q_lo, q_hi fitted at levels
// (alpha_lo, alpha_hi), 0 < alpha_lo < alpha_hi < 1.
class QuantilePairModel {
public:
    virtual ~QuantilePairModel() = default;
    virtual std::pair<double, double> predict(std::span<const double> x) const = 0;
    virtual std::pair<double, double> levels() const = 0;
    virtual int feature_dim() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class MeanModel {
public:
    virtual ~MeanModel() = default;
    virtual double predict(std::span<const double> x) const = 0;
    virtual int feature_dim() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

using QuantilePairPtr = std::shared_ptr<const QuantilePairModel>;
using MeanModelPtr = std::shared_ptr<const MeanModel>;

std::pair<double, double> predict_quantiles(const QuantilePairModel& model,
                                            std::span<const double> x);
double predict_mean(const MeanModel& model, std::span<const double> x);

// Type-tagged deserialization, inverse of the models' to_json.
QuantilePairPtr quantile_model_from_json(const nlohmann::json& j);
MeanModelPtr mean_model_from_json(const nlohmann::json& j);

// Analytic models backed by a synthetic spec; handy as perfectly calibrated
// bases in simulations.
class OracleQuantileModel final : public QuantilePairModel {
public:
    OracleQuantileModel(SyntheticSpec spec, int group, double alpha_lo, double alpha_hi);
    std::pair<double, double> predict(std::span<const double> x) const override;
    std::pair<double, double> levels() const override { return {alpha_lo_, alpha_hi_}; }
    int feature_dim() const override { return spec_.feature_dim; }
    nlohmann::json to_json() const override;

private:
    SyntheticSpec spec_;
    int group_;
    double alpha_lo_, alpha_hi_;
};

class OracleMeanModel final : public MeanModel {
public:
    OracleMeanModel(SyntheticSpec spec, int group);
    double predict(std::span<const double> x) const override;
    int feature_dim() const override { return spec_.feature_dim; }
    nlohmann::json to_json() const override;

private:
    SyntheticSpec spec_;
    int group_;
};

}  // namespace eqcov

#endif  // EQCOV_MODELS_HPP
