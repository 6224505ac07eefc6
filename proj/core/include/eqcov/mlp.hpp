#ifndef EQCOV_MLP_HPP
#define EQCOV_MLP_HPP

#include <variant>

#include "eqcov/models.hpp"
#include "eqcov/random.hpp"

namespace eqcov {

// Fully-connected ReLU network with a linear output layer. Parameters are
// addressable as one flat vector so gradients can be checked coordinate-wise.
class Mlp {
public:
    Mlp() = default;
    Mlp(int input_dim, std::vector<int> hidden, int output_dim);

    // Sums the pinball losses of the outputs at the given levels (one level
    // per output head).
    struct QuantileObjective {
        std::vector<double> levels;
    };
    struct SquaredObjective {};
    using Objective = std::variant<QuantileObjective, SquaredObjective>;

    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_dim_; }
    const std::vector<int>& hidden() const { return hidden_; }

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> theta);

    // Uniform fan-in initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    void init_weights(Rng& rng);

    // Inference forward pass; dropout is a training-time device only.
    std::vector<double> predict(std::span<const double> x) const;

    // Mean per-sample loss over the data, evaluated without dropout or
    // weight decay. Used for validation and for gradient checking.
    double data_loss(const TrainData& data, const Objective& objective) const;

    // Full-batch analytic gradient of data_loss with respect to the flat
    // parameter vector.
    std::vector<double> data_loss_gradient(const TrainData& data,
                                           const Objective& objective) const;

private:
    friend struct MlpTrainer;

    struct Layer {
        int in = 0, out = 0;
        std::vector<double> w;  // row-major out x in
        std::vector<double> b;
    };

    std::vector<Layer> layers_;
    std::vector<int> hidden_;
    int input_dim_ = 0;
    int output_dim_ = 0;
};

struct MlpFit {
    Mlp net;
    FitReport report;
};

// Minibatch Adam on the objective with inverted dropout, L2 weight decay and
// early stopping on a held-out validation slice (epoch of minimum validation
// loss is kept). Deterministic given (data, objective, config).
MlpFit train_mlp(const TrainData& data, const Mlp::Objective& objective,
                 const NetConfig& config);

// QuantilePairModel / MeanModel adapters over a trained net.
class MlpQuantileModel final : public QuantilePairModel {
public:
    MlpQuantileModel(Mlp net, double alpha_lo, double alpha_hi, NetConfig config);
    std::pair<double, double> predict(std::span<const double> x) const override;
    std::pair<double, double> levels() const override { return {alpha_lo_, alpha_hi_}; }
    int feature_dim() const override { return net_.input_dim(); }
    nlohmann::json to_json() const override;
    const Mlp& net() const { return net_; }

private:
    Mlp net_;
    double alpha_lo_, alpha_hi_;
    NetConfig config_;
};

class MlpMeanModel final : public MeanModel {
public:
    MlpMeanModel(Mlp net, NetConfig config);
    double predict(std::span<const double> x) const override;
    int feature_dim() const override { return net_.input_dim(); }
    nlohmann::json to_json() const override;
    const Mlp& net() const { return net_; }

private:
    Mlp net_;
    NetConfig config_;
};

struct QuantileNetFit {
    std::shared_ptr<const MlpQuantileModel> model;
    FitReport report;
};
struct MeanNetFit {
    std::shared_ptr<const MlpMeanModel> model;
    FitReport report;
};

// Two-output quantile network trained on the summed pinball losses at
// levels (alpha_lo, alpha_hi).
QuantileNetFit fit_quantile_net(const TrainData& data, double alpha_lo, double alpha_hi,
                                const NetConfig& config);

MeanNetFit fit_mean_net(const TrainData& data, const NetConfig& config);

}  // namespace eqcov

#endif  // EQCOV_MLP_HPP
