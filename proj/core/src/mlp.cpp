#include "eqcov/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eqcov {

Mlp::Mlp(int input_dim, std::vector<int> hidden, int output_dim)
    : hidden_(std::move(hidden)), input_dim_(input_dim), output_dim_(output_dim) {
    if (input_dim <= 0 || output_dim <= 0) {
        throw ConfigError("network dimensions must be positive");
    }
    int prev = input_dim;
    for (int width : hidden_) {
        if (width <= 0) throw ConfigError("hidden widths must be positive");
        layers_.push_back({prev, width, std::vector<double>(static_cast<std::size_t>(width) * prev, 0.0),
                           std::vector<double>(width, 0.0)});
        prev = width;
    }
    layers_.push_back({prev, output_dim,
                       std::vector<double>(static_cast<std::size_t>(output_dim) * prev, 0.0),
                       std::vector<double>(output_dim, 0.0)});
}

std::size_t Mlp::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers_) n += l.w.size() + l.b.size();
    return n;
}

std::vector<double> Mlp::parameters() const {
    std::vector<double> theta;
    theta.reserve(parameter_count());
    for (const Layer& l : layers_) {
        theta.insert(theta.end(), l.w.begin(), l.w.end());
        theta.insert(theta.end(), l.b.begin(), l.b.end());
    }
    return theta;
}

void Mlp::set_parameters(std::span<const double> theta) {
    if (theta.size() != parameter_count()) {
        throw ConfigError("parameter vector size mismatch");
    }
    std::size_t k = 0;
    for (Layer& l : layers_) {
        std::copy_n(theta.begin() + k, l.w.size(), l.w.begin());
        k += l.w.size();
        std::copy_n(theta.begin() + k, l.b.size(), l.b.begin());
        k += l.b.size();
    }
}

void Mlp::init_weights(Rng& rng) {
    for (Layer& l : layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        std::uniform_real_distribution<double> uniform(-bound, bound);
        for (double& w : l.w) w = uniform(rng);
        for (double& b : l.b) b = uniform(rng);
    }
}

namespace {

void affine_forward(const std::vector<double>& w, const std::vector<double>& b, int in,
                    int out, const double* a, double* z) {
    for (int i = 0; i < out; ++i) {
        const double* row = w.data() + static_cast<std::size_t>(i) * in;
        double acc = b[i];
        for (int j = 0; j < in; ++j) acc += row[j] * a[j];
        z[i] = acc;
    }
}

// d/dyhat of the per-sample loss; the t <= 0 branch owns the kink.
double pinball_output_grad(double residual, double level) {
    return residual > 0.0 ? -level : (1.0 - level);
}

double sample_loss(std::span<const double> out, double y, const Mlp::Objective& objective) {
    if (const auto* q = std::get_if<Mlp::QuantileObjective>(&objective)) {
        double loss = 0.0;
        for (std::size_t j = 0; j < out.size(); ++j) {
            loss += pinball_loss(y - out[j], q->levels[j]);
        }
        return loss;
    }
    const double d = y - out[0];
    return d * d;
}

void sample_output_grad(std::span<const double> out, double y,
                        const Mlp::Objective& objective, double* grad) {
    if (const auto* q = std::get_if<Mlp::QuantileObjective>(&objective)) {
        for (std::size_t j = 0; j < out.size(); ++j) {
            grad[j] = pinball_output_grad(y - out[j], q->levels[j]);
        }
        return;
    }
    grad[0] = 2.0 * (out[0] - y);
}

}  // namespace

std::vector<double> Mlp::predict(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim_) {
        throw DataError("network input dimension mismatch: got " +
                        std::to_string(x.size()) + ", expected " +
                        std::to_string(input_dim_));
    }
    std::vector<double> a(x.begin(), x.end());
    std::vector<double> z;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& l = layers_[li];
        z.assign(l.out, 0.0);
        affine_forward(l.w, l.b, l.in, l.out, a.data(), z.data());
        if (li + 1 < layers_.size()) {
            for (double& v : z) v = std::max(v, 0.0);
        }
        a = z;
    }
    return a;
}

double Mlp::data_loss(const TrainData& data, const Objective& objective) const {
    if (data.size() == 0) throw DataError("loss over empty data");
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::vector<double> out = predict(data.x[i]);
        total += sample_loss(out, data.y[i], objective);
    }
    return total / static_cast<double>(data.size());
}

// Shared by training and by the public full-batch gradient. Activations are
// the post-ReLU (and post-dropout, when masks are given) layer outputs.
namespace {

struct BackpropWorkspace {
    std::vector<std::vector<double>> activations;  // a[0] = input, a[L] = output
    std::vector<std::vector<double>> pre;          // z per layer
    std::vector<std::vector<double>> delta;        // dL/dz per layer
};

}  // namespace

std::vector<double> Mlp::data_loss_gradient(const TrainData& data,
                                            const Objective& objective) const {
    if (data.size() == 0) throw DataError("gradient over empty data");
    const std::size_t L = layers_.size();
    std::vector<std::vector<double>> gw(L);
    std::vector<std::vector<double>> gb(L);
    for (std::size_t li = 0; li < L; ++li) {
        gw[li].assign(layers_[li].w.size(), 0.0);
        gb[li].assign(layers_[li].b.size(), 0.0);
    }

    BackpropWorkspace ws;
    ws.activations.resize(L + 1);
    ws.pre.resize(L);
    ws.delta.resize(L);

    for (std::size_t i = 0; i < data.size(); ++i) {
        ws.activations[0].assign(data.x[i].begin(), data.x[i].end());
        for (std::size_t li = 0; li < L; ++li) {
            const Layer& l = layers_[li];
            ws.pre[li].assign(l.out, 0.0);
            affine_forward(l.w, l.b, l.in, l.out, ws.activations[li].data(),
                           ws.pre[li].data());
            ws.activations[li + 1] = ws.pre[li];
            if (li + 1 < L) {
                for (double& v : ws.activations[li + 1]) v = std::max(v, 0.0);
            }
        }

        ws.delta[L - 1].assign(output_dim_, 0.0);
        sample_output_grad(ws.activations[L], data.y[i], objective,
                           ws.delta[L - 1].data());
        for (std::size_t li = L - 1; li-- > 0;) {
            const Layer& next = layers_[li + 1];
            ws.delta[li].assign(layers_[li].out, 0.0);
            for (int j = 0; j < next.out; ++j) {
                const double dj = ws.delta[li + 1][j];
                if (dj == 0.0) continue;
                const double* row = next.w.data() + static_cast<std::size_t>(j) * next.in;
                for (int k = 0; k < next.in; ++k) {
                    ws.delta[li][k] += dj * row[k];
                }
            }
            for (int k = 0; k < layers_[li].out; ++k) {
                if (ws.pre[li][k] <= 0.0) ws.delta[li][k] = 0.0;
            }
        }

        for (std::size_t li = 0; li < L; ++li) {
            const Layer& l = layers_[li];
            const std::vector<double>& a = ws.activations[li];
            const std::vector<double>& d = ws.delta[li];
            for (int j = 0; j < l.out; ++j) {
                const double dj = d[j];
                if (dj == 0.0) continue;
                double* grow = gw[li].data() + static_cast<std::size_t>(j) * l.in;
                for (int k = 0; k < l.in; ++k) grow[k] += dj * a[k];
                // bias handled below
            }
            for (int j = 0; j < l.out; ++j) gb[li][j] += d[j];
        }
    }

    const double inv_n = 1.0 / static_cast<double>(data.size());
    std::vector<double> grad;
    grad.reserve(parameter_count());
    for (std::size_t li = 0; li < L; ++li) {
        for (double g : gw[li]) grad.push_back(g * inv_n);
        for (double g : gb[li]) grad.push_back(g * inv_n);
    }
    return grad;
}

namespace {

struct AdamState {
    std::vector<double> m, v;
    long step = 0;
};

// One Adam update over flat parameter/gradient vectors; weight decay enters
// as an L2 term on the gradient.
void adam_update(std::vector<double>& theta, const std::vector<double>& grad,
                 AdamState& state, double lr, double weight_decay) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i] + weight_decay * theta[i];
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace

// Training needs dropout-aware passes, so it keeps its own forward/backward
// over a minibatch instead of reusing the deterministic ones above.
struct MlpTrainer {
    static MlpFit run(const TrainData& data, const Mlp::Objective& objective,
                      const NetConfig& config) {
        config.validate();
        if (data.size() < 2) throw DataError("training requires at least 2 pairs");
        for (const auto& row : data.x) {
            if (row.size() != data.x.front().size()) {
                throw DataError("inconsistent feature dimension in training data");
            }
        }
        const int input_dim = data.feature_dim();
        const int output_dim = std::holds_alternative<Mlp::QuantileObjective>(objective)
                                   ? static_cast<int>(std::get<Mlp::QuantileObjective>(objective).levels.size())
                                   : 1;

        Mlp net(input_dim, config.hidden, output_dim);
        Rng rng = make_rng(config.seed);
        net.init_weights(rng);

        // Validation slice for early stopping.
        std::vector<std::size_t> order(data.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        auto n_val = static_cast<std::size_t>(
            std::floor(config.validation_fraction * static_cast<double>(data.size())));
        if (n_val >= data.size()) n_val = data.size() - 1;

        TrainData fit_data, val_data;
        for (std::size_t i = 0; i < order.size(); ++i) {
            TrainData& dst = (i < n_val) ? val_data : fit_data;
            dst.x.push_back(data.x[order[i]]);
            dst.y.push_back(data.y[order[i]]);
        }

        std::vector<double> theta = net.parameters();
        AdamState adam{std::vector<double>(theta.size(), 0.0),
                       std::vector<double>(theta.size(), 0.0), 0};

        FitReport report;
        std::vector<double> best_theta = theta;
        double best_val = std::numeric_limits<double>::infinity();
        int best_epoch = 0;

        std::vector<std::size_t> batch_order(fit_data.size());
        std::iota(batch_order.begin(), batch_order.end(), std::size_t{0});
        const auto batch_size = static_cast<std::size_t>(config.batch_size);

        for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
            std::shuffle(batch_order.begin(), batch_order.end(), rng);
            double epoch_loss = 0.0;
            std::size_t seen = 0;
            for (std::size_t start = 0; start < batch_order.size(); start += batch_size) {
                const std::size_t stop = std::min(start + batch_size, batch_order.size());
                std::span<const std::size_t> batch(batch_order.data() + start, stop - start);
                net.set_parameters(theta);
                std::vector<double> grad(theta.size(), 0.0);
                const double batch_loss =
                    minibatch_gradient(net, fit_data, batch, objective, config.dropout,
                                       rng, grad);
                adam_update(theta, grad, adam, config.learning_rate, config.weight_decay);
                epoch_loss += batch_loss * static_cast<double>(batch.size());
                seen += batch.size();
            }
            report.train_loss.push_back(epoch_loss / static_cast<double>(seen));

            if (!val_data.y.empty()) {
                net.set_parameters(theta);
                const double val = net.data_loss(val_data, objective);
                report.validation_loss.push_back(val);
                if (val < best_val) {
                    best_val = val;
                    best_theta = theta;
                    best_epoch = epoch;
                }
            }
        }

        if (!val_data.y.empty()) {
            net.set_parameters(best_theta);
            report.selected_epoch = best_epoch;
        } else {
            net.set_parameters(theta);
            report.selected_epoch = config.max_epochs;
        }
        return {std::move(net), std::move(report)};
    }

    // Mean loss over the batch; accumulates dL/dtheta into grad. Inverted
    // dropout on hidden activations, masks drawn from the shared engine.
    static double minibatch_gradient(const Mlp& net, const TrainData& data,
                                     std::span<const std::size_t> batch,
                                     const Mlp::Objective& objective, double dropout,
                                     Rng& rng, std::vector<double>& grad) {
        const auto& layers = net.layers_;
        const std::size_t L = layers.size();
        const double keep = 1.0 - dropout;
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<std::vector<double>> a(L + 1), z(L), delta(L), mask(L);
        double loss = 0.0;

        std::vector<std::vector<double>> gw(L), gb(L);
        for (std::size_t li = 0; li < L; ++li) {
            gw[li].assign(layers[li].w.size(), 0.0);
            gb[li].assign(layers[li].b.size(), 0.0);
        }

        for (std::size_t bi = 0; bi < batch.size(); ++bi) {
            const std::size_t i = batch[bi];
            a[0].assign(data.x[i].begin(), data.x[i].end());
            for (std::size_t li = 0; li < L; ++li) {
                const auto& l = layers[li];
                z[li].assign(l.out, 0.0);
                affine_forward(l.w, l.b, l.in, l.out, a[li].data(), z[li].data());
                a[li + 1] = z[li];
                if (li + 1 < L) {
                    for (double& v : a[li + 1]) v = std::max(v, 0.0);
                    if (dropout > 0.0) {
                        mask[li].assign(l.out, 0.0);
                        for (int k = 0; k < l.out; ++k) {
                            mask[li][k] = unit(rng) < dropout ? 0.0 : 1.0 / keep;
                            a[li + 1][k] *= mask[li][k];
                        }
                    }
                }
            }

            loss += sample_loss(a[L], data.y[i], objective);
            delta[L - 1].assign(net.output_dim_, 0.0);
            sample_output_grad(a[L], data.y[i], objective, delta[L - 1].data());

            for (std::size_t li = L - 1; li-- > 0;) {
                const auto& next = layers[li + 1];
                delta[li].assign(layers[li].out, 0.0);
                for (int j = 0; j < next.out; ++j) {
                    const double dj = delta[li + 1][j];
                    if (dj == 0.0) continue;
                    const double* row = next.w.data() + static_cast<std::size_t>(j) * next.in;
                    for (int k = 0; k < next.in; ++k) delta[li][k] += dj * row[k];
                }
                for (int k = 0; k < layers[li].out; ++k) {
                    if (dropout > 0.0) delta[li][k] *= mask[li][k];
                    if (z[li][k] <= 0.0) delta[li][k] = 0.0;
                }
            }

            for (std::size_t li = 0; li < L; ++li) {
                const auto& l = layers[li];
                for (int j = 0; j < l.out; ++j) {
                    const double dj = delta[li][j];
                    if (dj == 0.0) continue;
                    double* grow = gw[li].data() + static_cast<std::size_t>(j) * l.in;
                    const double* arow = a[li].data();
                    for (int k = 0; k < l.in; ++k) grow[k] += dj * arow[k];
                    gb[li][j] += dj;
                }
            }
        }

        const double inv_b = 1.0 / static_cast<double>(batch.size());
        std::size_t k = 0;
        for (std::size_t li = 0; li < L; ++li) {
            for (double g : gw[li]) grad[k++] = g * inv_b;
            for (double g : gb[li]) grad[k++] = g * inv_b;
        }
        return loss * inv_b;
    }
};

MlpFit train_mlp(const TrainData& data, const Mlp::Objective& objective,
                 const NetConfig& config) {
    return MlpTrainer::run(data, objective, config);
}

void NetConfig::validate() const {
    if (hidden.empty()) throw ConfigError("network needs at least one hidden layer");
    for (int h : hidden) {
        if (h <= 0) throw ConfigError("hidden widths must be positive");
    }
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (batch_size <= 0) throw ConfigError("batch size must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0,1)");
    if (max_epochs <= 0) throw ConfigError("max epochs must be positive");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
        throw ConfigError("validation fraction must lie in [0,1)");
    }
}

void to_json(nlohmann::json& j, const NetConfig& c) {
    j = nlohmann::json{{"hidden", c.hidden},
                       {"learning_rate", c.learning_rate},
                       {"batch_size", c.batch_size},
                       {"weight_decay", c.weight_decay},
                       {"dropout", c.dropout},
                       {"max_epochs", c.max_epochs},
                       {"validation_fraction", c.validation_fraction},
                       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, NetConfig& c) {
    j.at("hidden").get_to(c.hidden);
    j.at("learning_rate").get_to(c.learning_rate);
    j.at("batch_size").get_to(c.batch_size);
    j.at("weight_decay").get_to(c.weight_decay);
    j.at("dropout").get_to(c.dropout);
    j.at("max_epochs").get_to(c.max_epochs);
    j.at("validation_fraction").get_to(c.validation_fraction);
    j.at("seed").get_to(c.seed);
}

MlpQuantileModel::MlpQuantileModel(Mlp net, double alpha_lo, double alpha_hi,
                                   NetConfig config)
    : net_(std::move(net)), alpha_lo_(alpha_lo), alpha_hi_(alpha_hi),
      config_(std::move(config)) {}

std::pair<double, double> MlpQuantileModel::predict(std::span<const double> x) const {
    const std::vector<double> out = net_.predict(x);
    return {out[0], out[1]};
}

nlohmann::json MlpQuantileModel::to_json() const {
    return nlohmann::json{{"type", "mlp_quantile"},
                          {"alpha_lo", alpha_lo_},
                          {"alpha_hi", alpha_hi_},
                          {"input_dim", net_.input_dim()},
                          {"hidden", net_.hidden()},
                          {"output_dim", net_.output_dim()},
                          {"params", net_.parameters()},
                          {"config", config_}};
}

MlpMeanModel::MlpMeanModel(Mlp net, NetConfig config)
    : net_(std::move(net)), config_(std::move(config)) {}

double MlpMeanModel::predict(std::span<const double> x) const {
    return net_.predict(x)[0];
}

nlohmann::json MlpMeanModel::to_json() const {
    return nlohmann::json{{"type", "mlp_mean"},
                          {"input_dim", net_.input_dim()},
                          {"hidden", net_.hidden()},
                          {"output_dim", net_.output_dim()},
                          {"params", net_.parameters()},
                          {"config", config_}};
}

QuantileNetFit fit_quantile_net(const TrainData& data, double alpha_lo, double alpha_hi,
                                const NetConfig& config) {
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi < 1.0)) {
        throw ConfigError("quantile levels must satisfy 0 < alpha_lo < alpha_hi < 1");
    }
    MlpFit fit = train_mlp(data, Mlp::QuantileObjective{{alpha_lo, alpha_hi}}, config);
    return {std::make_shared<MlpQuantileModel>(std::move(fit.net), alpha_lo, alpha_hi, config),
            std::move(fit.report)};
}

MeanNetFit fit_mean_net(const TrainData& data, const NetConfig& config) {
    MlpFit fit = train_mlp(data, Mlp::SquaredObjective{}, config);
    return {std::make_shared<MlpMeanModel>(std::move(fit.net), config), std::move(fit.report)};
}

}  // namespace eqcov
