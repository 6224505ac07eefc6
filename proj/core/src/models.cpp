#include "eqcov/models.hpp"

#include <string>

#include "eqcov/linear_models.hpp"
#include "eqcov/mlp.hpp"

namespace eqcov {

double pinball_loss(double residual, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("pinball level must lie in (0,1)");
    }
    return residual > 0.0 ? level * residual : (level - 1.0) * residual;
}

TrainData make_train_data(const Dataset& dataset, std::span<const std::size_t> indices) {
    TrainData data;
    data.x.reserve(indices.size());
    data.y.reserve(indices.size());
    for (std::size_t i : indices) {
        data.x.push_back(dataset[i].features);
        data.y.push_back(dataset[i].response);
    }
    return data;
}

TrainData make_train_data(const Dataset& dataset) {
    TrainData data;
    data.x.reserve(dataset.size());
    data.y.reserve(dataset.size());
    for (const Sample& s : dataset.samples()) {
        data.x.push_back(s.features);
        data.y.push_back(s.response);
    }
    return data;
}

std::pair<double, double> predict_quantiles(const QuantilePairModel& model,
                                            std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.feature_dim()) {
        throw DataError("quantile model dimension mismatch");
    }
    return model.predict(x);
}

double predict_mean(const MeanModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.feature_dim()) {
        throw DataError("mean model dimension mismatch");
    }
    return model.predict(x);
}

OracleQuantileModel::OracleQuantileModel(SyntheticSpec spec, int group, double alpha_lo,
                                         double alpha_hi)
    : spec_(std::move(spec)), group_(group), alpha_lo_(alpha_lo), alpha_hi_(alpha_hi) {
    spec_.validate();
    if (group < 0 || group >= spec_.group_count()) {
        throw ConfigError("oracle group out of range");
    }
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi < 1.0)) {
        throw ConfigError("oracle levels must satisfy 0 < alpha_lo < alpha_hi < 1");
    }
}

std::pair<double, double> OracleQuantileModel::predict(std::span<const double> x) const {
    return {spec_.conditional_quantile(group_, x, alpha_lo_),
            spec_.conditional_quantile(group_, x, alpha_hi_)};
}

nlohmann::json OracleQuantileModel::to_json() const {
    return nlohmann::json{{"type", "oracle_quantile"},
                          {"spec", spec_},
                          {"group", group_},
                          {"alpha_lo", alpha_lo_},
                          {"alpha_hi", alpha_hi_}};
}

OracleMeanModel::OracleMeanModel(SyntheticSpec spec, int group)
    : spec_(std::move(spec)), group_(group) {
    spec_.validate();
    if (group < 0 || group >= spec_.group_count()) {
        throw ConfigError("oracle group out of range");
    }
}

double OracleMeanModel::predict(std::span<const double> x) const {
    return spec_.conditional_mean(group_, x);
}

nlohmann::json OracleMeanModel::to_json() const {
    return nlohmann::json{{"type", "oracle_mean"}, {"spec", spec_}, {"group", group_}};
}

namespace {

Mlp mlp_from_json(const nlohmann::json& j) {
    Mlp net(j.at("input_dim").get<int>(), j.at("hidden").get<std::vector<int>>(),
            j.at("output_dim").get<int>());
    net.set_parameters(j.at("params").get<std::vector<double>>());
    return net;
}

}  // namespace

QuantilePairPtr quantile_model_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "mlp_quantile") {
        return std::make_shared<MlpQuantileModel>(
            mlp_from_json(j), j.at("alpha_lo").get<double>(), j.at("alpha_hi").get<double>(),
            j.at("config").get<NetConfig>());
    }
    if (type == "linear_quantile_pair") {
        return std::make_shared<LinearQuantilePair>(
            j.at("lo").get<AffineFunction>(), j.at("hi").get<AffineFunction>(),
            j.at("alpha_lo").get<double>(), j.at("alpha_hi").get<double>());
    }
    if (type == "oracle_quantile") {
        return std::make_shared<OracleQuantileModel>(
            j.at("spec").get<SyntheticSpec>(), j.at("group").get<int>(),
            j.at("alpha_lo").get<double>(), j.at("alpha_hi").get<double>());
    }
    throw ConfigError("unknown quantile model type: " + type);
}

MeanModelPtr mean_model_from_json(const nlohmann::json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "mlp_mean") {
        return std::make_shared<MlpMeanModel>(mlp_from_json(j), j.at("config").get<NetConfig>());
    }
    if (type == "linear_mean") {
        return std::make_shared<LinearMeanModel>(j.at("fn").get<AffineFunction>());
    }
    if (type == "oracle_mean") {
        return std::make_shared<OracleMeanModel>(j.at("spec").get<SyntheticSpec>(),
                                                 j.at("group").get<int>());
    }
    throw ConfigError("unknown mean model type: " + type);
}

}  // namespace eqcov
