#include "eqcov/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eqcov {

double AffineFunction::operator()(std::span<const double> x) const {
    if (x.size() != weights.size()) {
        throw DataError("linear model dimension mismatch");
    }
    double acc = intercept;
    for (std::size_t j = 0; j < x.size(); ++j) acc += weights[j] * x[j];
    return acc;
}

void to_json(nlohmann::json& j, const AffineFunction& f) {
    j = nlohmann::json{{"weights", f.weights}, {"intercept", f.intercept}};
}

void from_json(const nlohmann::json& j, AffineFunction& f) {
    j.at("weights").get_to(f.weights);
    j.at("intercept").get_to(f.intercept);
}

namespace {

struct Moments {
    std::vector<double> mean, scale;
    double y_mean = 0.0, y_scale = 1.0;
};

Moments feature_moments(const TrainData& data) {
    const std::size_t n = data.size();
    const int p = data.feature_dim();
    Moments m;
    m.mean.assign(p, 0.0);
    m.scale.assign(p, 1.0);
    for (const auto& row : data.x) {
        for (int j = 0; j < p; ++j) m.mean[j] += row[j];
    }
    for (int j = 0; j < p; ++j) m.mean[j] /= static_cast<double>(n);
    std::vector<double> var(p, 0.0);
    for (const auto& row : data.x) {
        for (int j = 0; j < p; ++j) {
            const double d = row[j] - m.mean[j];
            var[j] += d * d;
        }
    }
    for (int j = 0; j < p; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        m.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    m.y_mean = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(n);
    double yvar = 0.0;
    for (double y : data.y) {
        const double d = y - m.y_mean;
        yvar += d * d;
    }
    const double ysd = std::sqrt(yvar / static_cast<double>(n));
    m.y_scale = ysd > 0.0 ? ysd : 1.0;
    return m;
}

void check_train_data(const TrainData& data) {
    if (data.size() < 2) throw DataError("linear fit requires at least 2 pairs");
    for (const auto& row : data.x) {
        if (row.size() != data.x.front().size()) {
            throw DataError("inconsistent feature dimension in training data");
        }
    }
}

AffineFunction unstandardize(const std::vector<double>& w, double b, const Moments& m) {
    AffineFunction f;
    f.weights.resize(w.size());
    double intercept = b;
    for (std::size_t j = 0; j < w.size(); ++j) {
        f.weights[j] = m.y_scale * w[j] / m.scale[j];
        intercept -= w[j] * m.mean[j] / m.scale[j];
    }
    f.intercept = m.y_scale * intercept + m.y_mean;
    return f;
}

}  // namespace

AffineFunction fit_linear_quantile(const TrainData& data, double level,
                                   const StepSchedule& schedule) {
    check_train_data(data);
    if (!(level > 0.0 && level < 1.0)) {
        throw ConfigError("quantile level must lie in (0,1)");
    }
    if (schedule.iterations <= 0 || !(schedule.initial_step > 0.0)) {
        throw ConfigError("step schedule must have positive iterations and step");
    }

    const std::size_t n = data.size();
    const int p = data.feature_dim();
    const Moments m = feature_moments(data);

    // Degenerate response: the empirical quantile is the predictor.
    bool y_constant = true;
    for (double y : data.y) {
        if (y != data.y.front()) { y_constant = false; break; }
    }
    if (y_constant) {
        AffineFunction f;
        f.weights.assign(p, 0.0);
        f.intercept = data.y.front();
        return f;
    }

    std::vector<std::vector<double>> xs(n, std::vector<double>(p));
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) xs[i][j] = (data.x[i][j] - m.mean[j]) / m.scale[j];
        ys[i] = (data.y[i] - m.y_mean) / m.y_scale;
    }

    // Warm start at the marginal quantile.
    std::vector<double> sorted_y = ys;
    std::sort(sorted_y.begin(), sorted_y.end());
    const auto k = static_cast<std::size_t>(
        std::clamp(std::ceil(level * static_cast<double>(n)), 1.0, static_cast<double>(n)));
    std::vector<double> w(p, 0.0);
    double b = sorted_y[k - 1];

    // Full-batch Adam on the (convex, piecewise-linear) objective; the best
    // iterate is kept because subgradient steps do not settle at the optimum.
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::vector<double> mw(p, 0.0), vw(p, 0.0);
    double mb = 0.0, vb = 0.0;
    std::vector<double> best_w = w;
    double best_b = b;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> gw(p);

    for (int t = 1; t <= schedule.iterations; ++t) {
        std::fill(gw.begin(), gw.end(), 0.0);
        double gb = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pred = b;
            const double* xi = xs[i].data();
            for (int j = 0; j < p; ++j) pred += w[j] * xi[j];
            const double r = ys[i] - pred;
            loss += pinball_loss(r, level);
            const double g = r > 0.0 ? -level : (1.0 - level);
            for (int j = 0; j < p; ++j) gw[j] += g * xi[j];
            gb += g;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        loss *= inv_n;
        if (loss < best_loss) {
            best_loss = loss;
            best_w = w;
            best_b = b;
        }

        const double lr = schedule.initial_step /
                          (1.0 + 3.0 * static_cast<double>(t) /
                                     static_cast<double>(schedule.iterations));
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        for (int j = 0; j < p; ++j) {
            const double g = gw[j] * inv_n;
            mw[j] = beta1 * mw[j] + (1.0 - beta1) * g;
            vw[j] = beta2 * vw[j] + (1.0 - beta2) * g * g;
            w[j] -= lr * (mw[j] / bc1) / (std::sqrt(vw[j] / bc2) + eps);
        }
        const double g = gb * inv_n;
        mb = beta1 * mb + (1.0 - beta1) * g;
        vb = beta2 * vb + (1.0 - beta2) * g * g;
        b -= lr * (mb / bc1) / (std::sqrt(vb / bc2) + eps);
    }

    // Final candidate.
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = b;
        for (int j = 0; j < p; ++j) pred += w[j] * xs[i][j];
        loss += pinball_loss(ys[i] - pred, level);
    }
    loss /= static_cast<double>(n);
    if (loss < best_loss) {
        best_w = w;
        best_b = b;
    }

    return unstandardize(best_w, best_b, m);
}

AffineFunction fit_linear_mean(const TrainData& data, double ridge) {
    check_train_data(data);
    const std::size_t n = data.size();
    const int p = data.feature_dim();
    const Moments m = feature_moments(data);
    const int d = p + 1;  // intercept last

    // Normal equations on standardized data.
    std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> rhs(d, 0.0);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) row[j] = (data.x[i][j] - m.mean[j]) / m.scale[j];
        row[p] = 1.0;
        const double y = (data.y[i] - m.y_mean) / m.y_scale;
        for (int a = 0; a < d; ++a) {
            for (int c = a; c < d; ++c) gram[static_cast<std::size_t>(a) * d + c] += row[a] * row[c];
            rhs[a] += row[a] * y;
        }
    }
    for (int a = 0; a < d; ++a) {
        for (int c = 0; c < a; ++c) {
            gram[static_cast<std::size_t>(a) * d + c] = gram[static_cast<std::size_t>(c) * d + a];
        }
    }

    // Cholesky with escalating ridge for rank-deficient designs.
    std::vector<double> chol;
    double lambda = ridge * static_cast<double>(n);
    std::vector<double> beta(d, 0.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
        chol = gram;
        for (int a = 0; a < d; ++a) chol[static_cast<std::size_t>(a) * d + a] += lambda;
        bool ok = true;
        for (int a = 0; a < d && ok; ++a) {
            for (int c = 0; c <= a; ++c) {
                double sum = chol[static_cast<std::size_t>(a) * d + c];
                for (int k2 = 0; k2 < c; ++k2) {
                    sum -= chol[static_cast<std::size_t>(a) * d + k2] *
                           chol[static_cast<std::size_t>(c) * d + k2];
                }
                if (a == c) {
                    if (sum <= 0.0) { ok = false; break; }
                    chol[static_cast<std::size_t>(a) * d + c] = std::sqrt(sum);
                } else {
                    chol[static_cast<std::size_t>(a) * d + c] =
                        sum / chol[static_cast<std::size_t>(c) * d + c];
                }
            }
        }
        if (ok) {
            // Solve L z = rhs, then L^T beta = z.
            std::vector<double> z(d, 0.0);
            for (int a = 0; a < d; ++a) {
                double sum = rhs[a];
                for (int c = 0; c < a; ++c) sum -= chol[static_cast<std::size_t>(a) * d + c] * z[c];
                z[a] = sum / chol[static_cast<std::size_t>(a) * d + a];
            }
            for (int a = d - 1; a >= 0; --a) {
                double sum = z[a];
                for (int c = a + 1; c < d; ++c) sum -= chol[static_cast<std::size_t>(c) * d + a] * beta[c];
                beta[a] = sum / chol[static_cast<std::size_t>(a) * d + a];
            }
            std::vector<double> w(beta.begin(), beta.begin() + p);
            return unstandardize(w, beta[p], m);
        }
        lambda = std::max(lambda * 10.0, 1e-10);
    }
    throw DataError("least-squares system is numerically singular");
}

LinearQuantilePair::LinearQuantilePair(AffineFunction lo, AffineFunction hi,
                                       double alpha_lo, double alpha_hi)
    : lo_(std::move(lo)), hi_(std::move(hi)), alpha_lo_(alpha_lo), alpha_hi_(alpha_hi) {
    if (lo_.weights.size() != hi_.weights.size()) {
        throw ConfigError("quantile pair dimension mismatch");
    }
    if (!(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi < 1.0)) {
        throw ConfigError("quantile levels must satisfy 0 < alpha_lo < alpha_hi < 1");
    }
}

std::pair<double, double> LinearQuantilePair::predict(std::span<const double> x) const {
    return {lo_(x), hi_(x)};
}

nlohmann::json LinearQuantilePair::to_json() const {
    return nlohmann::json{{"type", "linear_quantile_pair"},
                          {"alpha_lo", alpha_lo_},
                          {"alpha_hi", alpha_hi_},
                          {"lo", lo_},
                          {"hi", hi_}};
}

nlohmann::json LinearMeanModel::to_json() const {
    return nlohmann::json{{"type", "linear_mean"}, {"fn", fn_}};
}

QuantilePairPtr fit_linear_quantile_pair(const TrainData& data, double alpha_lo,
                                         double alpha_hi, const StepSchedule& schedule) {
    AffineFunction lo = fit_linear_quantile(data, alpha_lo, schedule);
    AffineFunction hi = fit_linear_quantile(data, alpha_hi, schedule);
    return std::make_shared<LinearQuantilePair>(std::move(lo), std::move(hi), alpha_lo,
                                                alpha_hi);
}

MeanModelPtr fit_linear_mean_model(const TrainData& data, double ridge) {
    return std::make_shared<LinearMeanModel>(fit_linear_mean(data, ridge));
}

}  // namespace eqcov
