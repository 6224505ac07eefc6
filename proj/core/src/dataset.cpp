#include "eqcov/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eqcov/random.hpp"

namespace eqcov {

Dataset Dataset::from_samples(std::vector<Sample> samples) {
    Dataset ds;
    if (samples.empty()) {
        return ds;
    }
    ds.feature_dim_ = static_cast<int>(samples.front().features.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (static_cast<int>(s.features.size()) != ds.feature_dim_) {
            throw DataError("sample " + std::to_string(i) + " has " +
                            std::to_string(s.features.size()) + " features, expected " +
                            std::to_string(ds.feature_dim_));
        }
        if (s.group < 0) {
            throw DataError("sample " + std::to_string(i) + " has negative group label");
        }
        if (!std::isfinite(s.response)) {
            throw DataError("sample " + std::to_string(i) + " has non-finite response");
        }
        for (double v : s.features) {
            if (!std::isfinite(v)) {
                throw DataError("sample " + std::to_string(i) + " has non-finite feature");
            }
        }
        ds.groups_.insert(s.group);
    }
    ds.samples_ = std::move(samples);
    return ds;
}

std::map<int, std::size_t> Dataset::group_counts() const {
    std::map<int, std::size_t> counts;
    for (const Sample& s : samples_) {
        ++counts[s.group];
    }
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<Sample> rows;
    rows.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= samples_.size()) {
            throw DataError("subset index " + std::to_string(i) + " out of range");
        }
        rows.push_back(samples_[i]);
    }
    return from_samples(std::move(rows));
}

Dataset Dataset::with_log1p_response() const {
    std::vector<Sample> rows = samples_;
    for (Sample& s : rows) {
        s.response = transform_response(s.response);
    }
    return from_samples(std::move(rows));
}

double transform_response(double y) {
    if (!(y >= 0.0)) {
        throw DataError("response transform requires y >= 0, got " + std::to_string(y));
    }
    return std::log1p(y);
}

SplitAssignment split_train_calibration(std::size_t n, double calibration_fraction,
                                        std::uint64_t seed) {
    if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
        throw ConfigError("calibration fraction must lie in (0,1)");
    }
    const auto n_cal = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * calibration_fraction));
    if (n_cal == 0 || n_cal >= n) {
        throw ConfigError("split of n=" + std::to_string(n) + " at fraction " +
                          std::to_string(calibration_fraction) +
                          " leaves an empty part");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    SplitAssignment split;
    split.seed = seed;
    split.calibration.assign(order.begin(), order.begin() + n_cal);
    split.proper_train.assign(order.begin() + n_cal, order.end());
    std::sort(split.calibration.begin(), split.calibration.end());
    std::sort(split.proper_train.begin(), split.proper_train.end());
    return split;
}

SplitAssignment split_train_calibration(const Dataset& dataset,
                                        double calibration_fraction,
                                        std::uint64_t seed) {
    return split_train_calibration(dataset.size(), calibration_fraction, seed);
}

Standardizer Standardizer::fit(const Dataset& dataset,
                               std::span<const std::size_t> indices) {
    if (indices.empty()) {
        throw DataError("standardizer requires a nonempty index set");
    }
    const int p = dataset.feature_dim();
    Standardizer st;
    st.mean_.assign(p, 0.0);
    st.scale_.assign(p, 1.0);
    st.constant_mask_.assign(p, false);

    const double count = static_cast<double>(indices.size());
    for (std::size_t i : indices) {
        const auto& x = dataset[i].features;
        for (int j = 0; j < p; ++j) {
            st.mean_[j] += x[j];
        }
    }
    for (int j = 0; j < p; ++j) {
        st.mean_[j] /= count;
    }
    std::vector<double> var(p, 0.0);
    for (std::size_t i : indices) {
        const auto& x = dataset[i].features;
        for (int j = 0; j < p; ++j) {
            const double d = x[j] - st.mean_[j];
            var[j] += d * d;
        }
    }
    for (int j = 0; j < p; ++j) {
        var[j] /= count;  // population variance
        const double sd = std::sqrt(var[j]);
        if (sd > 0.0) {
            st.scale_[j] = sd;
        } else {
            st.scale_[j] = 1.0;
            st.constant_mask_[j] = true;
        }
    }
    return st;
}

Standardizer Standardizer::fit(const Dataset& dataset) {
    std::vector<std::size_t> all(dataset.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return fit(dataset, all);
}

std::vector<double> Standardizer::transform(std::span<const double> x) const {
    if (x.size() != mean_.size()) {
        throw DataError("standardizer dimension mismatch");
    }
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        z[j] = (x[j] - mean_[j]) / scale_[j];
    }
    return z;
}

std::vector<double> Standardizer::inverse(std::span<const double> z) const {
    if (z.size() != mean_.size()) {
        throw DataError("standardizer dimension mismatch");
    }
    std::vector<double> x(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        x[j] = z[j] * scale_[j] + mean_[j];
    }
    return x;
}

Dataset Standardizer::transform(const Dataset& dataset) const {
    std::vector<Sample> rows = dataset.samples();
    for (Sample& s : rows) {
        s.features = transform(s.features);
    }
    return Dataset::from_samples(std::move(rows));
}

}  // namespace eqcov
