#ifndef EQCOV_DATASET_HPP
#define EQCOV_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "eqcov/errors.hpp"

namespace eqcov {

// One observation: feature vector, protected-group label, real response.
struct Sample {
    std::vector<double> features;
    int group = 0;
    double response = 0.0;
};

class Dataset {
public:
    Dataset() = default;

    // Validates finiteness, consistent feature dimension and non-negative
    // group labels; recomputes the group label set.
    static Dataset from_samples(std::vector<Sample> samples);

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    int feature_dim() const { return feature_dim_; }
    const std::set<int>& groups() const { return groups_; }
    const std::vector<Sample>& samples() const { return samples_; }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }

    std::map<int, std::size_t> group_counts() const;

    // New dataset containing the listed rows (indices into this dataset).
    Dataset subset(std::span<const std::size_t> indices) const;

    // Applies y -> log(1+y) to every response; rejects negative responses.
    Dataset with_log1p_response() const;

private:
    std::vector<Sample> samples_;
    int feature_dim_ = 0;
    std::set<int> groups_;
};

// y -> log(1+y), strictly increasing on y >= 0.
double transform_response(double y);

// Disjoint random split of {0..n-1} into proper-training and calibration
// index sets. |calibration| = floor(n * calibration_fraction), the remainder
// goes to proper training. Both sorted ascending; deterministic per seed.
struct SplitAssignment {
    std::vector<std::size_t> proper_train;
    std::vector<std::size_t> calibration;
    std::uint64_t seed = 0;
};

SplitAssignment split_train_calibration(std::size_t n, double calibration_fraction,
                                        std::uint64_t seed);
SplitAssignment split_train_calibration(const Dataset& dataset,
                                        double calibration_fraction,
                                        std::uint64_t seed);

// Per-feature affine transform to zero mean and unit variance (population
// standard deviation). Constant features keep scale 1 and are flagged.
class Standardizer {
public:
    Standardizer() = default;

    static Standardizer fit(const Dataset& dataset,
                            std::span<const std::size_t> indices);
    static Standardizer fit(const Dataset& dataset);

    std::vector<double> transform(std::span<const double> x) const;
    std::vector<double> inverse(std::span<const double> z) const;
    Dataset transform(const Dataset& dataset) const;

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& scale() const { return scale_; }
    const std::vector<bool>& constant_mask() const { return constant_mask_; }
    int feature_dim() const { return static_cast<int>(mean_.size()); }

    friend bool operator==(const Standardizer&, const Standardizer&) = default;

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
    std::vector<bool> constant_mask_;
};

}  // namespace eqcov

#endif  // EQCOV_DATASET_HPP
