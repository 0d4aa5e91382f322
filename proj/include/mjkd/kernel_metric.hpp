#pragma once

#include <span>
#include <vector>

#include "mjkd/common.hpp"
#include "mjkd/network.hpp"

namespace mjkd {

// Multi-bandwidth Gaussian kernel: the base bandwidth comes from the mean
// cross-pair squared distance (or a fixed value) and is scaled by each
// multiplier; the kernel value is the average over the scaled bandwidths.
struct KernelSpec {
    enum class Bandwidth : int { mean_cross_pair_sqdist = 0, fixed = 1 };

    std::vector<double> multipliers{1.0, 2.0, 4.0, 0.5, 0.25};
    Bandwidth rule = Bandwidth::mean_cross_pair_sqdist;
    double fixed_gamma = 1.0;
    double epsilon = 1e-12;

    void validate() const;
};

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double gamma);

// Mean squared Euclidean distance over all cross pairs; epsilon when the
// mean degenerates to zero.
double base_bandwidth(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                      double epsilon = 1e-12);

double multi_kernel(std::span<const double> x, std::span<const double> y, double gamma0, const KernelSpec& spec);

// Product over the stack's layers of the per-layer multi-bandwidth kernel.
double joint_kernel(const FeatureStack& a, const FeatureStack& b, std::span<const double> layer_gamma0,
                    const KernelSpec& spec);

// Source feature stacks grouped by class, with per-layer bandwidths cached
// once from all source vs. all target features.
struct CategoryBank {
    std::vector<std::vector<FeatureStack>> classes;  // [class][sample]
    std::vector<double> layer_gamma0;
    std::vector<int> layer_ids;

    int class_count() const { return static_cast<int>(classes.size()); }

    static CategoryBank build(const std::vector<FeatureStack>& source_stacks, std::span<const int> source_labels,
                              int class_count, const std::vector<FeatureStack>& target_stacks,
                              const KernelSpec& spec);
};

// Squared kernelized distance between one target stack and a source class:
// k(t,t) + mean_{i,k} k(s_i,s_k) - 2 mean_i k(t,s_i) under the joint kernel.
// Clamped at zero; rounding may produce values down to -1e-12.
double mjkd(const FeatureStack& t, const CategoryBank& bank, int cls, const KernelSpec& spec);
double mjkd_unclamped(const FeatureStack& t, const CategoryBank& bank, int cls, const KernelSpec& spec);

// Sum over classes of the ratio of the distance to the predicted class to
// the distance to each class; small values mark confident predictions.
double relative_distance(const FeatureStack& t, int predicted, const CategoryBank& bank, const KernelSpec& spec);

// Distances for every (target, class) pair; rows are targets. This is the
// parallel kernel the pipeline uses; results are identical for any thread
// count.
Matrix mjkd_all(const std::vector<FeatureStack>& targets, const CategoryBank& bank, const KernelSpec& spec);

std::vector<double> relative_distances(const Matrix& d2, std::span<const int> predicted, double epsilon);

}  // namespace mjkd
