#include "mjkd/kernel_metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mjkd {

void KernelSpec::validate() const {
    if (multipliers.empty()) throw std::invalid_argument("kernel spec: multipliers must be nonempty");
    for (double m : multipliers)
        if (!(m > 0.0)) throw std::invalid_argument("kernel spec: multipliers must be positive");
    if (rule == Bandwidth::fixed && !(fixed_gamma > 0.0))
        throw std::invalid_argument("kernel spec: fixed_gamma must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("kernel spec: epsilon must be positive");
}

namespace {

double sqdist(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

double multi_kernel_from_sqdist(double d2, double gamma0, const KernelSpec& spec) {
    double sum = 0.0;
    for (double m : spec.multipliers) sum += std::exp(-d2 / (gamma0 * m));
    return sum / static_cast<double>(spec.multipliers.size());
}

void check_same_range(const FeatureStack& a, const FeatureStack& b) {
    if (a.layer_ids != b.layer_ids)
        throw std::invalid_argument("joint_kernel: stacks cover different layer ranges");
    for (std::size_t l = 0; l < a.layers.size(); ++l)
        if (a.layers[l].size() != b.layers[l].size())
            throw std::invalid_argument("joint_kernel: layer width mismatch at layer " +
                                        std::to_string(a.layer_ids[l]));
}

// Shared accumulation core so that the single-sample entry point and the
// batch path agree bitwise.
double joint_kernel_unchecked(const FeatureStack& a, const FeatureStack& b, std::span<const double> gamma0,
                              const KernelSpec& spec) {
    double prod = 1.0;
    for (std::size_t l = 0; l < a.layers.size(); ++l)
        prod *= multi_kernel_from_sqdist(sqdist(a.layers[l], b.layers[l]), gamma0[l], spec);
    return prod;
}

// Mean of the joint kernel over all ordered pairs within one class.
double class_self_term(const std::vector<FeatureStack>& samples, std::span<const double> gamma0,
                       const KernelSpec& spec) {
    const std::size_t n = samples.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) sum += joint_kernel_unchecked(samples[i], samples[k], gamma0, spec);
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

double cross_term(const FeatureStack& t, const std::vector<FeatureStack>& samples, std::span<const double> gamma0,
                  const KernelSpec& spec) {
    double sum = 0.0;
    for (const auto& s : samples) sum += joint_kernel_unchecked(t, s, gamma0, spec);
    return 2.0 * sum / static_cast<double>(samples.size());
}

double mjkd_core(const FeatureStack& t, const std::vector<FeatureStack>& samples, double self_term,
                 std::span<const double> gamma0, const KernelSpec& spec) {
    double k_tt = joint_kernel_unchecked(t, t, gamma0, spec);
    return k_tt + self_term - cross_term(t, samples, gamma0, spec);
}

void check_class(const CategoryBank& bank, int cls) {
    if (cls < 0 || cls >= bank.class_count())
        throw std::invalid_argument("mjkd: class " + std::to_string(cls) + " out of range");
    if (bank.classes[cls].empty())
        throw std::invalid_argument("mjkd: class " + std::to_string(cls) + " has no source samples");
}

}  // namespace

double gaussian_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gaussian_kernel: gamma must be positive");
    if (x.size() != y.size()) throw std::invalid_argument("gaussian_kernel: dimension mismatch");
    return std::exp(-sqdist(x, y) / gamma);
}

double base_bandwidth(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                      double epsilon) {
    if (a.empty() || b.empty()) throw std::invalid_argument("base_bandwidth: empty sample set");
    // Per-row partial sums keep the result independent of the thread count.
    std::vector<double> row_sums(a.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(a.size()); ++i) {
        double s = 0.0;
        for (const auto& y : b) s += sqdist(a[i], y);
        row_sums[i] = s;
    }
    double total = 0.0;
    for (double s : row_sums) total += s;
    double mean = total / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    return mean > 0.0 ? mean : epsilon;
}

double multi_kernel(std::span<const double> x, std::span<const double> y, double gamma0, const KernelSpec& spec) {
    if (!(gamma0 > 0.0)) throw std::invalid_argument("multi_kernel: gamma0 must be positive");
    if (x.size() != y.size()) throw std::invalid_argument("multi_kernel: dimension mismatch");
    spec.validate();
    return multi_kernel_from_sqdist(sqdist(x, y), gamma0, spec);
}

double joint_kernel(const FeatureStack& a, const FeatureStack& b, std::span<const double> layer_gamma0,
                    const KernelSpec& spec) {
    check_same_range(a, b);
    if (layer_gamma0.size() != a.layers.size())
        throw std::invalid_argument("joint_kernel: bandwidth count does not match layer count");
    return joint_kernel_unchecked(a, b, layer_gamma0, spec);
}

CategoryBank CategoryBank::build(const std::vector<FeatureStack>& source_stacks, std::span<const int> source_labels,
                                 int class_count, const std::vector<FeatureStack>& target_stacks,
                                 const KernelSpec& spec) {
    spec.validate();
    if (class_count < 1) throw std::invalid_argument("category bank: class_count must be positive");
    if (source_stacks.empty() || target_stacks.empty())
        throw std::invalid_argument("category bank: empty stack set");
    if (source_labels.size() != source_stacks.size())
        throw std::invalid_argument("category bank: label count mismatch");

    CategoryBank bank;
    bank.layer_ids = source_stacks.front().layer_ids;
    bank.classes.resize(class_count);
    for (std::size_t i = 0; i < source_stacks.size(); ++i) {
        int m = source_labels[i];
        if (m < 0 || m >= class_count)
            throw std::invalid_argument("category bank: source label out of range");
        if (source_stacks[i].layer_ids != bank.layer_ids)
            throw std::invalid_argument("category bank: inconsistent layer ranges");
        bank.classes[m].push_back(source_stacks[i]);
    }
    for (int m = 0; m < class_count; ++m)
        if (bank.classes[m].empty())
            throw std::invalid_argument("category bank: class " + std::to_string(m) + " has no source samples");

    const std::size_t n_layers = bank.layer_ids.size();
    bank.layer_gamma0.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (spec.rule == KernelSpec::Bandwidth::fixed) {
            bank.layer_gamma0[l] = spec.fixed_gamma;
            continue;
        }
        std::vector<std::vector<double>> src(source_stacks.size());
        std::vector<std::vector<double>> tgt(target_stacks.size());
        for (std::size_t i = 0; i < source_stacks.size(); ++i) src[i] = source_stacks[i].layers[l];
        for (std::size_t j = 0; j < target_stacks.size(); ++j) {
            if (target_stacks[j].layer_ids != bank.layer_ids)
                throw std::invalid_argument("category bank: target stack layer range mismatch");
            tgt[j] = target_stacks[j].layers[l];
        }
        bank.layer_gamma0[l] = base_bandwidth(src, tgt, spec.epsilon);
    }
    return bank;
}

double mjkd_unclamped(const FeatureStack& t, const CategoryBank& bank, int cls, const KernelSpec& spec) {
    spec.validate();
    check_class(bank, cls);
    if (t.layer_ids != bank.layer_ids)
        throw std::invalid_argument("mjkd: target stack layer range does not match the bank");
    double self_term = class_self_term(bank.classes[cls], bank.layer_gamma0, spec);
    return mjkd_core(t, bank.classes[cls], self_term, bank.layer_gamma0, spec);
}

double mjkd(const FeatureStack& t, const CategoryBank& bank, int cls, const KernelSpec& spec) {
    return std::max(0.0, mjkd_unclamped(t, bank, cls, spec));
}

double relative_distance(const FeatureStack& t, int predicted, const CategoryBank& bank, const KernelSpec& spec) {
    spec.validate();
    if (predicted < 0 || predicted >= bank.class_count())
        throw std::invalid_argument("relative_distance: predicted class out of range");
    std::vector<double> d2(bank.class_count());
    for (int m = 0; m < bank.class_count(); ++m) {
        check_class(bank, m);
        double self_term = class_self_term(bank.classes[m], bank.layer_gamma0, spec);
        d2[m] = std::max(0.0, mjkd_core(t, bank.classes[m], self_term, bank.layer_gamma0, spec));
    }
    double own = d2[predicted];
    double r = 0.0;
    for (int m = 0; m < bank.class_count(); ++m) r += own / (d2[m] + spec.epsilon);
    return r;
}

Matrix mjkd_all(const std::vector<FeatureStack>& targets, const CategoryBank& bank, const KernelSpec& spec) {
    spec.validate();
    const int c = bank.class_count();
    for (int m = 0; m < c; ++m) check_class(bank, m);

    // Per-class self terms are shared across all targets.
    std::vector<double> self_terms(c);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < c; ++m) self_terms[m] = class_self_term(bank.classes[m], bank.layer_gamma0, spec);

    for (const auto& t : targets)
        if (t.layer_ids != bank.layer_ids)
            throw std::invalid_argument("mjkd_all: target stack layer range does not match the bank");

    Matrix d2(targets.size(), c);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(targets.size()); ++j) {
        for (int m = 0; m < c; ++m)
            d2(j, m) = std::max(0.0, mjkd_core(targets[j], bank.classes[m], self_terms[m], bank.layer_gamma0, spec));
    }
    return d2;
}

std::vector<double> relative_distances(const Matrix& d2, std::span<const int> predicted, double epsilon) {
    if (predicted.size() != d2.rows) throw std::invalid_argument("relative_distances: size mismatch");
    std::vector<double> r(d2.rows, 0.0);
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(d2.rows); ++j) {
        int m = predicted[j];
        if (m < 0 || m >= static_cast<int>(d2.cols))
            throw std::invalid_argument("relative_distances: predicted class out of range");
        double own = d2(j, m);
        double sum = 0.0;
        for (std::size_t k = 0; k < d2.cols; ++k) sum += own / (d2(j, k) + epsilon);
        r[j] = sum;
    }
    return r;
}

}  // namespace mjkd
