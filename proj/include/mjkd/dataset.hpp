#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mjkd/common.hpp"

namespace mjkd {

enum class Domain : int { source = 0, target = 1 };

// A tabular classification dataset. Label -1 marks an unlabeled row.
struct LabeledDataset {
    Matrix features;               // n x d
    std::vector<int> labels;       // n entries in [-1, class_count)
    std::vector<Domain> domain;    // n entries
    int class_count = 0;

    std::size_t size() const { return features.rows; }
    std::size_t dim() const { return features.cols; }

    // Throws std::invalid_argument on any broken invariant.
    void validate() const;

    bool operator==(const LabeledDataset&) const = default;
};

// Parameters of the synthetic domain-shift generator: c Gaussian clusters on
// a regular c-gon, with the target copy rotated and translated in the first
// two dimensions. Extra dimensions beyond 2 are zero-mean Gaussian nuisance.
struct ShiftSpec {
    int class_count = 4;
    int source_per_class = 100;
    int target_per_class = 100;
    double center_radius = 4.0;
    double class_std = 1.0;
    double rotation_deg = 30.0;
    std::array<double, 2> translation{0.0, 0.0};
    int dim = 2;
    std::uint64_t seed = 1;

    void validate() const;
};

struct DomainPair {
    LabeledDataset source;          // labeled, domain tag source
    LabeledDataset target;          // labels all -1, domain tag target
    std::vector<int> target_truth;  // evaluation ground truth, kept out of the training view
};

// Pure function of the spec: the same spec always yields bit-identical data.
DomainPair generate_pair(const ShiftSpec& spec);

// Plain text format, one example per row: label,domain,f_0,...,f_{d-1}.
// Unlabeled rows carry label -1 and a leading "# classes=<c>" line records
// the class count so that save/load round-trips exactly.
void save_dataset(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace mjkd
