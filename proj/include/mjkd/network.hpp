#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mjkd/common.hpp"

namespace mjkd {

enum class Activation : int { identity = 0, relu = 1, tanh = 2 };

struct DenseLayer {
    Matrix weight;              // out x in
    std::vector<double> bias;   // out
    Activation act = Activation::relu;

    std::size_t in_dim() const { return weight.cols; }
    std::size_t out_dim() const { return weight.rows; }

    bool operator==(const DenseLayer&) const = default;
};

struct ModelArch {
    int input_dim = 2;
    std::vector<int> hidden{64, 64};
    int bottleneck = 16;
    int class_count = 4;
    // First extractor layer included in the multi-layer feature stack.
    int stack_first_layer = 0;
};

// Feature extractor ending in the bottleneck, plus the softmax classifier head.
struct AdaptationModel {
    std::vector<DenseLayer> extractor;  // hidden layers, bottleneck last
    DenseLayer classifier;              // bottleneck -> classes, identity (softmax applied on top)
    int stack_first_layer = 0;
    std::uint64_t seed = 0;             // seed recorded at init time

    std::size_t input_dim() const { return extractor.front().in_dim(); }
    std::size_t bottleneck_dim() const { return extractor.back().out_dim(); }
    std::size_t class_count() const { return classifier.out_dim(); }
    std::vector<int> layer_widths() const;

    bool operator==(const AdaptationModel&) const = default;
};

enum class DiscInput : int { outer_product = 0, features_only = 1 };

struct DiscArch {
    int hidden = 32;
    double dropout = 0.5;
    DiscInput input = DiscInput::outer_product;
};

// Three dense layers: in -> h -> h -> 1; rectifier hiddens with dropout,
// sigmoid output.
struct Discriminator {
    DenseLayer l1, l2, l3;
    double dropout_rate = 0.5;
    DiscInput input_mode = DiscInput::outer_product;
    std::uint64_t seed = 0;

    std::size_t input_dim() const { return l1.in_dim(); }

    bool operator==(const Discriminator&) const = default;
};

// Per-layer activations of one example over the configured layer range;
// the bottleneck output is always the last entry.
struct FeatureStack {
    std::vector<int> layer_ids;
    std::vector<std::vector<double>> layers;

    bool operator==(const FeatureStack&) const = default;
};

// Glorot-uniform weights, zero biases.
AdaptationModel init_model(const ModelArch& arch, Rng& rng);
Discriminator init_discriminator(const DiscArch& arch, int bottleneck_dim, int class_count, Rng& rng);

std::vector<double> softmax(std::vector<double> logits);

FeatureStack forward_features(const AdaptationModel& model, std::span<const double> x);
std::vector<double> classify(const AdaptationModel& model, std::span<const double> x);

// Stacks for every row of a feature matrix (parallel over rows).
std::vector<FeatureStack> extract_stacks(const AdaptationModel& model, const Matrix& features);

// Flattened outer product, out[i*c + j] = f[i] * p[j].
std::vector<double> outer_product(std::span<const double> f, std::span<const double> p);

// Sigmoid output in (0,1). Dropout is applied only in train mode and draws
// from the supplied generator.
double discriminate(const Discriminator& disc, std::span<const double> v, bool train_mode, Rng* rng = nullptr);

// Identity forward, -lambda * upstream backward.
std::vector<double> grl_backward(std::span<const double> upstream, double lambda);

struct LayerGrads {
    Matrix weight;
    std::vector<double> bias;
};

struct ModelGrads {
    std::vector<LayerGrads> extractor;
    LayerGrads classifier;
};

struct DiscGrads {
    LayerGrads l1, l2, l3;
};

struct LossSpec {
    double cls_weight = 1.0;      // weight on the classification cross-entropy
    double domain_weight = 0.0;   // weight on the adversarial logistic term
    double grl_lambda = 1.0;      // reversal scale applied below the discriminator input
    // When false the domain gradient enters the generator unreversed and
    // unscaled; used by tests to compare against the reversed path.
    bool reverse_generator = true;
};

// One optimization batch. Labeled rows feed the classification term and the
// source side of the domain term; unlabeled rows feed the target side.
struct TrainBatch {
    Matrix labeled_x;
    std::vector<int> labels;
    Matrix unlabeled_x;
};

struct Gradients {
    ModelGrads model;
    DiscGrads disc;
    double cls_loss = 0.0;
    double domain_loss = 0.0;
};

ModelGrads zero_grads(const AdaptationModel& model);
DiscGrads zero_grads(const Discriminator& disc);

// Exact analytic gradients of the composite loss. Throws std::runtime_error
// naming the offending term if a loss comes out non-finite. `dropout_rng`
// null disables discriminator dropout.
Gradients backprop(const AdaptationModel& model, const Discriminator& disc, const TrainBatch& batch,
                   const LossSpec& spec, Rng* dropout_rng = nullptr);

// Versioned binary checkpoints; exact round-trip.
void save_checkpoint(const AdaptationModel& model, const std::filesystem::path& path);
AdaptationModel load_checkpoint(const std::filesystem::path& path);
void save_discriminator(const Discriminator& disc, const std::filesystem::path& path);
Discriminator load_discriminator(const std::filesystem::path& path);

}  // namespace mjkd
