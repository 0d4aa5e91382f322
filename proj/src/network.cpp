#include "mjkd/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mjkd {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::identity: return z;
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
    }
    return z;
}

double activate_grad(Activation a, double pre, double post) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::relu: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: return 1.0 - post * post;
    }
    return 1.0;
}

void check_width(std::size_t got, std::size_t want, const char* where) {
    if (got != want)
        throw std::invalid_argument(std::string(where) + ": input width " + std::to_string(got) +
                                    " does not match layer width " + std::to_string(want));
}

struct LayerCache {
    std::vector<double> pre;
    std::vector<double> post;
};

void forward_layer(const DenseLayer& layer, std::span<const double> x, LayerCache& cache) {
    check_width(x.size(), layer.in_dim(), "dense forward");
    const std::size_t out = layer.out_dim(), in = layer.in_dim();
    cache.pre.assign(out, 0.0);
    cache.post.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
        double z = layer.bias[o];
        const double* w = layer.weight.data.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) z += w[i] * x[i];
        cache.pre[o] = z;
        cache.post[o] = activate(layer.act, z);
    }
}

// Accumulates weight/bias grads and returns the gradient w.r.t. the input.
void backward_layer(const DenseLayer& layer, std::span<const double> x, const LayerCache& cache,
                    std::span<const double> upstream, LayerGrads& grads, std::vector<double>& dx) {
    const std::size_t out = layer.out_dim(), in = layer.in_dim();
    dx.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
        double dz = upstream[o] * activate_grad(layer.act, cache.pre[o], cache.post[o]);
        if (dz == 0.0) continue;
        grads.bias[o] += dz;
        double* gw = grads.weight.data.data() + o * in;
        const double* w = layer.weight.data.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
            gw[i] += dz * x[i];
            dx[i] += dz * w[i];
        }
    }
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

DenseLayer make_layer(std::size_t out, std::size_t in, Activation act, Rng& rng) {
    DenseLayer l;
    l.weight = Matrix(out, in);
    l.bias.assign(out, 0.0);
    l.act = act;
    double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : l.weight.data) w = (2.0 * rng.uniform() - 1.0) * bound;
    return l;
}

}  // namespace

std::vector<int> AdaptationModel::layer_widths() const {
    std::vector<int> w;
    w.push_back(static_cast<int>(input_dim()));
    for (const auto& l : extractor) w.push_back(static_cast<int>(l.out_dim()));
    w.push_back(static_cast<int>(class_count()));
    return w;
}

AdaptationModel init_model(const ModelArch& arch, Rng& rng) {
    if (arch.input_dim < 1 || arch.bottleneck < 1 || arch.class_count < 1)
        throw std::invalid_argument("model arch: widths must be positive");
    AdaptationModel m;
    std::size_t in = arch.input_dim;
    for (int h : arch.hidden) {
        m.extractor.push_back(make_layer(h, in, Activation::relu, rng));
        in = h;
    }
    m.extractor.push_back(make_layer(arch.bottleneck, in, Activation::relu, rng));
    m.classifier = make_layer(arch.class_count, arch.bottleneck, Activation::identity, rng);
    if (arch.stack_first_layer < 0 || arch.stack_first_layer >= static_cast<int>(m.extractor.size()))
        throw std::invalid_argument("model arch: stack_first_layer out of range");
    m.stack_first_layer = arch.stack_first_layer;
    return m;
}

Discriminator init_discriminator(const DiscArch& arch, int bottleneck_dim, int class_count, Rng& rng) {
    if (arch.hidden < 1) throw std::invalid_argument("discriminator arch: hidden width must be positive");
    if (arch.dropout < 0.0 || arch.dropout >= 1.0)
        throw std::invalid_argument("discriminator arch: dropout must be in [0,1)");
    int in = arch.input == DiscInput::outer_product ? bottleneck_dim * class_count : bottleneck_dim;
    Discriminator d;
    d.l1 = make_layer(arch.hidden, in, Activation::relu, rng);
    d.l2 = make_layer(arch.hidden, arch.hidden, Activation::relu, rng);
    d.l3 = make_layer(1, arch.hidden, Activation::identity, rng);
    d.dropout_rate = arch.dropout;
    d.input_mode = arch.input;
    return d;
}

std::vector<double> softmax(std::vector<double> logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

FeatureStack forward_features(const AdaptationModel& model, std::span<const double> x) {
    check_width(x.size(), model.input_dim(), "forward_features");
    FeatureStack stack;
    LayerCache cache;
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < model.extractor.size(); ++l) {
        forward_layer(model.extractor[l], cur, cache);
        cur = cache.post;
        if (static_cast<int>(l) >= model.stack_first_layer) {
            stack.layer_ids.push_back(static_cast<int>(l));
            stack.layers.push_back(cur);
        }
    }
    return stack;
}

std::vector<double> classify(const AdaptationModel& model, std::span<const double> x) {
    FeatureStack stack = forward_features(model, x);
    LayerCache cache;
    forward_layer(model.classifier, stack.layers.back(), cache);
    return softmax(std::move(cache.post));
}

std::vector<FeatureStack> extract_stacks(const AdaptationModel& model, const Matrix& features) {
    std::vector<FeatureStack> stacks(features.rows);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(features.rows); ++i) {
        stacks[i] = forward_features(model, features.row(i));
    }
    return stacks;
}

std::vector<double> outer_product(std::span<const double> f, std::span<const double> p) {
    std::vector<double> out(f.size() * p.size());
    std::size_t k = 0;
    for (double fi : f)
        for (double pj : p) out[k++] = fi * pj;
    return out;
}

namespace {

struct DiscCache {
    LayerCache c1, c2, c3;
    std::vector<double> drop1, drop2;  // per-unit scale, 0 or 1/keep
    std::vector<double> h1, h2;        // post-dropout activations
    double logit = 0.0;
};

void apply_dropout(const std::vector<double>& in, std::vector<double>& mask, std::vector<double>& out,
                   double rate, Rng* rng) {
    mask.assign(in.size(), 1.0);
    out = in;
    if (rng == nullptr || rate <= 0.0) return;
    double keep = 1.0 - rate;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (rng->uniform() < keep) {
            mask[i] = 1.0 / keep;
        } else {
            mask[i] = 0.0;
        }
        out[i] = in[i] * mask[i];
    }
}

double disc_forward(const Discriminator& disc, std::span<const double> v, Rng* dropout_rng, DiscCache& cache) {
    check_width(v.size(), disc.input_dim(), "discriminate");
    forward_layer(disc.l1, v, cache.c1);
    apply_dropout(cache.c1.post, cache.drop1, cache.h1, disc.dropout_rate, dropout_rng);
    forward_layer(disc.l2, cache.h1, cache.c2);
    apply_dropout(cache.c2.post, cache.drop2, cache.h2, disc.dropout_rate, dropout_rng);
    forward_layer(disc.l3, cache.h2, cache.c3);
    cache.logit = cache.c3.post[0];
    return sigmoid(cache.logit);
}

// Backward from d(loss)/d(logit); accumulates disc grads, returns gradient at the input.
void disc_backward(const Discriminator& disc, std::span<const double> v, const DiscCache& cache,
                   double dlogit, DiscGrads& grads, std::vector<double>& dv) {
    std::vector<double> up3{dlogit};
    std::vector<double> dh2, dh1;
    backward_layer(disc.l3, cache.h2, cache.c3, up3, grads.l3, dh2);
    for (std::size_t i = 0; i < dh2.size(); ++i) dh2[i] *= cache.drop2[i];
    backward_layer(disc.l2, cache.h1, cache.c2, dh2, grads.l2, dh1);
    for (std::size_t i = 0; i < dh1.size(); ++i) dh1[i] *= cache.drop1[i];
    backward_layer(disc.l1, v, cache.c1, dh1, grads.l1, dv);
}

}  // namespace

double discriminate(const Discriminator& disc, std::span<const double> v, bool train_mode, Rng* rng) {
    if (train_mode && rng == nullptr)
        throw std::invalid_argument("discriminate: train mode requires a generator for dropout");
    DiscCache cache;
    return disc_forward(disc, v, train_mode ? rng : nullptr, cache);
}

std::vector<double> grl_backward(std::span<const double> upstream, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("grl_backward: lambda must be nonnegative");
    std::vector<double> out(upstream.size());
    for (std::size_t i = 0; i < upstream.size(); ++i) out[i] = -lambda * upstream[i];
    return out;
}

ModelGrads zero_grads(const AdaptationModel& model) {
    ModelGrads g;
    for (const auto& l : model.extractor)
        g.extractor.push_back({Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)});
    g.classifier = {Matrix(model.classifier.out_dim(), model.classifier.in_dim()),
                    std::vector<double>(model.classifier.out_dim(), 0.0)};
    return g;
}

DiscGrads zero_grads(const Discriminator& disc) {
    auto zl = [](const DenseLayer& l) {
        return LayerGrads{Matrix(l.out_dim(), l.in_dim()), std::vector<double>(l.out_dim(), 0.0)};
    };
    return {zl(disc.l1), zl(disc.l2), zl(disc.l3)};
}

namespace {

// Full forward cache of the generator for one example.
struct GenCache {
    std::vector<LayerCache> ext;
    LayerCache cls;
    std::vector<double> probs;
};

void gen_forward(const AdaptationModel& model, std::span<const double> x, GenCache& cache) {
    cache.ext.resize(model.extractor.size());
    std::span<const double> cur = x;
    for (std::size_t l = 0; l < model.extractor.size(); ++l) {
        forward_layer(model.extractor[l], cur, cache.ext[l]);
        cur = cache.ext[l].post;
    }
    forward_layer(model.classifier, cur, cache.cls);
    cache.probs = softmax(cache.cls.post);
}

// Cross-entropy of the true class from raw logits (log-sum-exp form).
double logit_cross_entropy(const std::vector<double>& logits, int label) {
    double mx = *std::max_element(logits.begin(), logits.end());
    double lse = 0.0;
    for (double z : logits) lse += std::exp(z - mx);
    return std::log(lse) - (logits[label] - mx);
}

// dL/dlogits from dL/dprobs for p = softmax(logits).
void softmax_jacobian(const std::vector<double>& p, const std::vector<double>& dp, std::vector<double>& dlogits) {
    double dot = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) dot += dp[j] * p[j];
    dlogits.resize(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = p[k] * (dp[k] - dot);
}

// Propagates the bottleneck gradient down the extractor.
void extractor_backward(const AdaptationModel& model, std::span<const double> x, const GenCache& cache,
                        std::vector<double> da, ModelGrads& grads) {
    for (std::size_t l = model.extractor.size(); l-- > 0;) {
        std::span<const double> in = l == 0 ? x : std::span<const double>(cache.ext[l - 1].post);
        std::vector<double> dx;
        backward_layer(model.extractor[l], in, cache.ext[l], da, grads.extractor[l], dx);
        da = std::move(dx);
    }
}

}  // namespace

Gradients backprop(const AdaptationModel& model, const Discriminator& disc, const TrainBatch& batch,
                   const LossSpec& spec, Rng* dropout_rng) {
    const std::size_t n_l = batch.labeled_x.rows;
    const std::size_t n_u = batch.unlabeled_x.rows;
    if (n_l == 0 && n_u == 0) throw std::invalid_argument("backprop: empty batch");
    if (n_l != batch.labels.size()) throw std::invalid_argument("backprop: labels size mismatch");

    const bool use_domain = spec.domain_weight != 0.0;
    const std::size_t c = model.class_count();

    Gradients g;
    g.model = zero_grads(model);
    g.disc = zero_grads(disc);

    GenCache cache;
    DiscCache dcache;
    std::vector<double> dlogits(c, 0.0), dp, dlogits_dom, dv, dv_gen, da;

    auto domain_input = [&](const GenCache& gc) {
        const std::vector<double>& f = gc.ext.back().post;
        return disc.input_mode == DiscInput::outer_product ? outer_product(f, gc.probs) : f;
    };

    // Splits the gradient at the discriminator input into bottleneck and
    // probability parts and folds both into the generator.
    auto generator_domain_grads = [&](const GenCache& gc, const std::vector<double>& dv_in,
                                      std::vector<double>& df, std::vector<double>& dlog_dom) {
        const std::vector<double>& f = gc.ext.back().post;
        df.assign(f.size(), 0.0);
        dlog_dom.assign(c, 0.0);
        if (disc.input_mode == DiscInput::outer_product) {
            dp.assign(c, 0.0);
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double* dvrow = dv_in.data() + i * c;
                for (std::size_t j = 0; j < c; ++j) {
                    df[i] += dvrow[j] * gc.probs[j];
                    dp[j] += dvrow[j] * f[i];
                }
            }
            softmax_jacobian(gc.probs, dp, dlog_dom);
        } else {
            df.assign(dv_in.begin(), dv_in.end());
        }
    };

    double cls_loss_sum = 0.0;
    double dom_src_sum = 0.0, dom_tgt_sum = 0.0;

    for (std::size_t r = 0; r < n_l; ++r) {
        int label = batch.labels[r];
        if (label < 0 || label >= static_cast<int>(c))
            throw std::invalid_argument("backprop: label out of range in labeled batch");
        auto x = batch.labeled_x.row(r);
        gen_forward(model, x, cache);
        cls_loss_sum += logit_cross_entropy(cache.cls.post, label);

        std::fill(dlogits.begin(), dlogits.end(), 0.0);
        if (spec.cls_weight != 0.0) {
            double scale = spec.cls_weight / static_cast<double>(n_l);
            for (std::size_t k = 0; k < c; ++k)
                dlogits[k] = scale * (cache.probs[k] - (static_cast<int>(k) == label ? 1.0 : 0.0));
        }

        std::vector<double> df;
        bool have_domain = false;
        if (use_domain) {
            std::vector<double> v = domain_input(cache);
            double d = disc_forward(disc, v, dropout_rng, dcache);
            dom_src_sum += softplus(-dcache.logit);  // -log D
            double dlogit = spec.domain_weight * (d - 1.0) / static_cast<double>(n_l);
            disc_backward(disc, v, dcache, dlogit, g.disc, dv);
            dv_gen = spec.reverse_generator ? grl_backward(dv, spec.grl_lambda) : dv;
            generator_domain_grads(cache, dv_gen, df, dlogits_dom);
            for (std::size_t k = 0; k < c; ++k) dlogits[k] += dlogits_dom[k];
            have_domain = true;
        }

        // Classifier grads, then the bottleneck gradient from both paths.
        const std::vector<double>& f = cache.ext.back().post;
        da.assign(f.size(), 0.0);
        for (std::size_t k = 0; k < c; ++k) {
            double dz = dlogits[k];
            if (dz != 0.0) {
                g.model.classifier.bias[k] += dz;
                double* gw = g.model.classifier.weight.data.data() + k * f.size();
                const double* w = model.classifier.weight.data.data() + k * f.size();
                for (std::size_t i = 0; i < f.size(); ++i) {
                    gw[i] += dz * f[i];
                    da[i] += dz * w[i];
                }
            }
        }
        if (have_domain)
            for (std::size_t i = 0; i < f.size(); ++i) da[i] += df[i];
        extractor_backward(model, x, cache, da, g.model);
    }

    if (use_domain) {
        for (std::size_t r = 0; r < n_u; ++r) {
            auto x = batch.unlabeled_x.row(r);
            gen_forward(model, x, cache);
            std::vector<double> v = domain_input(cache);
            double d = disc_forward(disc, v, dropout_rng, dcache);
            dom_tgt_sum += softplus(dcache.logit);  // -log(1 - D)
            double dlogit = spec.domain_weight * d / static_cast<double>(n_u);
            disc_backward(disc, v, dcache, dlogit, g.disc, dv);
            dv_gen = spec.reverse_generator ? grl_backward(dv, spec.grl_lambda) : dv;

            std::vector<double> df;
            generator_domain_grads(cache, dv_gen, df, dlogits_dom);

            const std::vector<double>& f = cache.ext.back().post;
            da.assign(f.size(), 0.0);
            for (std::size_t k = 0; k < c; ++k) {
                double dz = dlogits_dom[k];
                if (dz != 0.0) {
                    g.model.classifier.bias[k] += dz;
                    double* gw = g.model.classifier.weight.data.data() + k * f.size();
                    const double* w = model.classifier.weight.data.data() + k * f.size();
                    for (std::size_t i = 0; i < f.size(); ++i) {
                        gw[i] += dz * f[i];
                        da[i] += dz * w[i];
                    }
                }
            }
            for (std::size_t i = 0; i < f.size(); ++i) da[i] += df[i];
            extractor_backward(model, x, cache, da, g.model);
        }
    }

    g.cls_loss = n_l > 0 ? cls_loss_sum / static_cast<double>(n_l) : 0.0;
    g.domain_loss = 0.0;
    if (use_domain) {
        if (n_l > 0) g.domain_loss += dom_src_sum / static_cast<double>(n_l);
        if (n_u > 0) g.domain_loss += dom_tgt_sum / static_cast<double>(n_u);
    }
    if (!std::isfinite(g.cls_loss)) throw std::runtime_error("classification loss is not finite");
    if (!std::isfinite(g.domain_loss)) throw std::runtime_error("domain loss is not finite");
    return g;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'M', 'J', 'K', 'D', 'P', 'R', 'M', '\0'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void write_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& out, const double* v, std::size_t n) {
    out.write(reinterpret_cast<const char*>(v), static_cast<std::streamsize>(n * 8));
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
void read_f64(std::istream& in, double* v, std::size_t n) {
    in.read(reinterpret_cast<char*>(v), static_cast<std::streamsize>(n * 8));
}

void write_layer_params(std::ostream& out, const DenseLayer& l) {
    write_f64(out, l.weight.data.data(), l.weight.data.size());
    write_f64(out, l.bias.data(), l.bias.size());
}

void read_layer_params(std::istream& in, DenseLayer& l) {
    read_f64(in, l.weight.data.data(), l.weight.data.size());
    read_f64(in, l.bias.data(), l.bias.size());
}

std::ifstream open_checkpoint(const std::filesystem::path& path, std::uint32_t expect_kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path.string());
    std::uint32_t version = read_u32(in);
    if (version != kVersion)
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version) + ": " + path.string());
    std::uint32_t kind = read_u32(in);
    if (kind != expect_kind)
        throw std::runtime_error("checkpoint kind mismatch: " + path.string());
    return in;
}

}  // namespace

void save_checkpoint(const AdaptationModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    out.write(kMagic, 8);
    write_u32(out, kVersion);
    write_u32(out, 0);  // kind: model
    write_u64(out, model.seed);
    write_u32(out, static_cast<std::uint32_t>(model.input_dim()));
    write_u32(out, static_cast<std::uint32_t>(model.extractor.size()));
    for (const auto& l : model.extractor) {
        write_u32(out, static_cast<std::uint32_t>(l.out_dim()));
        write_u32(out, static_cast<std::uint32_t>(l.act));
    }
    write_u32(out, static_cast<std::uint32_t>(model.class_count()));
    write_u32(out, static_cast<std::uint32_t>(model.stack_first_layer));
    for (const auto& l : model.extractor) write_layer_params(out, l);
    write_layer_params(out, model.classifier);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

AdaptationModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in = open_checkpoint(path, 0);
    AdaptationModel m;
    m.seed = read_u64(in);
    std::uint32_t in_dim = read_u32(in);
    std::uint32_t n_layers = read_u32(in);
    if (n_layers == 0 || n_layers > 64) throw std::runtime_error("corrupt checkpoint: " + path.string());
    std::size_t cur = in_dim;
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        std::uint32_t out_dim = read_u32(in);
        std::uint32_t act = read_u32(in);
        DenseLayer layer;
        layer.weight = Matrix(out_dim, cur);
        layer.bias.assign(out_dim, 0.0);
        layer.act = static_cast<Activation>(act);
        m.extractor.push_back(std::move(layer));
        cur = out_dim;
    }
    std::uint32_t classes = read_u32(in);
    m.stack_first_layer = static_cast<int>(read_u32(in));
    m.classifier.weight = Matrix(classes, cur);
    m.classifier.bias.assign(classes, 0.0);
    m.classifier.act = Activation::identity;
    for (auto& l : m.extractor) read_layer_params(in, l);
    read_layer_params(in, m.classifier);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
    return m;
}

void save_discriminator(const Discriminator& disc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    out.write(kMagic, 8);
    write_u32(out, kVersion);
    write_u32(out, 1);  // kind: discriminator
    write_u64(out, disc.seed);
    write_u32(out, static_cast<std::uint32_t>(disc.l1.in_dim()));
    write_u32(out, static_cast<std::uint32_t>(disc.l1.out_dim()));
    write_u32(out, static_cast<std::uint32_t>(disc.input_mode));
    write_f64(out, &disc.dropout_rate, 1);
    write_layer_params(out, disc.l1);
    write_layer_params(out, disc.l2);
    write_layer_params(out, disc.l3);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

Discriminator load_discriminator(const std::filesystem::path& path) {
    std::ifstream in = open_checkpoint(path, 1);
    Discriminator d;
    d.seed = read_u64(in);
    std::uint32_t in_dim = read_u32(in);
    std::uint32_t hidden = read_u32(in);
    d.input_mode = static_cast<DiscInput>(read_u32(in));
    read_f64(in, &d.dropout_rate, 1);
    d.l1.weight = Matrix(hidden, in_dim);
    d.l1.bias.assign(hidden, 0.0);
    d.l1.act = Activation::relu;
    d.l2.weight = Matrix(hidden, hidden);
    d.l2.bias.assign(hidden, 0.0);
    d.l2.act = Activation::relu;
    d.l3.weight = Matrix(1, hidden);
    d.l3.bias.assign(1, 0.0);
    d.l3.act = Activation::identity;
    read_layer_params(in, d.l1);
    read_layer_params(in, d.l2);
    read_layer_params(in, d.l3);
    if (!in) throw std::runtime_error("truncated checkpoint: " + path.string());
    return d;
}

}  // namespace mjkd
