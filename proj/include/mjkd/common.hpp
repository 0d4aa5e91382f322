#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mjkd {

// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    bool operator==(const Matrix&) const = default;
};

// Deterministic random source. The engine is the fully specified mt19937_64;
// the distributions are hand-rolled so that streams are identical across
// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

    // Uniform integer in [0, n), rejection sampled (no modulo bias).
    std::size_t uniform_index(std::size_t n);

    // Fisher-Yates shuffle.
    void shuffle(std::vector<int>& v);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stable seed derivation for independent per-stage streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
std::string format_u64(std::uint64_t v);

// Strict parsers; throw std::invalid_argument with `what` naming the input.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
std::uint64_t parse_u64(std::string_view s);

}  // namespace mjkd
