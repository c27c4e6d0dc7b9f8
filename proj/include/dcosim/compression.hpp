#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dcosim/common.hpp"
#include "dcosim/rng.hpp"

namespace dcosim {

enum class CompressorKind { identity, quant_inf_norm };

// Description of an unbiased stochastic compressor. Stateless: randomness
// comes from an externally supplied stream, so concurrent runs never share
// state.
struct CompressorSpec {
    CompressorKind kind = CompressorKind::identity;
    int bits = 2;          // b >= 1 (quantizer only)
    int block_size = 256;  // entries per block (quantizer only)
    // Noise-to-signal constant override. Unset -> analytic bound.
    std::optional<double> c_param;

    static CompressorSpec identity();
    static CompressorSpec quantizer(int bits, int block_size = 256,
                                    std::optional<double> c_param = std::nullopt);
};

// Conservative bound on E||Q(x)-x||^2 / ||x||^2: min(block_size, p) / 4^b.
// Zero for the identity.
double analytic_noise_bound(const CompressorSpec& spec, int p);

// The C fed into parameter formulas: c_param if supplied, else the bound.
double effective_c(const CompressorSpec& spec, int p);

// Exact transmitted bits for one p-vector: ceil(p/B)*32 + p*b for the
// quantizer (32-bit norm per block, b bits per entry), 32*p for the identity.
long long bit_count(const CompressorSpec& spec, int p);

// Wire form of one compressed vector. decode() reproduces the dequantized
// vector bit-exactly from (norms, signs, levels).
struct CompressedMessage {
    CompressorKind kind = CompressorKind::identity;
    int bits = 0;
    int block_size = 0;
    int p = 0;
    std::vector<double> block_norms;  // per-block infinity norm
    std::vector<int8_t> signs;        // per entry, +1 / -1
    std::vector<int32_t> levels;      // per entry, in [0, 2^{b-1}]
    std::vector<double> raw;          // identity payload
    long long total_bits = 0;
};

struct CompressResult {
    Vector y;  // == decode(msg)
    CompressedMessage msg;
};

CompressResult compress(const CompressorSpec& spec, const Vector& x, RngStream& rng);
Vector decode(const CompressedMessage& msg);

struct NoiseEstimate {
    double c_hat;         // max over samples of mean ||Q(x)-x||^2 / ||x||^2
    double max_bias;      // max over samples of ||mean Q(x) - x||
    long skipped_zero;    // zero-norm samples skipped
};

using VectorSampler = std::function<Vector(RngStream&)>;

// Empirical noise-to-signal estimate over `trials` sampled vectors with
// `reps` compressions each. Requires trials >= 1000.
NoiseEstimate estimate_c(const CompressorSpec& spec, const VectorSampler& sampler,
                         int trials, RngStream& rng, int reps = 50);

VectorSampler gaussian_sampler(int p);

}  // namespace dcosim
