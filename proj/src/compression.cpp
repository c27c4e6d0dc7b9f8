#include "dcosim/compression.hpp"

#include <cmath>

namespace dcosim {

CompressorSpec CompressorSpec::identity() { return CompressorSpec{}; }

CompressorSpec CompressorSpec::quantizer(int bits, int block_size,
                                         std::optional<double> c_param) {
    if (bits < 1) throw std::invalid_argument("quantizer: bits must be >= 1");
    if (block_size < 1) throw std::invalid_argument("quantizer: block size must be >= 1");
    if (c_param && (*c_param < 0.0 || !std::isfinite(*c_param)))
        throw std::invalid_argument("quantizer: c_param must be finite and >= 0");
    CompressorSpec s;
    s.kind = CompressorKind::quant_inf_norm;
    s.bits = bits;
    s.block_size = block_size;
    s.c_param = c_param;
    return s;
}

double analytic_noise_bound(const CompressorSpec& spec, int p) {
    if (spec.kind == CompressorKind::identity) return 0.0;
    double block = static_cast<double>(std::min(spec.block_size, p));
    return block / std::pow(4.0, spec.bits);
}

double effective_c(const CompressorSpec& spec, int p) {
    if (spec.kind == CompressorKind::identity) return 0.0;
    return spec.c_param ? *spec.c_param : analytic_noise_bound(spec, p);
}

long long bit_count(const CompressorSpec& spec, int p) {
    if (spec.kind == CompressorKind::identity) return 32ll * p;
    long long blocks = (p + spec.block_size - 1) / spec.block_size;
    return blocks * 32ll + static_cast<long long>(p) * spec.bits;
}

CompressResult compress(const CompressorSpec& spec, const Vector& x, RngStream& rng) {
    const int p = static_cast<int>(x.size());
    if (p < 1) throw std::invalid_argument("compress: empty vector");
    if (!x.allFinite()) throw std::invalid_argument("compress: non-finite entries");

    CompressResult out;
    out.msg.kind = spec.kind;
    out.msg.p = p;

    if (spec.kind == CompressorKind::identity) {
        out.msg.raw.assign(x.data(), x.data() + p);
        out.msg.total_bits = bit_count(spec, p);
        out.y = x;
        return out;
    }

    if (spec.bits < 1) throw std::invalid_argument("compress: bits must be >= 1");
    out.msg.bits = spec.bits;
    out.msg.block_size = spec.block_size;
    out.msg.signs.resize(p);
    out.msg.levels.resize(p);
    const double half_levels = std::pow(2.0, spec.bits - 1);  // 2^{b-1}

    for (int start = 0; start < p; start += spec.block_size) {
        const int len = std::min(spec.block_size, p - start);
        const double norm = x.segment(start, len).cwiseAbs().maxCoeff();
        out.msg.block_norms.push_back(norm);
        for (int i = start; i < start + len; ++i) {
            out.msg.signs[i] = x(i) < 0.0 ? -1 : 1;
            if (norm == 0.0) {
                out.msg.levels[i] = 0;
            } else {
                // |x_i| <= norm exactly, so the argument is <= 2^{b-1} + u
                // and the level never exceeds 2^{b-1}.
                double t = half_levels * std::abs(x(i)) / norm + rng.uniform();
                out.msg.levels[i] = static_cast<int32_t>(std::floor(t));
            }
        }
    }
    out.msg.total_bits = bit_count(spec, p);
    out.y = decode(out.msg);
    return out;
}

Vector decode(const CompressedMessage& msg) {
    if (msg.kind == CompressorKind::identity) {
        return Eigen::Map<const Vector>(msg.raw.data(), static_cast<long>(msg.raw.size()));
    }
    const int p = msg.p;
    const int32_t max_level = static_cast<int32_t>(std::pow(2.0, msg.bits - 1));
    const double scale_base = std::pow(2.0, -(msg.bits - 1));
    Vector y(p);
    int block = 0;
    for (int start = 0; start < p; start += msg.block_size) {
        const int len = std::min(msg.block_size, p - start);
        const double norm = msg.block_norms[block++];
        for (int i = start; i < start + len; ++i) {
            if (msg.levels[i] < 0 || msg.levels[i] > max_level)
                throw std::invalid_argument("decode: level out of range");
            y(i) = norm * scale_base * msg.signs[i] * msg.levels[i];
        }
    }
    return y;
}

NoiseEstimate estimate_c(const CompressorSpec& spec, const VectorSampler& sampler,
                         int trials, RngStream& rng, int reps) {
    if (trials < 1000) throw std::invalid_argument("estimate_c: need trials >= 1000");
    if (reps < 1) throw std::invalid_argument("estimate_c: need reps >= 1");
    NoiseEstimate est{0.0, 0.0, 0};
    for (int t = 0; t < trials; ++t) {
        Vector x = sampler(rng);
        const double nx2 = x.squaredNorm();
        if (nx2 == 0.0) {
            est.skipped_zero++;
            continue;
        }
        double err2 = 0.0;
        Vector mean_err = Vector::Zero(x.size());
        for (int r = 0; r < reps; ++r) {
            const Vector err = compress(spec, x, rng).y - x;
            err2 += err.squaredNorm();
            mean_err += err;
        }
        est.c_hat = std::max(est.c_hat, err2 / reps / nx2);
        est.max_bias = std::max(est.max_bias, (mean_err / reps).norm());
    }
    return est;
}

VectorSampler gaussian_sampler(int p) {
    return [p](RngStream& r) {
        Vector x(p);
        for (int i = 0; i < p; ++i) x(i) = r.normal();
        return x;
    };
}

}  // namespace dcosim
