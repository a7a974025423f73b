#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "kinlab/torus.hpp"

namespace kinlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A block is
/// a pure function of (key, counter), so streams keyed by (seed, stream id)
/// are reproducible independently of scheduling or worker count.
class Philox {
  public:
    using Block = std::array<uint32_t, 4>;

    static Block round10(Block ctr, uint64_t key64) {
        uint32_t k0 = uint32_t(key64);
        uint32_t k1 = uint32_t(key64 >> 32);
        for (int r = 0; r < 10; ++r) {
            ctr = one_round(ctr, k0, k1);
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return ctr;
    }

  private:
    static Block one_round(const Block& c, uint32_t k0, uint32_t k1) {
        const uint64_t p0 = uint64_t(0xD2511F53u) * c[0];
        const uint64_t p1 = uint64_t(0xCD9E8D57u) * c[2];
        return {uint32_t(p1 >> 32) ^ c[1] ^ k0, uint32_t(p1), uint32_t(p0 >> 32) ^ c[3] ^ k1, uint32_t(p0)};
    }
};

/// One independent random stream: key = global seed, counter = (stream id,
/// block index). Yields 64-bit words two per block, plus the usual variate
/// transforms.
class RngStream {
  public:
    RngStream(uint64_t seed, uint64_t stream_id) : seed_(seed), id_(stream_id) {}

    uint64_t next_u64() {
        if (phase_ == 0) {
            block_ = Philox::round10({uint32_t(id_), uint32_t(id_ >> 32), uint32_t(ctr_), uint32_t(ctr_ >> 32)},
                                     seed_);
            ++ctr_;
        }
        const int i = 2 * phase_;
        phase_ ^= 1;
        return (uint64_t(block_[i + 1]) << 32) | block_[i];
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1p-53; }

    /// Uniform on (0, 1].
    double uniform_pos() { return double((next_u64() >> 11) + 1) * 0x1p-53; }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    /// Standard normal (Box-Muller; consumes two uniforms per pair).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Index sampled with the given probability weights (must sum to 1).
    int categorical(const Vec& weights) {
        const double u = uniform();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return int(i);
        }
        return int(weights.size() - 1);
    }

  private:
    uint64_t seed_, id_;
    uint64_t ctr_ = 0;
    Philox::Block block_{};
    int phase_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace kinlab
