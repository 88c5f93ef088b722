#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace snse {

/// Philox4x32-10 counter-based generator. A stream is keyed by
/// (master_seed, trajectory_id); the counter encodes (step_index, draw_index)
/// so any block of randomness can be regenerated out of order. Ensembles are
/// therefore reproducible regardless of scheduling.
class Philox {
public:
    Philox(std::uint64_t master_seed, std::uint64_t trajectory_id)
        : key0_(static_cast<std::uint32_t>(master_seed)),
          key1_(static_cast<std::uint32_t>(master_seed >> 32)),
          key2_(static_cast<std::uint32_t>(trajectory_id)),
          key3_(static_cast<std::uint32_t>(trajectory_id >> 32)) {}

    struct Block {
        std::uint32_t x[4];
    };

    /// One 128-bit block for counter (step_index, draw_index).
    Block block(std::uint64_t step_index, std::uint64_t draw_index) const {
        std::uint32_t c0 = static_cast<std::uint32_t>(step_index);
        std::uint32_t c1 = static_cast<std::uint32_t>(step_index >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(draw_index);
        std::uint32_t c3 = static_cast<std::uint32_t>(draw_index >> 32);
        // fold the 128-bit key down to the 64-bit Philox key by mixing
        std::uint32_t k0 = key0_ ^ key2_;
        std::uint32_t k1 = key1_ ^ key3_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9U;
            k1 += 0xBB67AE85U;
        }
        return Block{{c0, c1, c2, c3}};
    }

private:
    std::uint32_t key0_, key1_, key2_, key3_;
};

/// Stream of standard normals addressed by (step_index, draw_index).
/// Each Philox block yields four uniforms, turned into four N(0,1) values
/// via Box-Muller; draw n picks element n%4 of block n/4.
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t trajectory_id)
        : gen_(master_seed, trajectory_id) {}

    /// n-th standard normal of step step_index.
    double normal(std::uint64_t step_index, std::uint64_t n) const {
        const Philox::Block b = gen_.block(step_index, n / 4);
        const int slot = static_cast<int>(n % 4);
        // uniforms strictly inside (0,1)
        const double inv = 1.0 / 4294967296.0;
        const double u1 = (b.x[slot < 2 ? 0 : 2] + 0.5) * inv;
        const double u2 = (b.x[slot < 2 ? 1 : 3] + 0.5) * inv;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        return (slot % 2 == 0) ? r * std::cos(th) : r * std::sin(th);
    }

private:
    Philox gen_;
};

}  // namespace snse
