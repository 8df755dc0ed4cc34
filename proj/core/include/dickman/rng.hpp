// SPDX-License-Identifier: MIT
//
// Counter-based random number generation.
//
// Generator identity: Philox-4x32 with 10 rounds (Salmon, Moraes, Dror,
// Shaw, "Parallel random numbers: as easy as 1, 2, 3", SC'11), keyed as
//
//   key     = (lo32(seed), hi32(seed))
//   counter = (lo32(block), hi32(block), lo32(stream), hi32(stream))
//
// Each block yields four 32-bit words, read as two little-endian 64-bit
// outputs: (y0 | y1<<32) then (y2 | y3<<32). Draw index i maps to block
// i/2, word pair i%2. Uniform doubles take the top 53 bits shifted into
// (0, 1]: u = ((x >> 11) + 1) * 2^-53, so u is never 0 and can be 1.
//
// Every (seed, stream, index) triple addresses one fixed draw, so parallel
// schedules, chunk sizes and thread counts never change the values drawn.

#pragma once

#include <cstdint>

namespace dickman {

namespace detail {

struct PhiloxBlock {
    std::uint32_t v[4];
};

inline PhiloxBlock philox4x32_10(std::uint64_t block, std::uint64_t stream,
                                 std::uint64_t seed) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    std::uint32_t c0 = static_cast<std::uint32_t>(block);
    std::uint32_t c1 = static_cast<std::uint32_t>(block >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(stream);
    std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);

    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
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
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return PhiloxBlock{{c0, c1, c2, c3}};
}

}  // namespace detail

// One addressable 64-bit draw.
inline std::uint64_t counter_u64(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index) {
    const detail::PhiloxBlock b =
        detail::philox4x32_10(index >> 1, stream, seed);
    const int half = static_cast<int>(index & 1u);
    return static_cast<std::uint64_t>(b.v[2 * half]) |
           (static_cast<std::uint64_t>(b.v[2 * half + 1]) << 32);
}

// One addressable uniform draw in (0, 1].
inline double counter_unit(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index) {
    const std::uint64_t x = counter_u64(seed, stream, index);
    return static_cast<double>((x >> 11) + 1u) * 0x1.0p-53;
}

// Stateful view of one stream. Sequential calls walk the draw index; the
// indexed accessors allow out-of-order consumption. A one-block cache makes
// both ascending and descending index walks cost one Philox call per two
// draws without changing any value.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t u64_at(std::uint64_t index) {
        const std::uint64_t block = index >> 1;
        if (!cache_valid_ || cache_block_ != block) {
            cache_ = detail::philox4x32_10(block, stream_, seed_);
            cache_block_ = block;
            cache_valid_ = true;
        }
        const int half = static_cast<int>(index & 1u);
        return static_cast<std::uint64_t>(cache_.v[2 * half]) |
               (static_cast<std::uint64_t>(cache_.v[2 * half + 1]) << 32);
    }

    double unit_at(std::uint64_t index) {
        return static_cast<double>((u64_at(index) >> 11) + 1u) * 0x1.0p-53;
    }

    std::uint64_t next_u64() { return u64_at(next_index_++); }

    // Uniform in (0, 1].
    double next_unit() { return unit_at(next_index_++); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t next_index_ = 0;
    std::uint64_t cache_block_ = 0;
    bool cache_valid_ = false;
    detail::PhiloxBlock cache_{};
};

}  // namespace dickman
