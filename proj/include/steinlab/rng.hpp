#pragma once

#include <array>
#include <cstdint>

namespace steinlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Philox4x32-10 counter-based generator. A (key, stream) pair selects a
// stream; the 128-bit block counter walks through it. Distinct streams have
// disjoint counter spaces, so parallel chains never overlap.
class Philox4x32 {
public:
    Philox4x32() : Philox4x32(0, 0) {}

    explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0) {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        counter_[0] = 0;
        counter_[1] = 0;
        counter_[2] = static_cast<std::uint32_t>(stream);
        counter_[3] = static_cast<std::uint32_t>(stream >> 32);
    }

    // Per-chain stream id mixes the seed and chain index so chain streams
    // are reproducible functions of (seed, chain).
    static Philox4x32 for_chain(std::uint64_t seed, std::uint64_t chain_index) {
        return Philox4x32(seed, splitmix64(seed ^ splitmix64(chain_index)));
    }

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            const std::array<std::uint32_t, 4> next = {
                static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                static_cast<std::uint32_t>(p0),
            };
            ctr = next;
            key[0] += 0x9E3779B9U;
            key[1] += 0xBB67AE85U;
        }
        return ctr;
    }

    std::uint64_t next_u64() {
        if (buf_pos_ >= 2) {
            const auto out = block(counter_, key_);
            buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
            buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
            buf_pos_ = 0;
            if (++counter_[0] == 0) ++counter_[1];  // 64-bit block counter
        }
        return buf_[buf_pos_++];
    }

    // 53-bit uniform in [0,1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, n); multiply-shift (bias < 2^-64, irrelevant here)
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::array<std::uint32_t, 4> counter_{};
    std::array<std::uint32_t, 2> key_{};
    std::array<std::uint64_t, 2> buf_{};
    int buf_pos_ = 2;
};

inline constexpr const char* kRngAlgorithm = "philox4x32-10";

}  // namespace steinlab
