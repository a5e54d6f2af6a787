#pragma once

#include <cstdint>

namespace hypertrust {

// SplitMix64 (Steele, Lea & Flood; public-domain reference constants).
// Every sampling decision in the project goes through this generator so
// that seeded runs reproduce bit-for-bit across machines. Streams are
// derived with derive_stream(seed, id), which re-mixes the seed with a
// fixed per-stream offset.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased integer in [0, n) via rejection sampling.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    bool next_bernoulli(double p) { return next_double() < p; }

private:
    std::uint64_t state_;
};

// Independent child stream: mixes the parent seed with the stream id.
inline Rng derive_stream(std::uint64_t seed, std::uint64_t stream_id) {
    Rng mixer(seed ^ (0xda942042e4dd58b5ULL * (stream_id + 1)));
    return Rng(mixer.next_u64());
}

} // namespace hypertrust
