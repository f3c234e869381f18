#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace vdkit {

// Deterministic across platforms and standard libraries, unlike the
// std::uniform_* distributions. Seeded sampling must reproduce bit-exactly
// wherever the toolkit runs.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased bound via rejection sampling.
    uint64_t below(uint64_t bound) {
        if (bound == 0) return 0;
        const uint64_t threshold = (~bound + 1) % bound;  // 2^64 mod bound
        while (true) {
            const uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    uint64_t state_;
};

// First `k` steps of a Fisher-Yates shuffle over [0, n); sorted ascending so
// the selection reads as a subset, not an ordering.
inline std::vector<size_t> sample_without_replacement(size_t n, size_t k, SplitMix64& rng) {
    if (k > n) k = n;
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    for (size_t i = 0; i < k; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<size_t> picks(pool.begin(), pool.begin() + static_cast<long>(k));
    std::sort(picks.begin(), picks.end());
    return picks;
}

}  // namespace vdkit
