#pragma once

#include <cstdint>

namespace forestscan {

// Counter-based random streams. Every draw site builds its stream from
// (seed, purpose tag, indices...), so results do not depend on the order
// in which other sites consume randomness. This is what makes scene
// generation and parallel frame scanning reproducible.

// splitmix64 finalizer; also used to fold key material.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// FNV-1a over the tag string, usable at compile time.
constexpr uint64_t stream_tag(const char* s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (; *s; ++s) h = (h ^ static_cast<unsigned char>(*s)) * 0x100000001b3ull;
    return h;
}

class KeyedRng {
public:
    explicit KeyedRng(uint64_t seed) : key_(mix64(seed)) {}

    KeyedRng(uint64_t seed, uint64_t tag) : key_(mix64(mix64(seed) ^ tag)) {}

    template <typename... Indices>
    KeyedRng(uint64_t seed, uint64_t tag, Indices... indices) : KeyedRng(seed, tag) {
        (absorb(static_cast<uint64_t>(indices)), ...);
    }

    uint64_t next_u64() { return mix64(key_ ^ counter_++); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double next_double(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n); n > 0.
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    // Child seed for fanning the master seed out to a module.
    uint64_t derive() { return next_u64(); }

private:
    void absorb(uint64_t v) { key_ = mix64(key_ ^ v); }

    uint64_t key_;
    uint64_t counter_ = 0;
};

// One-shot seed derivation: hash(seed, tag) without carrying a stream around.
inline uint64_t derive_seed(uint64_t seed, uint64_t tag) {
    return mix64(mix64(seed) ^ tag);
}

} // namespace forestscan
