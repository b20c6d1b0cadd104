// rng.hpp
// Counter-based randomness: every space-time site gets its bit from a stateless
// hash of (seed, t, x). Regenerating any sub-environment, in any order, yields
// identical bits, which is what makes shifted views and replica sweeps cheap.

#ifndef RHOPATH_RNG_HPP
#define RHOPATH_RNG_HPP

#include <cstdint>
#include <span>

namespace rhopath {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}
inline std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}
} // namespace detail

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Stateless hash of one site. Coordinates may be negative.
inline std::uint64_t site_hash(std::uint64_t seed, std::int64_t t,
                               std::span<const std::int32_t> x) {
    std::uint64_t h = detail::mix64(seed ^ kGolden);
    h = detail::mix64(h + kGolden * static_cast<std::uint64_t>(t + 1));
    for (std::size_t i = 0; i < x.size(); ++i) {
        h = detail::mix64(h + kGolden * detail::zigzag(x[i]) + (i + 1));
    }
    return h;
}

// Streams site hashes along the last coordinate of a row: the per-prefix part
// of the key is folded once, then each x_d only costs one mix. Used by the
// layer generators, where rows are long and prefixes change rarely.
class RowHasher {
public:
    RowHasher(std::uint64_t seed, std::int64_t t, std::span<const std::int32_t> prefix) {
        std::uint64_t h = detail::mix64(seed ^ kGolden);
        h = detail::mix64(h + kGolden * static_cast<std::uint64_t>(t + 1));
        for (std::size_t i = 0; i < prefix.size(); ++i) {
            h = detail::mix64(h + kGolden * detail::zigzag(prefix[i]) + (i + 1));
        }
        base_ = h;
        last_index_ = prefix.size() + 1;
    }
    std::uint64_t at(std::int64_t xd) const {
        return detail::mix64(base_ + kGolden * detail::zigzag(xd) + last_index_);
    }

private:
    std::uint64_t base_;
    std::uint64_t last_index_;
};

// Bernoulli(p) decision from a hash, bias below 2^-53.
inline bool hash_open(std::uint64_t h, double p) {
    return static_cast<double>(h >> 11) * 0x1.0p-53 < p;
}

// Derives independent sub-seeds (replica streams, walk streams).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(seed + kGolden * (stream + 1));
}

// xoshiro256++, the sequential generator for random-walk sampling.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += kGolden;
            w = detail::mix64(z);
        }
    }
    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }
    // Uniform integer in [0, m) by rejection; m must be < 2^32.
    std::uint32_t below(std::uint32_t m) {
        const std::uint64_t threshold = (~std::uint64_t{0}) - (~std::uint64_t{0}) % m;
        for (;;) {
            std::uint64_t r = next();
            if (r < threshold) return static_cast<std::uint32_t>(r % m);
        }
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::uint64_t s_[4];
};

} // namespace rhopath

#endif
