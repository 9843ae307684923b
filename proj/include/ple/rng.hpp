#pragma once

#include <cstdint>

namespace ple {

/// Minimal PCG32 engine (O'Neill). State advances are integer-exact, so a
/// given (seed, stream) pair replays the same raw bit sequence everywhere.
class Pcg32 {
public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform draw on the open interval (0, 1): a 53-bit lattice offset by
    /// half a step, so 0 and 1 are never produced and inverse-CDF transforms
    /// stay finite.
    double next_unit() {
        std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 1;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Splittable stream handle. Substreams are derived by hashing, never by
/// sharing engine state, so each (trial, generation) pair can own an
/// independent reproducible sequence.
struct SeededRng {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    SeededRng substream(std::uint64_t i) const {
        return SeededRng{seed, detail::splitmix64(stream ^ detail::splitmix64(i + 0x51ed2701ULL))};
    }

    Pcg32 engine() const { return Pcg32(seed, detail::splitmix64(stream)); }
};

}  // namespace ple
