#pragma once

#include <cstdint>
#include <limits>

namespace breathe {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

/// Counter-based generator: the stream is a pure function of its key, so
/// per-user streams can be produced in any order or in parallel.
/// Satisfies UniformRandomBitGenerator.
class StreamRng {
  public:
    using result_type = std::uint64_t;

    explicit StreamRng(std::uint64_t key) : key_(splitmix64(key)) {}
    StreamRng(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
        : StreamRng(mix_key(mix_key(mix_key(seed, a), b), c)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace breathe
