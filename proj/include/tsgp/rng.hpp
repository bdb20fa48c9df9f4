#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace tsgp {

/// Deterministic generator used everywhere randomness is needed.
///
/// Wraps std::mt19937_64, whose output sequence is fixed by the standard.
/// The standard distributions are implementation-defined, so the integer and
/// real draws are done here instead; results are identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t uniform_index(std::size_t n);

    /// Uniform integer in [lo, hi], inclusive.
    long long uniform_int(long long lo, long long hi);

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01();

    bool bernoulli(double p) { return uniform01() < p; }

    template <typename T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent stream seed from a parent seed and a stream id.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// FNV-1a, used as a stable content hash (e.g. of a serialized tree).
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

} // namespace tsgp
