#pragma once

// Counter-based random streams. Every draw in an experiment comes from a
// stream keyed by (seed, purpose, round, client), so enabling one feature
// (say failure injection) never shifts the draws of another (say client
// selection). Streams are stateless apart from their own counter.

#include <cstdint>
#include <iterator>

namespace fedvsr {

enum class StreamPurpose : std::uint64_t {
    ModelInit = 1,
    Selection = 2,
    Failure = 3,
    BatchOrder = 4,
    ClientData = 5,
    EvalData = 6,
    GradCheck = 7,
    SceneBase = 8,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

class RandomStream {
  public:
    RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t round = 0,
                 std::uint64_t client = 0) {
        std::uint64_t k = detail::mix64(seed + detail::kGolden);
        k = detail::mix64(k ^ (static_cast<std::uint64_t>(purpose) * detail::kGolden));
        k = detail::mix64(k ^ ((round + 1) * detail::kGolden));
        k = detail::mix64(k ^ ((client + 1) * detail::kGolden));
        key_ = k;
    }

    std::uint64_t next_u64() { return detail::mix64(key_ + detail::kGolden * ++counter_); }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_range(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Uniform integer in [0, n), rejection sampled (no modulo bias).
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t v = next_u64();
            if (v >= threshold) return v % n;
        }
    }

    template <typename RandomIt>
    void shuffle(RandomIt first, RandomIt last) {
        auto n = static_cast<std::uint64_t>(std::distance(first, last));
        for (std::uint64_t i = n; i > 1; --i) {
            std::uint64_t j = next_below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace fedvsr
