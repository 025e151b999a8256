#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace synthrl {

// Deterministic random stream. All draws go through explicit rejection /
// bit-mapping code so that results are identical across platforms and
// standard-library implementations (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
  // draw unbiased for any range width.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());  // full range
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return lo + static_cast<std::int64_t>(draw % span);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Derives an independent child stream from this stream's state and a tag.
  // Forking advances the parent by one draw.
  Rng fork(std::string_view tag) {
    return Rng(splitmix(engine_() ^ fnv1a(tag)));
  }

  // A stream determined only by (seed, tag): safe to create from parallel
  // workers in any order.
  static Rng keyed(std::uint64_t seed, std::string_view tag) {
    return Rng(splitmix(seed ^ fnv1a(tag)));
  }

 private:
  static std::uint64_t fnv1a(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : tag) {
      h ^= ch;
      h *= 0x100000001b3ull;
    }
    return h;
  }

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace synthrl
