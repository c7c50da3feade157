#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace canon {

/// SplitMix64 generator with explicit stream splitting.
///
/// Every random decision in the toolkit (fold shuffles, bootstrap samples,
/// feature subsets, SGD visiting order) draws from one of these, derived from
/// a single user seed. Draws are implemented here rather than through
/// <random> distributions so sequences are identical across standard
/// libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept {
    // rejection on the top of the range keeps the draw unbiased
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % bound;
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Independent child stream keyed by a tag; does not advance this stream.
  SplitMix64 split(std::uint64_t tag) const noexcept {
    SplitMix64 mixer(state_ ^ (tag * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
    return SplitMix64(mixer.next());
  }

  SplitMix64 split(std::string_view name) const noexcept { return split(hash_tag(name)); }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  static std::uint64_t hash_tag(std::string_view name) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : name) {
      h ^= c;
      h *= 0x100000001B3ULL;
    }
    return h;
  }

  std::uint64_t state_;
};

}  // namespace canon
