#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hdlab {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters. Stateless; the caller owns the counter.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Counter-based random stream. Draw `i` of a stream is a pure function of
/// (seed, stream_id, i), so a Monte-Carlo loop can be cut into any number of
/// chunks without changing a single value.
class RngStream {
 public:
  constexpr RngStream() = default;
  constexpr RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Derived substream; distinct indices give distinct stream ids.
  RngStream child(std::uint64_t index) const noexcept;

  /// 128 random bits for counter block `block`.
  Philox4x32::Counter block(std::uint64_t block) const noexcept;

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t index) const noexcept;

  /// Standard normal by inversion of `uniform(index)`.
  double normal(std::uint64_t index) const noexcept;

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
};

/// Sequential reader over a stream. Position i yields exactly
/// `stream.uniform(i)` / `stream.normal(i)`; one Philox block serves two
/// consecutive positions.
class RngCursor {
 public:
  explicit RngCursor(RngStream stream, std::uint64_t position = 0) noexcept
      : stream_(stream), position_(position) {}

  double next_uniform() noexcept;
  double next_normal() noexcept;
  void fill_normal(std::span<double> out) noexcept;

  std::uint64_t position() const noexcept { return position_; }
  const RngStream& stream() const noexcept { return stream_; }

 private:
  RngStream stream_;
  std::uint64_t position_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  Philox4x32::Counter cached_{};
};

/// SplitMix64 finalizer; used to derive stream ids and hash names.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace hdlab
