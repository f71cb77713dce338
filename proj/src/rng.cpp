#include "hdlab/rng.hpp"

#include "hdlab/special.hpp"

namespace hdlab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(Philox4x32::Counter& c, const Philox4x32::Key& k) noexcept {
  const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
  const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline double to_open_unit(std::uint32_t a, std::uint32_t b) noexcept {
  const std::uint64_t bits = (std::uint64_t{a} << 21) ^ (b >> 11);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) noexcept {
  for (int i = 0; i < 10; ++i) {
    if (i > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    round_once(ctr, key);
  }
  return ctr;
}

RngStream RngStream::child(std::uint64_t index) const noexcept {
  return RngStream(seed_, mix64(stream_id_ * 0xD1342543DE82EF95ull + mix64(index)));
}

Philox4x32::Counter RngStream::block(std::uint64_t block) const noexcept {
  return Philox4x32::apply(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double RngStream::uniform(std::uint64_t index) const noexcept {
  const auto w = block(index >> 1);
  const unsigned lane = static_cast<unsigned>(index & 1u) * 2u;
  return to_open_unit(w[lane], w[lane + 1]);
}

double RngStream::normal(std::uint64_t index) const noexcept {
  return normal_quantile(uniform(index));
}

double RngCursor::next_uniform() noexcept {
  const std::uint64_t blk = position_ >> 1;
  if (blk != cached_block_) {
    cached_ = stream_.block(blk);
    cached_block_ = blk;
  }
  const unsigned lane = static_cast<unsigned>(position_ & 1u) * 2u;
  ++position_;
  return to_open_unit(cached_[lane], cached_[lane + 1]);
}

double RngCursor::next_normal() noexcept { return normal_quantile(next_uniform()); }

void RngCursor::fill_normal(std::span<double> out) noexcept {
  for (auto& v : out) v = next_normal();
}

}  // namespace hdlab
