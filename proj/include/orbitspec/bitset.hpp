#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "orbitspec/common.hpp"

namespace orbitspec {

// Fixed-width bitset; all bits at positions >= size() stay zero.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::int64_t bits)
      : n_(bits), w_(static_cast<std::size_t>((bits + 63) / 64), 0) {}

  std::int64_t size() const { return n_; }
  void set(std::int64_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
  void reset(std::int64_t i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
  bool test(std::int64_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  std::int64_t count() const {
    std::int64_t c = 0;
    for (std::uint64_t x : w_) c += std::popcount(x);
    return c;
  }
  bool any() const {
    for (std::uint64_t x : w_)
      if (x) return true;
    return false;
  }

  Bitset& operator|=(const Bitset& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
    return *this;
  }
  Bitset& operator&=(const Bitset& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
    return *this;
  }
  bool operator==(const Bitset&) const = default;

  const std::vector<std::uint64_t>& words() const { return w_; }

  friend void or_rotated(Bitset& dst, const Bitset& src, std::int64_t s);

 private:
  std::int64_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// dst |= rotation of src where bit i lands at (i + s) mod size.
// Word-level: the rotation is (src << s) | (src >> (n - s)) on n bits.
inline void or_rotated(Bitset& dst, const Bitset& src, std::int64_t s) {
  const std::int64_t n = dst.n_;
  OSPEC_CHECK(n == src.n_ && n > 0, "bitset rotation size mismatch");
  s %= n;
  if (s < 0) s += n;
  const auto nw = static_cast<std::int64_t>(src.w_.size());
  const std::uint64_t top =
      (n & 63) ? ((std::uint64_t(1) << (n & 63)) - 1) : ~std::uint64_t(0);
  const std::int64_t r = n - s;
  const std::int64_t lw = s >> 6, lb = s & 63;
  const std::int64_t rw = r >> 6, rb = r & 63;
  for (std::int64_t k = 0; k < nw; ++k) {
    std::uint64_t v = 0;
    const std::int64_t a = k - lw;
    if (a >= 0) {
      v |= src.w_[a] << lb;
      if (lb && a > 0) v |= src.w_[a - 1] >> (64 - lb);
    }
    const std::int64_t b = k + rw;
    if (b < nw) {
      v |= src.w_[b] >> rb;
      if (rb && b + 1 < nw) v |= src.w_[b + 1] << (64 - rb);
    }
    if (k + 1 == nw) v &= top;
    dst.w_[k] |= v;
  }
}

}  // namespace orbitspec
