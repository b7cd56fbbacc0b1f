#ifndef VERTRACE_MULTI_INDEX_HPP
#define VERTRACE_MULTI_INDEX_HPP

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertrace {

// Base dimension is capped so a multi-index fits in a bitmask and the number
// of basis forms 2^beta stays desk-sized.
inline constexpr int kMaxBaseDim = 8;

/// A strictly increasing sequence of base-coordinate labels from {1..beta},
/// stored as a bitmask (bit i-1 <=> label i present). Canonical by
/// construction: wedge signs are resolved when masks are merged.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::uint32_t mask) : mask_(mask) {}

  static MultiIndex from_labels(std::initializer_list<int> labels) {
    std::uint32_t m = 0;
    int prev = 0;
    for (int l : labels) {
      if (l <= prev || l > kMaxBaseDim) throw std::invalid_argument("MultiIndex: labels must be strictly increasing in 1..8");
      m |= (1u << (l - 1));
      prev = l;
    }
    return MultiIndex(m);
  }

  std::uint32_t mask() const { return mask_; }
  int degree() const { return std::popcount(mask_); }
  bool empty() const { return mask_ == 0; }

  std::vector<int> labels() const {
    std::vector<int> l;
    for (int i = 0; i < kMaxBaseDim; ++i)
      if (mask_ & (1u << i)) l.push_back(i + 1);
    return l;
  }

  std::string str() const {
    if (mask_ == 0) return "1";
    std::string s;
    for (int l : labels()) s += "db" + std::to_string(l);
    return s;
  }

  friend bool operator<(MultiIndex a, MultiIndex b) { return a.mask_ < b.mask_; }
  friend bool operator==(MultiIndex a, MultiIndex b) { return a.mask_ == b.mask_; }

 private:
  std::uint32_t mask_ = 0;
};

/// Koszul sign of db_I ^ db_J written in sorted order: (-1)^{#crossings},
/// 0 when the indices overlap (db^2 = 0).
inline int koszul_sign(std::uint32_t I, std::uint32_t J) {
  if (I & J) return 0;
  int crossings = 0;
  std::uint32_t j = J;
  while (j) {
    int b = std::countr_zero(j);
    crossings += std::popcount(I >> (b + 1));
    j &= j - 1;
  }
  return (crossings % 2 == 0) ? 1 : -1;
}

}  // namespace vertrace

#endif
