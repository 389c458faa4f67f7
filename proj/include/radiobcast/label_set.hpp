#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiobcast {

// Node labels are 1-based, matching the ground set [n] = {1, ..., n}.
using Label = std::uint32_t;
using Slot = std::uint64_t;

// Fixed-universe bitset over [n]. Intersection-size queries dominate the cost
// of every family verifier, so they work word-at-a-time.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t ground) : ground_(ground), words_((ground + 63) / 64, 0) {}

  LabelSet(std::size_t ground, std::initializer_list<Label> labels) : LabelSet(ground) {
    for (Label v : labels) insert(v);
  }

  static LabelSet full(std::size_t ground) {
    LabelSet s(ground);
    for (std::size_t v = 1; v <= ground; ++v) s.insert(static_cast<Label>(v));
    return s;
  }

  std::size_t ground_size() const { return ground_; }

  void insert(Label v) {
    check(v);
    words_[(v - 1) / 64] |= bit(v);
  }

  void erase(Label v) {
    check(v);
    words_[(v - 1) / 64] &= ~bit(v);
  }

  bool contains(Label v) const {
    if (v == 0 || v > ground_) return false;
    return (words_[(v - 1) / 64] & bit(v)) != 0;
  }

  std::size_t size() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  // Ascending label order.
  std::vector<Label> labels() const {
    std::vector<Label> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto w = words_[i];
      while (w) {
        int b = std::countr_zero(w);
        out.push_back(static_cast<Label>(i * 64 + static_cast<std::size_t>(b) + 1));
        w &= w - 1;
      }
    }
    return out;
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  static std::uint64_t bit(Label v) { return std::uint64_t{1} << ((v - 1) % 64); }

  void check(Label v) const {
    if (v == 0 || v > ground_)
      throw std::out_of_range("label " + std::to_string(v) + " outside [1," + std::to_string(ground_) + "]");
  }

  std::size_t ground_ = 0;
  std::vector<std::uint64_t> words_;
};

// |a ∩ b|, stopping once the count exceeds `cap`.
inline std::size_t intersection_size(const LabelSet& a, const LabelSet& b,
                                     std::size_t cap = static_cast<std::size_t>(-1)) {
  const auto& wa = a.words();
  const auto& wb = b.words();
  std::size_t n = wa.size() < wb.size() ? wa.size() : wb.size();
  std::size_t c = 0;
  for (std::size_t i = 0; i < n && c <= cap; ++i) c += static_cast<std::size_t>(std::popcount(wa[i] & wb[i]));
  return c;
}

inline bool selects(const LabelSet& family_set, const LabelSet& z) { return intersection_size(family_set, z, 1) == 1; }

// Growable bit vector indexed from 0, used for per-column membership maps
// (which family sets contain a label, which window slots carry a label).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::vector<std::uint64_t>& words() { return words_; }
  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Running "exactly one / at least two" counters over the columns of a 0/1
// matrix. Adding a column updates both masks in O(words).
struct OnesTwos {
  std::vector<std::uint64_t> ones;
  std::vector<std::uint64_t> twos;

  explicit OnesTwos(std::size_t nwords = 0) : ones(nwords, 0), twos(nwords, 0) {}

  OnesTwos with(const BitVector& column) const {
    OnesTwos next(ones.size());
    const auto& c = column.words();
    for (std::size_t i = 0; i < ones.size(); ++i) {
      next.twos[i] = twos[i] | (ones[i] & c[i]);
      next.ones[i] = (ones[i] ^ c[i]) & ~next.twos[i];
    }
    return next;
  }

  bool any_one() const {
    for (auto w : ones)
      if (w) return true;
    return false;
  }

  bool any_one_in(const BitVector& column) const {
    const auto& c = column.words();
    for (std::size_t i = 0; i < ones.size(); ++i)
      if (ones[i] & c[i]) return true;
    return false;
  }

  // Index of the lowest position holding exactly one, or `limit` if none below it.
  std::size_t first_one(std::size_t limit) const {
    for (std::size_t i = 0; i < ones.size(); ++i) {
      if (ones[i]) {
        std::size_t pos = i * 64 + static_cast<std::size_t>(std::countr_zero(ones[i]));
        return pos < limit ? pos : limit;
      }
    }
    return limit;
  }
};

}  // namespace radiobcast
