#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "radiobcast/selective.hpp"

namespace radiobcast::setfam {

// n rows of equal length m over {0, 1, ..., r}.
class SequenceSet {
 public:
  using Symbol = std::uint32_t;

  SequenceSet(std::size_t alphabet_max, std::vector<std::vector<Symbol>> rows)
      : r_(alphabet_max), rows_(std::move(rows)) {
    if (r_ == 0) throw std::invalid_argument("alphabet_max must be positive");
    if (rows_.empty()) throw std::invalid_argument("sequence set needs at least one row");
    for (const auto& row : rows_) {
      if (row.size() != rows_.front().size()) throw std::invalid_argument("rows must have equal length");
      for (auto x : row)
        if (x > r_) throw std::invalid_argument("symbol outside {0..r}");
    }
  }

  std::size_t count() const { return rows_.size(); }
  std::size_t alphabet_max() const { return r_; }
  std::size_t length() const { return rows_.front().size(); }
  const std::vector<Symbol>& row(std::size_t i) const { return rows_.at(i); }
  const std::vector<std::vector<Symbol>>& rows() const { return rows_; }

  friend bool operator==(const SequenceSet&, const SequenceSet&) = default;

 private:
  std::size_t r_;
  std::vector<std::vector<Symbol>> rows_;
};

// Rows are 1-based in the witness, in row order.
struct RDifferentVerdict {
  bool pass = true;
  std::size_t u = 0, v = 0;
  SequenceSet::Symbol z = 0;
  explicit operator bool() const { return pass; }
};

inline RDifferentVerdict verify_r_different(const SequenceSet& seqs) {
  const std::size_t r = seqs.alphabet_max();
  std::vector<bool> seen(r + 1);
  for (std::size_t a = 0; a < seqs.count(); ++a) {
    for (std::size_t b = a + 1; b < seqs.count(); ++b) {
      std::fill(seen.begin(), seen.end(), false);
      const auto& x = seqs.row(a);
      const auto& y = seqs.row(b);
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0 && y[i] != 0) seen[y[i]] = true;
        else if (y[i] == 0 && x[i] != 0) seen[x[i]] = true;
      }
      for (std::size_t z = 1; z <= r; ++z)
        if (!seen[z]) return {false, a + 1, b + 1, static_cast<SequenceSet::Symbol>(z)};
    }
  }
  return {};
}

// Length 2·⌈log2 n⌉·r. Each label gets the ⌈log2 n⌉-bit codeword of label-1;
// block (b, β) of r slots has every node whose bit b equals β emit z at the
// z-th slot of the block. Blocks run b-major, β = 0 before β = 1.
inline SequenceSet build_r_different(std::size_t n, std::size_t r) {
  if (n < 2) throw std::invalid_argument("n must be >= 2");
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  const std::size_t bits = ceil_log2(n);
  const std::size_t m = 2 * bits * r;
  std::vector<std::vector<SequenceSet::Symbol>> rows(n, std::vector<SequenceSet::Symbol>(m, 0));
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t b = 0; b < bits; ++b) {
      std::size_t beta = (v >> b) & 1U;
      std::size_t base = (2 * b + beta) * r;
      for (std::size_t z = 1; z <= r; ++z) rows[v][base + z - 1] = static_cast<SequenceSet::Symbol>(z);
    }
  }
  return SequenceSet(r, std::move(rows));
}

}  // namespace radiobcast::setfam
