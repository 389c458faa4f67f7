#pragma once

// Exact minimum size of (n,k)-(strongly-)selective families for tiny n, used
// as an oracle against the constructions. The search runs over the transposed
// 0/1 matrix: a family of m sets is a choice of n columns in {0,1}^m, and
// both properties are hereditary in the chosen columns, so columns are added
// in increasing order and every new column is checked only against subsets
// of the columns already chosen.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "radiobcast/errors.hpp"
#include "radiobcast/selective.hpp"

namespace radiobcast::setfam {

inline constexpr std::size_t kBruteforceMaxN = 10;

namespace detail {

class ColumnSearch {
 public:
  ColumnSearch(std::size_t n, std::size_t k, bool strong, std::size_t m, std::uint64_t budget)
      : n_(n), k_(k), strong_(strong), m_(m), budget_(budget) {}

  bool feasible() {
    chosen_.clear();
    return extend(1);
  }

  std::uint64_t spent() const { return spent_; }

 private:
  // Every Z = Y ∪ {c} with Y ⊆ chosen, |Y| <= k-1 must satisfy the property.
  bool admissible(std::uint32_t c) {
    return check_subsets(0, 0, 0, c, 0);
  }

  bool ok(std::uint32_t ones, const std::vector<std::uint32_t>& z) const {
    if (!strong_) return ones != 0;
    for (auto col : z)
      if ((col & ones) == 0) return false;
    return true;
  }

  bool check_subsets(std::size_t from, std::uint32_t ones, std::uint32_t twos, std::uint32_t c, std::size_t depth) {
    if (++spent_ > budget_) throw BudgetExceeded("selective-family size search", spent_ - 1);
    std::uint32_t t2 = twos | (ones & c);
    std::uint32_t o2 = (ones ^ c) & ~t2;
    scratch_.push_back(c);
    bool good = ok(o2, scratch_);
    scratch_.pop_back();
    if (!good) return false;
    if (depth + 1 >= k_) return true;
    for (std::size_t i = from; i < chosen_.size(); ++i) {
      std::uint32_t col = chosen_[i];
      std::uint32_t nt = twos | (ones & col);
      std::uint32_t no = (ones ^ col) & ~nt;
      scratch_.push_back(col);
      bool r = check_subsets(i + 1, no, nt, c, depth + 1);
      scratch_.pop_back();
      if (!r) return false;
    }
    return true;
  }

  bool extend(std::uint32_t min_col) {
    if (chosen_.size() == n_) return true;
    const std::uint32_t limit = std::uint32_t{1} << m_;
    // k = 1 allows repeated columns; otherwise columns are distinct.
    for (std::uint32_t c = min_col; c < limit; ++c) {
      if (limit - c < n_ - chosen_.size() && k_ != 1) break;
      if (!admissible(c)) continue;
      chosen_.push_back(c);
      bool done = extend(k_ == 1 ? c : c + 1);
      chosen_.pop_back();
      if (done) return true;
    }
    return false;
  }

  std::size_t n_, k_;
  bool strong_;
  std::size_t m_;
  std::uint64_t budget_;
  std::uint64_t spent_ = 0;
  std::vector<std::uint32_t> chosen_;
  std::vector<std::uint32_t> scratch_;
};

}  // namespace detail

inline std::size_t min_selective_size_bruteforce(std::size_t n, std::size_t k, bool strong,
                                                 std::uint64_t budget = 2'000'000'000ULL) {
  if (n == 0 || n > kBruteforceMaxN) throw std::out_of_range("brute-force search supports 1 <= n <= 10");
  if (k == 0 || k > n) throw std::out_of_range("k must lie in [1, n]");
  // Singletons always work, so m = n terminates the deepening.
  for (std::size_t m = 1; m <= n; ++m) {
    detail::ColumnSearch s(n, k, strong, m, budget);
    if (s.feasible()) return m;
  }
  return n;
}

}  // namespace radiobcast::setfam
