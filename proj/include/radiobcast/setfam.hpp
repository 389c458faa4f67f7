#pragma once

// Set families over [n] and the exact/sampled verifiers for the selective
// and strongly-selective properties.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radiobcast/errors.hpp"
#include "radiobcast/label_set.hpp"

namespace radiobcast::setfam {

enum class FamilyKind { none, selective, strongly_selective };

// How much a family's kind claim can be trusted.
enum class Guarantee { none, probabilistic, verified, certified_by_construction };

inline std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::selective: return "selective";
    case FamilyKind::strongly_selective: return "strongly_selective";
    default: return "none";
  }
}

inline std::string to_string(Guarantee g) {
  switch (g) {
    case Guarantee::probabilistic: return "probabilistic";
    case Guarantee::verified: return "verified";
    case Guarantee::certified_by_construction: return "certified-by-construction";
    default: return "none";
  }
}

struct KindClaim {
  FamilyKind kind = FamilyKind::none;
  std::size_t k = 0;
  Guarantee guarantee = Guarantee::none;

  friend bool operator==(const KindClaim&, const KindClaim&) = default;

  // Strong selectivity implies selectivity for the same k.
  bool covers_selective(std::size_t need) const { return kind != FamilyKind::none && k >= need; }
  bool covers_strong(std::size_t need) const { return kind == FamilyKind::strongly_selective && k >= need; }
};

// Ordered list of subsets of [n]. Protocols index sets by position, so the
// order is part of the value.
struct SetFamily {
  std::size_t ground_size = 0;
  std::vector<LabelSet> sets;
  KindClaim claim;
  // Set when a requested k > n was clamped to n.
  bool k_clamped = false;

  std::size_t size() const { return sets.size(); }

  void add(const LabelSet& s) {
    if (s.ground_size() != ground_size) throw std::invalid_argument("set ground size differs from family ground size");
    sets.push_back(s);
  }

  friend bool operator==(const SetFamily& a, const SetFamily& b) {
    return a.ground_size == b.ground_size && a.sets == b.sets && a.claim == b.claim;
  }
};

inline SetFamily singleton_family(std::size_t n) {
  SetFamily f{n, {}, {FamilyKind::strongly_selective, n, Guarantee::certified_by_construction}};
  for (std::size_t v = 1; v <= n; ++v) f.sets.push_back(LabelSet(n, {static_cast<Label>(v)}));
  return f;
}

// {[n]}: selects every singleton, i.e. (n,1)-selective.
inline SetFamily whole_set_family(std::size_t n) {
  SetFamily f{n, {LabelSet::full(n)}, {FamilyKind::selective, 1, Guarantee::certified_by_construction}};
  return f;
}

// Σ_{s=1..k} C(n, s), saturating at UINT64_MAX.
inline std::uint64_t subsets_up_to(std::size_t n, std::size_t k) {
  std::uint64_t total = 0;
  long double c = 1;
  for (std::size_t s = 1; s <= k && s <= n; ++s) {
    c = c * static_cast<long double>(n - s + 1) / static_cast<long double>(s);
    if (c + static_cast<long double>(total) >= 1.8e19L) return UINT64_MAX;
    total += static_cast<std::uint64_t>(std::llround(c));
  }
  return total;
}

inline constexpr std::uint64_t kDefaultVerifyBudget = 50'000'000;

struct SelectiveVerdict {
  bool pass = false;
  std::vector<Label> witness;  // lexicographically least unselected Z on failure
  explicit operator bool() const { return pass; }
};

struct StrongVerdict {
  bool pass = false;
  std::vector<Label> witness;  // Z
  Label element = 0;           // z ∈ Z that no set isolates
  explicit operator bool() const { return pass; }
};

namespace detail {

// Column view: for each label, the positions of the sets containing it.
inline std::vector<BitVector> columns(const SetFamily& fam) {
  std::vector<BitVector> cols(fam.ground_size + 1, BitVector(fam.size()));
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (Label v : fam.sets[i].labels()) cols[v].set(i);
  return cols;
}

// Walks every nonempty Z ⊆ [n] with |Z| <= k in lexicographic order of the
// sorted label sequence (pre-order of the prefix tree). `visit` returns false
// to stop. Returns false iff stopped early.
template <typename Visit>
bool walk_subsets(std::size_t n, std::size_t k, const std::vector<BitVector>& cols, std::size_t nwords,
                  std::uint64_t budget, std::uint64_t& spent, Visit&& visit) {
  std::vector<Label> z;
  std::vector<OnesTwos> stack{OnesTwos(nwords)};
  // Explicit DFS: next candidate label to try at each depth.
  std::vector<Label> next{1};
  while (!next.empty()) {
    Label& cand = next.back();
    if (cand > n || z.size() >= k) {
      next.pop_back();
      if (!z.empty()) {
        z.pop_back();
        stack.pop_back();
      }
      continue;
    }
    Label v = cand++;
    if (++spent > budget) throw BudgetExceeded("exhaustive subset enumeration", spent - 1);
    z.push_back(v);
    stack.push_back(stack.back().with(cols[v]));
    if (!visit(z, stack.back())) return false;
    next.push_back(v + 1);
  }
  return true;
}

}  // namespace detail

// Pass iff every nonempty Z ⊆ [n], |Z| <= k, meets some set in exactly one
// element. Throws BudgetExceeded once more than `budget` subsets were visited.
inline SelectiveVerdict verify_selective_exact(const SetFamily& fam, std::size_t k,
                                               std::uint64_t budget = kDefaultVerifyBudget) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  k = std::min(k, fam.ground_size);
  auto cols = detail::columns(fam);
  std::size_t nwords = (fam.size() + 63) / 64;
  std::uint64_t spent = 0;
  SelectiveVerdict out{true, {}};
  detail::walk_subsets(fam.ground_size, k, cols, nwords, budget, spent,
                       [&](const std::vector<Label>& z, const OnesTwos& st) {
                         if (st.any_one()) return true;
                         out = {false, z};
                         return false;
                       });
  return out;
}

// Pass iff for every Z with |Z| <= k and every z ∈ Z some set F has Z ∩ F = {z}.
inline StrongVerdict verify_strongly_selective_exact(const SetFamily& fam, std::size_t k,
                                                     std::uint64_t budget = kDefaultVerifyBudget) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  k = std::min(k, fam.ground_size);
  auto cols = detail::columns(fam);
  std::size_t nwords = (fam.size() + 63) / 64;
  std::uint64_t spent = 0;
  StrongVerdict out{true, {}, 0};
  detail::walk_subsets(fam.ground_size, k, cols, nwords, budget, spent,
                       [&](const std::vector<Label>& z, const OnesTwos& st) {
                         for (Label e : z) {
                           if (!st.any_one_in(cols[e])) {
                             out = {false, z, e};
                             return false;
                           }
                         }
                         return true;
                       });
  return out;
}

struct SampledVerdict {
  bool violation = false;  // false means "no violation found", not a pass
  std::vector<Label> witness;
};

// Monte Carlo stand-in for the exhaustive check: draws `trials` subsets
// uniformly from all nonempty Z with |Z| <= k.
inline SampledVerdict verify_selective_sampled(const SetFamily& fam, std::size_t k, std::size_t trials,
                                               std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  const std::size_t n = fam.ground_size;
  k = std::min(k, n);
  // Size distribution proportional to C(n, s).
  std::vector<long double> cum;
  long double c = 1, acc = 0;
  for (std::size_t s = 1; s <= k; ++s) {
    c = c * static_cast<long double>(n - s + 1) / static_cast<long double>(s);
    acc += c;
    cum.push_back(acc);
  }
  rng::Engine g(seed);
  std::vector<Label> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<Label>(i + 1);
  for (std::size_t t = 0; t < trials; ++t) {
    long double u = static_cast<long double>(rng::unit(g)) * acc;
    std::size_t s = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()) + 1;
    s = std::min(s, k);
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < s; ++i) std::swap(pool[i], pool[i + rng::below(g, n - i)]);
    LabelSet z(n);
    for (std::size_t i = 0; i < s; ++i) z.insert(pool[i]);
    bool hit = std::any_of(fam.sets.begin(), fam.sets.end(), [&](const LabelSet& f) { return selects(f, z); });
    if (!hit) return {true, z.labels()};
  }
  return {false, {}};
}

}  // namespace radiobcast::setfam
