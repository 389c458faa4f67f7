#pragma once

// Deterministic (n,k)-strongly-selective families from Reed-Solomon style
// q-ary codes: label v gets the polynomial whose coefficients are the base-q
// digits of v-1, and each (position, symbol) pair over GF(q) gives one set.
// Two distinct polynomials of degree < m agree on at most m-1 positions, so
// with q >= k(m-1)+1 every z in a k-set Z has a position where it differs
// from all of Z \ {z}.

#include <cstdint>

#include "radiobcast/setfam.hpp"

namespace radiobcast::setfam {

inline bool is_prime(std::uint64_t x) {
  if (x < 2) return false;
  for (std::uint64_t d = 2; d * d <= x; ++d)
    if (x % d == 0) return false;
  return true;
}

struct CodeParams {
  std::uint64_t q = 0;  // field size (prime)
  std::uint64_t m = 0;  // polynomial length, smallest m with q^m >= n
};

// Smallest prime q with q >= k(m-1)+1, m recomputed for each candidate.
inline CodeParams choose_code_params(std::size_t n, std::size_t k) {
  for (std::uint64_t q = 2;; ++q) {
    if (!is_prime(q)) continue;
    std::uint64_t m = 1, pw = q;
    while (pw < n) {
      pw *= q;
      ++m;
    }
    if (q >= k * (m - 1) + 1) return {q, m};
  }
}

// `keep` restricts the ground set to [keep] (keep <= n) without changing the
// number or order of sets; the sets are those of the full family intersected
// with [keep].
inline SetFamily build_strongly_selective(std::size_t n, std::size_t k, std::size_t keep) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  if (keep == 0 || keep > n) keep = n;
  bool clamped = false;
  if (k > n) {
    k = n;
    clamped = true;
  }
  auto [q, m] = choose_code_params(n, k);
  if (q * q >= n) {
    SetFamily f = singleton_family(n);
    if (keep < n) {
      SetFamily r{keep, {}, f.claim};
      for (std::size_t v = 1; v <= n; ++v) {
        LabelSet s(keep);
        if (v <= keep) s.insert(static_cast<Label>(v));
        r.sets.push_back(std::move(s));
      }
      f = std::move(r);
    }
    f.k_clamped = clamped;
    return f;
  }
  SetFamily f{keep, std::vector<LabelSet>(q * q, LabelSet(keep)),
              {FamilyKind::strongly_selective, k, Guarantee::certified_by_construction}};
  f.k_clamped = clamped;
  std::vector<std::uint64_t> coeff(m);
  for (std::size_t v = 1; v <= keep; ++v) {
    std::uint64_t x = v - 1;
    for (std::uint64_t d = 0; d < m; ++d) {
      coeff[d] = x % q;
      x /= q;
    }
    for (std::uint64_t p = 0; p < q; ++p) {
      // Horner, highest coefficient first.
      std::uint64_t s = 0;
      for (std::uint64_t d = m; d-- > 0;) s = (s * p + coeff[d]) % q;
      f.sets[p * q + s].insert(static_cast<Label>(v));
    }
  }
  return f;
}

inline SetFamily build_strongly_selective(std::size_t n, std::size_t k) { return build_strongly_selective(n, k, n); }

}  // namespace radiobcast::setfam
