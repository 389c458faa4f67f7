#pragma once

// Randomized (n,k)-selective families: ⌈log2 k⌉ strata, stratum i holding
// l_i sets that include each label independently with probability 2^-i.

#include <cmath>
#include <cstdint>
#include <vector>

#include "radiobcast/setfam.hpp"

namespace radiobcast::setfam {

inline std::size_t ceil_log2(std::uint64_t x) {
  std::size_t b = 0;
  while ((std::uint64_t{1} << b) < x) ++b;
  return b;
}

// ln C(n, j), summed term by term.
inline long double log_binomial(std::size_t n, std::size_t j) {
  if (j > n) return -INFINITY;
  long double s = 0;
  for (std::size_t i = 1; i <= j; ++i) s += std::log(static_cast<long double>(n - j + i) / static_cast<long double>(i));
  return s;
}

// Smallest l_i meeting the per-stratum success condition l_i > 8 ln(C(n, 2^{i-1}) 2^i).
inline std::size_t stratum_budget(std::size_t n, std::size_t i) {
  long double x = 8.0L * (log_binomial(n, std::size_t{1} << (i - 1)) + static_cast<long double>(i) * std::log(2.0L));
  return static_cast<std::size_t>(std::ceil(x)) + 1;
}

struct ConstructionParams {
  std::vector<std::size_t> stratum_sizes;  // l_1 .. l_{⌈log2 k⌉}
  std::uint64_t seed = 0;
  std::size_t retry_limit = 64;

  // Inclusion probability of stratum i (1-based) is 2^-i.
  static unsigned exponent(std::size_t i) { return static_cast<unsigned>(i); }

  static ConstructionParams for_instance(std::size_t n, std::size_t k, std::uint64_t seed) {
    ConstructionParams p;
    p.seed = seed;
    for (std::size_t i = 1; i <= ceil_log2(k); ++i) p.stratum_sizes.push_back(stratum_budget(n, i));
    return p;
  }

  void validate(std::size_t n, std::size_t k) const {
    if (stratum_sizes.size() != ceil_log2(k))
      throw std::invalid_argument("strata count must equal ceil(log2 k)");
    for (std::size_t i = 1; i <= stratum_sizes.size(); ++i)
      if (stratum_sizes[i - 1] < stratum_budget(n, i))
        throw std::invalid_argument("stratum " + std::to_string(i) + " below its success budget");
    if (retry_limit == 0) throw std::invalid_argument("retry limit must be positive");
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (auto l : stratum_sizes) t += l;
    return t;
  }
};

enum class VerifyMode {
  automatic,      // verified when n <= 24 and k <= 6, probabilistic otherwise
  verified,       // always verify, within the given budget
  probabilistic,  // never verify
};

inline constexpr std::size_t kVerifiedMaxN = 24;
inline constexpr std::size_t kVerifiedMaxK = 6;

namespace detail {

inline std::vector<LabelSet> draw_stratum(std::size_t n, std::size_t i, std::size_t count, std::uint64_t seed) {
  rng::Engine g(seed);
  std::vector<LabelSet> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    LabelSet f(n);
    for (std::size_t v = 1; v <= n; ++v)
      if (rng::one_in_pow2(g, ConstructionParams::exponent(i))) f.insert(static_cast<Label>(v));
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

inline SetFamily build_selective(std::size_t n, std::size_t k, const ConstructionParams& params,
                                 VerifyMode mode = VerifyMode::automatic,
                                 std::uint64_t verify_budget = kDefaultVerifyBudget) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  bool clamped = false;
  if (k > n) {
    k = n;
    clamped = true;
  }
  if (k == 1) {
    auto f = whole_set_family(n);
    f.k_clamped = clamped;
    return f;
  }
  if (n <= 2) throw std::invalid_argument("randomized construction needs n > 2");
  params.validate(n, k);

  bool verify = mode == VerifyMode::verified ||
                (mode == VerifyMode::automatic && n <= kVerifiedMaxN && k <= kVerifiedMaxK);

  const std::size_t strata = params.stratum_sizes.size();
  std::vector<std::vector<LabelSet>> parts(strata);
  std::vector<std::size_t> attempt(strata, 0);
  for (std::size_t i = 1; i <= strata; ++i)
    parts[i - 1] = detail::draw_stratum(n, i, params.stratum_sizes[i - 1], rng::derive(params.seed, i, 0));

  auto assemble = [&] {
    SetFamily f{n, {}, {}};
    for (auto& p : parts)
      for (auto& s : p) f.sets.push_back(s);
    f.k_clamped = clamped;
    return f;
  };

  SetFamily fam = assemble();
  if (!verify) {
    fam.claim = {FamilyKind::selective, k, Guarantee::probabilistic};
    return fam;
  }
  std::size_t redraws = 0;
  for (;;) {
    auto verdict = verify_selective_exact(fam, k, verify_budget);
    if (verdict.pass) break;
    if (redraws >= params.retry_limit)
      throw ConstructionFailure("selective family failed exact verification", redraws + 1);
    // Z with 2^{i-1} < |Z| <= 2^i is stratum i's responsibility; singletons go to stratum 1.
    std::size_t i = std::max<std::size_t>(1, ceil_log2(verdict.witness.size()));
    ++redraws;
    ++attempt[i - 1];
    parts[i - 1] = detail::draw_stratum(n, i, params.stratum_sizes[i - 1], rng::derive(params.seed, i, attempt[i - 1]));
    fam = assemble();
  }
  fam.claim = {FamilyKind::selective, k, Guarantee::verified};
  return fam;
}

inline SetFamily build_selective(std::size_t n, std::size_t k, std::uint64_t seed,
                                 VerifyMode mode = VerifyMode::automatic) {
  std::size_t kk = std::min(k, n);
  if (kk <= 1) return build_selective(n, k, ConstructionParams{}, mode);
  return build_selective(n, k, ConstructionParams::for_instance(n, kk, seed), mode);
}

}  // namespace radiobcast::setfam
