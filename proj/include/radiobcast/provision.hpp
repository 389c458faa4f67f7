#pragma once

// Certified families for protocol use, built once per (n, k, seed) and shared.

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "radiobcast/selective.hpp"
#include "radiobcast/strongly_selective.hpp"

namespace radiobcast::setfam {

inline constexpr std::uint64_t kProvisionVerifyBudget = 5'000'000;

// Smallest available (n,k)-selective family whose claim is verified or
// certified by construction: the verified random family when exhaustive
// verification fits the budget, otherwise the code family (which covers
// selectivity through strong selectivity).
inline SetFamily certified_selective(std::size_t n, std::size_t k, std::uint64_t seed,
                                     std::uint64_t verify_budget = kProvisionVerifyBudget) {
  if (n == 0 || k == 0) throw std::invalid_argument("n and k must be positive");
  k = std::min(k, n);
  if (k == 1) return whole_set_family(n);
  SetFamily best = build_strongly_selective(n, k);
  if (n > 2 && subsets_up_to(n, k) <= verify_budget) {
    auto params = ConstructionParams::for_instance(n, k, seed);
    if (params.total() < best.size()) {
      try {
        auto f = build_selective(n, k, params, VerifyMode::verified, verify_budget);
        if (f.size() < best.size()) best = std::move(f);
      } catch (const ConstructionFailure&) {
      }
    }
  }
  return best;
}

inline SetFamily certified_strong(std::size_t n, std::size_t k) { return build_strongly_selective(n, std::min(k, n)); }

// Process-wide memo keyed by (kind, n, k, seed); construction cost stays out
// of protocol timing and concurrent runs share one copy.
class FamilyCache {
 public:
  static FamilyCache& global() {
    static FamilyCache c;
    return c;
  }

  std::shared_ptr<const SetFamily> selective(std::size_t n, std::size_t k, std::uint64_t seed) {
    return get({0, n, std::min(k, n), seed}, [&] { return certified_selective(n, k, seed); });
  }

  std::shared_ptr<const SetFamily> strong(std::size_t n, std::size_t k) {
    return get({1, n, std::min(k, n), 0}, [&] { return certified_strong(n, k); });
  }

 private:
  using Key = std::tuple<int, std::size_t, std::size_t, std::uint64_t>;

  template <typename Build>
  std::shared_ptr<const SetFamily> get(const Key& key, Build&& build) {
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    auto fam = std::make_shared<const SetFamily>(build());
    std::lock_guard lock(mu_);
    return cache_.emplace(key, std::move(fam)).first->second;
  }

  std::mutex mu_;
  std::map<Key, std::shared_ptr<const SetFamily>> cache_;
};

}  // namespace radiobcast::setfam
