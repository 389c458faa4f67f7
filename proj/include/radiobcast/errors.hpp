#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace radiobcast {

// Invalid pairing of inputs detected before any work starts (CLI exit code 2).
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A component broke a documented contract at runtime (CLI exit code 3).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An exhaustive check ran out of its work allowance. Never treated as a pass.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t spent)
      : std::runtime_error(what + " (budget exhausted after " + std::to_string(spent) + " units)"), spent_(spent) {}
  std::uint64_t spent() const { return spent_; }

 private:
  std::uint64_t spent_;
};

class ConstructionFailure : public std::runtime_error {
 public:
  ConstructionFailure(const std::string& what, std::size_t attempts)
      : std::runtime_error(what + " after " + std::to_string(attempts) + " attempts"), attempts_(attempts) {}
  std::size_t attempts() const { return attempts_; }

 private:
  std::size_t attempts_;
};

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// std::mt19937_64 output is fully specified by the standard; the
// distributions are not, so every draw below is hand-rolled to keep
// outputs identical across standard libraries.
using Engine = std::mt19937_64;

// Uniform integer in [0, bound). bound must be > 0.
inline std::uint64_t below(Engine& g, std::uint64_t bound) {
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % bound;
}

// True with probability exactly 2^-i.
inline bool one_in_pow2(Engine& g, unsigned i) {
  if (i == 0) return true;
  if (i >= 64) return false;
  return (g() >> (64 - i)) == 0;
}

inline double unit(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace rng
}  // namespace radiobcast
