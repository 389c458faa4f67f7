#pragma once

// Single-broadcast protocols built from selective families: BROAD-A for known
// (n, Δ), BROAD-B for known n, and PROT-α for nodes that know only their
// labels. BROAD-B and PROT-α interleave several BROAD-A executions; every
// node keeps one small state record per execution.

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "radiobcast/provision.hpp"
#include "radiobcast/schedule.hpp"

namespace radiobcast::protocols {

using FamilyPtr = std::shared_ptr<const setfam::SetFamily>;

// When a node that went inactive inside one embedded execution stops acting
// in the combined protocol.
enum class Deactivation {
  any_execution,  // inactive in one execution => inactive everywhere
  all_executions  // inactive only once every execution has retired it
};

inline std::string to_string(Deactivation d) { return d == Deactivation::any_execution ? "any" : "all"; }

namespace detail {

// One BROAD-A execution as seen by one node. Local slot 0 is the source
// slot; local slot h >= 1 is position (h-1) mod |F| of phase (h-1)/|F| + 1.
struct BroadACore {
  const setfam::SetFamily* fam = nullptr;
  std::optional<std::uint64_t> informed_phase;
  std::optional<std::uint64_t> last_phase;  // phase of the last local slot executed
  std::optional<std::uint64_t> transmit_phase;
  bool done = false;

  std::uint64_t phase_of(Slot h) const { return h == 0 ? 0 : (h - 1) / fam->size() + 1; }

  ActionKind step(Label v, bool source, Slot h) {
    const std::uint64_t i = phase_of(h);
    if (transmit_phase && i > *transmit_phase) done = true;
    last_phase = i;
    if (done) return ActionKind::inactive;
    if (h == 0) {
      if (!source) return ActionKind::receive;
      transmit_phase = 0;
      return ActionKind::transmit;
    }
    const std::size_t j = static_cast<std::size_t>((h - 1) % fam->size());
    if (!source && informed_phase && *informed_phase + 1 == i && fam->sets[j].contains(v)) {
      transmit_phase = i;
      return ActionKind::transmit;
    }
    return ActionKind::receive;
  }

  void mark_informed() {
    if (!informed_phase) informed_phase = last_phase.value_or(0);
  }
};

struct ExecRef {
  std::size_t group = 0;
  std::size_t index = 0;
  const setfam::SetFamily* fam = nullptr;
  Slot local = 0;
};

// Node running a sequence of BROAD-A executions, one per global slot.
// Subclasses map a global slot to (execution, local slot).
class MultiExecNode : public NodeProgram {
 public:
  MultiExecNode(Label v, std::span<const Message> endowment, Deactivation policy, std::optional<std::size_t> groups,
                std::size_t per_group)
      : v_(v), source_(!endowment.empty()), policy_(policy), groups_(groups), per_group_(per_group) {
    if (endowment.size() > 1) throw ConfigurationError("single-broadcast protocol given several messages");
    if (source_) msg_ = endowment[0];
  }

  Action act(Slot t) override {
    if (dead_) return Action::inactive();
    ExecRef ref = locate(t);
    BroadACore& e = exec(ref);
    ActionKind k = e.step(v_, source_, ref.local);
    if (e.done) {
      if (policy_ == Deactivation::any_execution || all_retired()) {
        dead_ = true;
        return Action::inactive();
      }
      return Action::receive();
    }
    if (k == ActionKind::transmit) return Action::transmit(std::span<const Message>(&*msg_, 1));
    return Action::receive();
  }

  void on_receive(Slot, std::span<const Message> payload) override {
    if (msg_ || payload.empty()) return;
    msg_ = payload[0];
    for (auto& g : execs_)
      for (auto& e : g)
        if (e.fam) e.mark_informed();
  }

 protected:
  virtual ExecRef locate(Slot t) = 0;

 private:
  BroadACore& exec(const ExecRef& ref) {
    if (execs_.size() <= ref.group) execs_.resize(ref.group + 1);
    auto& g = execs_[ref.group];
    if (g.size() <= ref.index) g.resize(ref.index + 1);
    auto& e = g[ref.index];
    if (!e.fam) {
      e.fam = ref.fam;
      if (msg_ && !source_) e.informed_phase = 0;
    }
    return e;
  }

  bool all_retired() const {
    if (!groups_ || execs_.size() < *groups_) return false;
    for (const auto& g : execs_) {
      if (g.size() < per_group_) return false;
      for (const auto& e : g)
        if (!e.done) return false;
    }
    return true;
  }

  Label v_;
  bool source_;
  Deactivation policy_;
  std::optional<std::size_t> groups_;
  std::size_t per_group_;
  std::optional<Message> msg_;
  bool dead_ = false;
  std::vector<std::vector<BroadACore>> execs_;
};

inline void require_selective(const setfam::SetFamily& fam, std::size_t n, std::size_t k, const std::string& who) {
  if (fam.size() == 0) throw ConfigurationError(who + ": family is empty");
  if (fam.ground_size < n)
    throw ConfigurationError(who + ": family ground set [" + std::to_string(fam.ground_size) + "] smaller than n = " +
                             std::to_string(n));
  std::size_t need = std::min(k, fam.ground_size);
  if (fam.claim.guarantee == setfam::Guarantee::none || !fam.claim.covers_selective(need))
    throw ConfigurationError(who + ": family is not claimed (" + std::to_string(fam.ground_size) + "," +
                             std::to_string(need) + ")-selective");
}

}  // namespace detail

// ---------------------------------------------------------------------------

class BroadA : public ProtocolSchedule {
 public:
  BroadA(std::size_t n, std::size_t delta, FamilyPtr fam) : n_(n), delta_(delta), fam_(std::move(fam)) {
    if (!fam_) throw ConfigurationError("broad-a: no family");
    detail::require_selective(*fam_, n_, std::max<std::size_t>(delta_, 1), "broad-a");
  }

  std::string name() const override { return "broad-a"; }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public detail::MultiExecNode {
     public:
      Node(Label v, std::span<const Message> e, const setfam::SetFamily* f)
          : MultiExecNode(v, e, Deactivation::any_execution, 1, 1), f_(f) {}

     protected:
      detail::ExecRef locate(Slot t) override { return {0, 0, f_, t}; }

     private:
      const setfam::SetFamily* f_;
    };
    return std::make_unique<Node>(v, endowment, fam_.get());
  }

  std::optional<std::uint64_t> phase_of(Slot t) const override { return t == 0 ? 0 : (t - 1) / fam_->size() + 1; }
  bool self_terminating() const override { return true; }
  bool single_broadcast() const override { return true; }
  std::size_t family_size() const override { return fam_->size(); }
  const setfam::SetFamily& family() const { return *fam_; }

 private:
  std::size_t n_, delta_;
  FamilyPtr fam_;
};

inline std::shared_ptr<BroadA> broad_a(std::size_t n, std::size_t delta, FamilyPtr fam) {
  return std::make_shared<BroadA>(n, delta, std::move(fam));
}

inline std::shared_ptr<BroadA> broad_a(std::size_t n, std::size_t delta, const setfam::SetFamily& fam) {
  return broad_a(n, delta, std::make_shared<const setfam::SetFamily>(fam));
}

// Number of embedded executions (= slots per phase) of BROAD-B(n). BROAD-B(1)
// still runs one execution so that PROT-α's first stage is well defined.
inline std::size_t broad_b_width(std::size_t n) { return std::max<std::size_t>(1, setfam::ceil_log2(n)); }

// Global slot s of BROAD-B(n) runs local slot s / L of execution s mod L,
// which is BROAD-A(n, 2^{(s mod L) + 1}).
inline detail::ExecRef broad_b_locate(std::size_t width, const std::vector<FamilyPtr>& fams, Slot s,
                                      std::size_t group = 0) {
  std::size_t l = static_cast<std::size_t>(s % width);
  return {group, l, fams[l].get(), s / width};
}

class BroadB : public ProtocolSchedule {
 public:
  BroadB(std::size_t n, std::vector<FamilyPtr> families, Deactivation policy = Deactivation::any_execution)
      : n_(n), width_(broad_b_width(n)), fams_(std::move(families)), policy_(policy) {
    if (fams_.size() != width_)
      throw ConfigurationError("broad-b(" + std::to_string(n) + ") needs " + std::to_string(width_) + " families");
    for (std::size_t l = 1; l <= width_; ++l) {
      if (!fams_[l - 1]) throw ConfigurationError("broad-b: missing family " + std::to_string(l));
      detail::require_selective(*fams_[l - 1], n_, std::size_t{1} << l, "broad-b");
    }
  }

  // Families from the certified provisioning cache.
  static std::shared_ptr<BroadB> provisioned(std::size_t n, std::uint64_t seed,
                                             Deactivation policy = Deactivation::any_execution) {
    std::vector<FamilyPtr> f;
    for (std::size_t l = 1; l <= broad_b_width(n); ++l)
      f.push_back(setfam::FamilyCache::global().selective(n, std::size_t{1} << l, seed));
    return std::make_shared<BroadB>(n, std::move(f), policy);
  }

  std::string name() const override { return "broad-b"; }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public detail::MultiExecNode {
     public:
      Node(Label v, std::span<const Message> e, const BroadB* p)
          : MultiExecNode(v, e, p->policy_, 1, p->width_), p_(p) {}

     protected:
      detail::ExecRef locate(Slot t) override { return broad_b_locate(p_->width_, p_->fams_, t); }

     private:
      const BroadB* p_;
    };
    return std::make_unique<Node>(v, endowment, this);
  }

  std::optional<std::uint64_t> phase_of(Slot t) const override { return t / width_; }
  bool self_terminating() const override { return true; }
  bool single_broadcast() const override { return true; }
  std::size_t family_size() const override {
    std::size_t s = 0;
    for (const auto& f : fams_) s = std::max(s, f->size());
    return s;
  }
  std::size_t width() const { return width_; }
  const setfam::SetFamily& family(std::size_t l) const { return *fams_.at(l - 1); }

 private:
  std::size_t n_, width_;
  std::vector<FamilyPtr> fams_;
  Deactivation policy_;
};

inline std::shared_ptr<BroadB> broad_b(std::size_t n, std::vector<FamilyPtr> families,
                                       Deactivation policy = Deactivation::any_execution) {
  return std::make_shared<BroadB>(n, std::move(families), policy);
}

// ---------------------------------------------------------------------------

using u128 = unsigned __int128;

// The stage function f_k(z) = 2^⌈k^{2/α}⌉ (k - z), f_0 = 0, and the map from
// global slots to (phase k, stage ℓ, local slot of BROAD-B(2^ℓ)). Stage (k, ℓ)
// covers 1-based local slots f_{k-1}(ℓ)+1 .. f_k(ℓ); phase k ends at global
// slot count T_k = Σ_ℓ f_k(ℓ). Values saturate at 2^127.
class DovetailSchedule {
 public:
  static constexpr u128 kSaturated = u128{1} << 127;

  explicit DovetailSchedule(double alpha) : alpha_(alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw ConfigurationError("alpha must be a positive real");
  }

  double alpha() const { return alpha_; }

  // ⌈k^{2/α}⌉, treating values within 1e-9 of an integer as that integer.
  std::uint64_t exponent(std::uint64_t k) const {
    long double x = std::pow(static_cast<long double>(k), 2.0L / static_cast<long double>(alpha_));
    long double r = std::round(x);
    if (std::fabs(x - r) <= 1e-9L * std::max<long double>(1, x)) return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(x));
  }

  u128 f(std::uint64_t k, std::uint64_t z) const {
    if (k == 0 || z >= k) return 0;
    std::uint64_t e = exponent(k);
    if (e >= 127) return kSaturated;
    u128 p = u128{1} << e;
    u128 m = k - z;
    if (p > kSaturated / m) return kSaturated;
    return p * m;
  }

  u128 stage_length(std::uint64_t k, std::uint64_t l) const { return sat_sub(f(k, l), f(k - 1, l)); }

  // T_k by the closed form 2^⌈k^{2/α}⌉ k(k+1)/2.
  u128 phase_end(std::uint64_t k) const {
    u128 t = 0;
    for (std::uint64_t l = 0; l < k; ++l) t = sat_add(t, f(k, l));
    return t;
  }

  // T_k by summing every stage length of phases 1..k.
  u128 phase_end_cumulative(std::uint64_t k) const {
    u128 t = 0;
    for (std::uint64_t kk = 1; kk <= k; ++kk)
      for (std::uint64_t l = 0; l < kk; ++l) t = sat_add(t, stage_length(kk, l));
    return t;
  }

  struct Position {
    std::uint64_t phase = 0;  // k >= 1
    std::uint64_t stage = 0;  // ℓ in [0, k)
    Slot local = 0;           // 0-based slot of BROAD-B(2^ℓ)
    friend bool operator==(const Position&, const Position&) = default;
  };

  Position locate(Slot g) const {
    std::uint64_t k = 1;
    u128 start = 0;
    for (;; ++k) {
      u128 end = phase_end(k);
      if (static_cast<u128>(g) < end) break;
      start = end;
    }
    for (std::uint64_t l = 0; l < k; ++l) {
      u128 len = stage_length(k, l);
      if (static_cast<u128>(g) < start + len) return {k, l, static_cast<Slot>(f(k - 1, l) + (g - start))};
      start += len;
    }
    throw ContractViolation("dovetail locate fell through");
  }

  // Incremental counterpart of locate() for strictly sequential slots.
  class Cursor {
   public:
    explicit Cursor(const DovetailSchedule& s) : s_(&s) { enter(1, 0, 0); }

    Position at(Slot g) {
      if (g < start_) return s_->locate(g);
      while (static_cast<u128>(g) >= static_cast<u128>(start_) + len_) {
        Slot next = static_cast<Slot>(start_ + len_);
        if (stage_ + 1 < phase_) enter(phase_, stage_ + 1, next);
        else enter(phase_ + 1, 0, next);
      }
      return {phase_, stage_, static_cast<Slot>(base_ + (g - start_))};
    }

    // Global slot at which the current phase began.
    Slot phase_start() const { return phase_start_; }

   private:
    void enter(std::uint64_t k, std::uint64_t l, Slot start) {
      phase_ = k;
      stage_ = l;
      start_ = start;
      if (l == 0) phase_start_ = start;
      len_ = s_->stage_length(k, l);
      base_ = static_cast<Slot>(s_->f(k - 1, l));
    }

    const DovetailSchedule* s_;
    std::uint64_t phase_ = 1, stage_ = 0;
    Slot start_ = 0, base_ = 0, phase_start_ = 0;
    u128 len_ = 0;
  };

 private:
  static u128 sat_add(u128 a, u128 b) { return a >= kSaturated || b >= kSaturated - a ? kSaturated : a + b; }
  static u128 sat_sub(u128 a, u128 b) { return a > b ? a - b : 0; }

  double alpha_;
};

struct ProtAlphaOptions {
  std::uint64_t seed = 0;
  Deactivation policy = Deactivation::any_execution;
  // Called by every node when its slot counter enters a new phase k >= 2, with
  // (label, k, global slot).
  std::function<void(Label, std::uint64_t, Slot)> on_phase_start;
};

class ProtAlpha : public ProtocolSchedule {
 public:
  explicit ProtAlpha(double alpha, ProtAlphaOptions opts = {}) : dove_(alpha), opts_(std::move(opts)) {}

  std::string name() const override { return "prot-alpha"; }

  const DovetailSchedule& dovetail() const { return dove_; }

  // Families for BROAD-B(2^ℓ), memoised per schedule.
  const std::vector<FamilyPtr>& families(std::size_t l) const {
    std::lock_guard lock(mu_);
    auto& f = fams_[l];
    if (f.empty()) {
      std::size_t n = std::size_t{1} << l;
      for (std::size_t i = 1; i <= broad_b_width(n); ++i)
        f.push_back(setfam::FamilyCache::global().selective(n, std::size_t{1} << i, opts_.seed));
    }
    return f;
  }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public detail::MultiExecNode {
     public:
      Node(Label v, std::span<const Message> e, const ProtAlpha* p)
          : MultiExecNode(v, e, p->opts_.policy, std::nullopt, 0), v_(v), p_(p), cur_(p->dove_) {}

     protected:
      detail::ExecRef locate(Slot t) override {
        auto pos = cur_.at(t);
        if (pos.phase != phase_) {
          phase_ = pos.phase;
          if (phase_ >= 2 && p_->opts_.on_phase_start) p_->opts_.on_phase_start(v_, phase_, cur_.phase_start());
        }
        std::size_t l = static_cast<std::size_t>(pos.stage);
        if (fams_.size() <= l) fams_.resize(l + 1, nullptr);
        if (!fams_[l]) fams_[l] = &p_->families(l);
        return broad_b_locate(broad_b_width(std::size_t{1} << l), *fams_[l], pos.local, l);
      }

     private:
      Label v_;
      const ProtAlpha* p_;
      DovetailSchedule::Cursor cur_;
      std::uint64_t phase_ = 1;
      std::vector<const std::vector<FamilyPtr>*> fams_;
    };
    return std::make_unique<Node>(v, endowment, this);
  }

  // 0-based: slots of phase k map to k - 1.
  std::optional<std::uint64_t> phase_of(Slot t) const override { return dove_.locate(t).phase - 1; }
  bool self_terminating() const override { return opts_.policy == Deactivation::any_execution; }
  bool single_broadcast() const override { return true; }

 private:
  DovetailSchedule dove_;
  ProtAlphaOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, std::vector<FamilyPtr>> fams_;
};

inline std::shared_ptr<ProtAlpha> prot_alpha(double alpha, ProtAlphaOptions opts = {}) {
  return std::make_shared<ProtAlpha>(alpha, std::move(opts));
}

}  // namespace radiobcast::protocols
