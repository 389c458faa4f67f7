#pragma once

// Multi-broadcast protocols driven by a strongly-selective family, and the
// oblivious baselines (round robin, always transmit, a fixed family cycled
// forever).

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "radiobcast/broadcast.hpp"
#include "radiobcast/setfam.hpp"

namespace radiobcast::protocols {

namespace detail {

inline void require_strong(const setfam::SetFamily& fam, std::size_t n, std::size_t k, const std::string& who) {
  if (fam.size() == 0) throw ConfigurationError(who + ": family is empty");
  if (fam.ground_size < n)
    throw ConfigurationError(who + ": family ground set smaller than n = " + std::to_string(n));
  std::size_t need = std::min(k, fam.ground_size);
  if (fam.claim.guarantee == setfam::Guarantee::none || !fam.claim.covers_strong(need))
    throw ConfigurationError(who + ": family is not claimed (" + std::to_string(fam.ground_size) + "," +
                             std::to_string(need) + ")-strongly-selective");
}

}  // namespace detail

// Phases of |F| slots. At each phase start a node takes the highest-priority
// message out of its queue and sends it at every slot j of the phase with
// v ∈ F_j. Messages enter the queue only the first time they are seen.
class MultiBB : public ProtocolSchedule {
 public:
  MultiBB(std::size_t n, std::size_t delta, FamilyPtr fam) : fam_(std::move(fam)) {
    if (!fam_) throw ConfigurationError("multi-bb: no family");
    detail::require_strong(*fam_, n, delta + 1, "multi-bb");
  }

  std::string name() const override { return "multi-bb"; }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public NodeProgram {
     public:
      Node(Label v, std::span<const Message> e, const setfam::SetFamily* f) : v_(v), f_(f) {
        for (const auto& m : e)
          if (seen_.insert(m).second) queue_.insert(m);
      }

      Action act(Slot t) override {
        const std::size_t m = f_->size();
        const std::size_t j = static_cast<std::size_t>(t % m);
        if (j == 0) {
          current_.reset();
          if (!queue_.empty()) {
            current_ = *queue_.begin();
            queue_.erase(queue_.begin());
          }
        }
        Action a = Action::receive();
        if (current_ && f_->sets[j].contains(v_)) {
          out_ = *current_;
          a = Action::transmit(std::span<const Message>(&out_, 1));
        }
        if (j + 1 == m) current_.reset();
        return a;
      }

      void on_receive(Slot, std::span<const Message> payload) override {
        for (const auto& msg : payload)
          if (seen_.insert(msg).second) queue_.insert(msg);
      }

      bool idle() const override { return queue_.empty() && !current_; }

     private:
      Label v_;
      const setfam::SetFamily* f_;
      std::set<Message> queue_, seen_;
      std::optional<Message> current_;
      Message out_;
    };
    return std::make_unique<Node>(v, endowment, fam_.get());
  }

  std::optional<std::uint64_t> phase_of(Slot t) const override { return t / fam_->size(); }
  std::optional<Slot> quiescence_window() const override { return fam_->size(); }
  std::optional<ChannelMode> required_mode() const override { return ChannelMode::bb; }
  std::size_t family_size() const override { return fam_->size(); }
  const setfam::SetFamily& family() const { return *fam_; }

 private:
  FamilyPtr fam_;
};

// Every node sends everything it knows at slot j of each phase iff v ∈ F_j.
class MultiUB : public ProtocolSchedule {
 public:
  MultiUB(std::size_t n, std::size_t delta, FamilyPtr fam) : fam_(std::move(fam)) {
    if (!fam_) throw ConfigurationError("multi-ub: no family");
    detail::require_strong(*fam_, n, delta + 1, "multi-ub");
  }

  std::string name() const override { return "multi-ub"; }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public NodeProgram {
     public:
      Node(Label v, std::span<const Message> e, const setfam::SetFamily* f) : v_(v), f_(f), known_(e.begin(), e.end()) {
        std::sort(known_.begin(), known_.end());
      }

      Action act(Slot t) override {
        const std::size_t j = static_cast<std::size_t>(t % f_->size());
        if (!known_.empty() && f_->sets[j].contains(v_)) return Action::transmit(known_);
        return Action::receive();
      }

      void on_receive(Slot, std::span<const Message> payload) override {
        std::vector<Message> merged;
        merged.reserve(known_.size() + payload.size());
        std::set_union(known_.begin(), known_.end(), payload.begin(), payload.end(), std::back_inserter(merged));
        known_ = std::move(merged);
      }

     private:
      Label v_;
      const setfam::SetFamily* f_;
      std::vector<Message> known_;
    };
    return std::make_unique<Node>(v, endowment, fam_.get());
  }

  std::optional<std::uint64_t> phase_of(Slot t) const override { return t / fam_->size(); }
  std::optional<ChannelMode> required_mode() const override { return ChannelMode::ub; }
  std::size_t family_size() const override { return fam_->size(); }

 private:
  FamilyPtr fam_;
};

inline std::shared_ptr<MultiBB> multi_bb(std::size_t n, std::size_t delta, FamilyPtr fam) {
  return std::make_shared<MultiBB>(n, delta, std::move(fam));
}

inline std::shared_ptr<MultiUB> multi_ub(std::size_t n, std::size_t delta, FamilyPtr fam) {
  return std::make_shared<MultiUB>(n, delta, std::move(fam));
}

// The channel mode decides between the two variants.
inline std::shared_ptr<ProtocolSchedule> multi_broadcast(ChannelMode mode, std::size_t n, std::size_t delta, FamilyPtr fam) {
  if (mode == ChannelMode::ub) return multi_ub(n, delta, std::move(fam));
  return multi_bb(n, delta, std::move(fam));
}

// ---------------------------------------------------------------------------

// Oblivious schedule: a node transmits at slot t iff it is informed and its
// label is in S_t. In BB mode the k-th slot of a node's turn carries its known
// messages in rotation; in UB mode the whole known set.
class ObliviousSchedule : public ProtocolSchedule {
 public:
  explicit ObliviousSchedule(ChannelMode mode) : mode_(mode) {}

  virtual bool in_set(Label v, Slot t) const = 0;

  bool oblivious() const override { return true; }

  std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const override {
    class Node : public NodeProgram {
     public:
      Node(Label v, std::span<const Message> e, const ObliviousSchedule* s) : v_(v), s_(s), known_(e.begin(), e.end()) {
        std::sort(known_.begin(), known_.end());
      }

      Action act(Slot t) override {
        if (known_.empty() || !s_->in_set(v_, t)) return Action::receive();
        if (s_->mode_ == ChannelMode::ub) return Action::transmit(known_);
        out_ = known_[turns_++ % known_.size()];
        return Action::transmit(std::span<const Message>(&out_, 1));
      }

      void on_receive(Slot, std::span<const Message> payload) override {
        for (const auto& m : payload) {
          auto it = std::lower_bound(known_.begin(), known_.end(), m);
          if (it == known_.end() || *it != m) known_.insert(it, m);
        }
      }

     private:
      Label v_;
      const ObliviousSchedule* s_;
      std::vector<Message> known_;
      Message out_;
      std::size_t turns_ = 0;
    };
    return std::make_unique<Node>(v, endowment, this);
  }

  LabelSet transmit_set(Slot t, std::size_t n) const override {
    LabelSet s(n);
    for (std::size_t v = 1; v <= n; ++v)
      if (in_set(static_cast<Label>(v), t)) s.insert(static_cast<Label>(v));
    return s;
  }

  std::optional<ChannelMode> required_mode() const override {
    return mode_ == ChannelMode::ub ? std::optional<ChannelMode>(ChannelMode::ub) : std::nullopt;
  }

 private:
  ChannelMode mode_;
};

// v transmits at slots t with t mod n = v - 1.
class RoundRobin : public ObliviousSchedule {
 public:
  explicit RoundRobin(std::size_t n, ChannelMode mode = ChannelMode::bb) : ObliviousSchedule(mode), n_(n) {
    if (n == 0) throw ConfigurationError("round-robin: n must be positive");
  }
  std::string name() const override { return "round-robin"; }
  bool in_set(Label v, Slot t) const override { return t % n_ == static_cast<Slot>(v) - 1; }
  std::optional<std::uint64_t> phase_of(Slot t) const override { return t / n_; }

 private:
  std::size_t n_;
};

class AlwaysTransmit : public ObliviousSchedule {
 public:
  explicit AlwaysTransmit(ChannelMode mode = ChannelMode::bb) : ObliviousSchedule(mode) {}
  std::string name() const override { return "always"; }
  bool in_set(Label, Slot) const override { return true; }
};

// Slot 0: everyone (only the source is informed); slot t >= 1: F_{(t-1) mod |F|}.
// This is BROAD-A's transmit pattern with the first-informed-phase condition
// and deactivation dropped.
class SelectiveCycle : public ObliviousSchedule {
 public:
  explicit SelectiveCycle(FamilyPtr fam, ChannelMode mode = ChannelMode::bb) : ObliviousSchedule(mode), fam_(std::move(fam)) {
    if (!fam_ || fam_->size() == 0) throw ConfigurationError("selective-cycle: empty family");
  }
  std::string name() const override { return "selective-cycle"; }
  bool in_set(Label v, Slot t) const override {
    return t == 0 || fam_->sets[static_cast<std::size_t>((t - 1) % fam_->size())].contains(v);
  }
  std::optional<std::uint64_t> phase_of(Slot t) const override { return t == 0 ? 0 : (t - 1) / fam_->size() + 1; }
  std::size_t family_size() const override { return fam_->size(); }

 private:
  FamilyPtr fam_;
};

inline std::shared_ptr<RoundRobin> round_robin(std::size_t n, ChannelMode mode = ChannelMode::bb) {
  return std::make_shared<RoundRobin>(n, mode);
}

inline std::shared_ptr<AlwaysTransmit> always_transmit(ChannelMode mode = ChannelMode::bb) {
  return std::make_shared<AlwaysTransmit>(mode);
}

inline std::shared_ptr<SelectiveCycle> selective_cycle(FamilyPtr fam, ChannelMode mode = ChannelMode::bb) {
  return std::make_shared<SelectiveCycle>(std::move(fam), mode);
}

// Transmit sets of slots first .. first+count-1 as a family with no kind claim.
inline setfam::SetFamily export_transmit_sets(const ProtocolSchedule& p, std::size_t n, Slot first, std::size_t count) {
  if (!p.oblivious()) throw ConfigurationError(p.name() + " is not oblivious");
  setfam::SetFamily f{n, {}, {}};
  for (std::size_t i = 0; i < count; ++i) f.sets.push_back(p.transmit_set(first + i, n));
  return f;
}

}  // namespace radiobcast::protocols
