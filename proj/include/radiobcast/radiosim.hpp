#pragma once

// Slot-synchronous simulation of a directed radio network. In every slot each
// node transmits, receives or is inactive; a receiving node gets a payload iff
// exactly one of its in-neighbours transmits. Collisions look exactly like
// silence to the nodes.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "radiobcast/graph.hpp"
#include "radiobcast/schedule.hpp"
#include "radiobcast/selective.hpp"

namespace radiobcast {

struct SourceSpec {
  Label label = 0;
  std::uint32_t count = 1;
  friend bool operator==(const SourceSpec&, const SourceSpec&) = default;
};

struct BroadcastInstance {
  RadioGraph graph;
  std::vector<SourceSpec> sources;
  ChannelMode mode = ChannelMode::bb;

  static BroadcastInstance single(RadioGraph g, Label source, ChannelMode mode = ChannelMode::bb) {
    return {std::move(g), {{source, 1}}, mode};
  }

  void validate() const {
    if (sources.empty()) throw std::invalid_argument("instance needs at least one source");
    std::size_t r = 0;
    for (const auto& s : sources) {
      if (s.label == 0 || s.label > graph.size())
        throw std::invalid_argument("source label " + std::to_string(s.label) + " outside [1,n]");
      r += s.count;
    }
    if (r == 0) throw std::invalid_argument("instance needs r >= 1 messages");
  }

  // All messages in priority order. A label listed twice keeps numbering.
  std::vector<Message> messages() const {
    std::vector<Message> out;
    std::vector<std::uint32_t> next(graph.size() + 1, 0);
    for (const auto& s : sources)
      for (std::uint32_t i = 0; i < s.count; ++i) out.push_back({s.label, ++next.at(s.label)});
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<Message> endowment(Label v) const {
    std::vector<Message> out;
    for (const auto& m : messages())
      if (m.source == v) out.push_back(m);
    return out;
  }

  std::size_t message_count() const {
    std::size_t r = 0;
    for (const auto& s : sources) r += s.count;
    return r;
  }
};

struct InstanceMetrics {
  std::size_t n = 0;
  std::size_t r = 0;
  std::size_t eccentricity = 0;   // D
  std::size_t max_in_degree = 0;  // Δ
  std::size_t congestion = 0;     // c
  friend bool operator==(const InstanceMetrics&, const InstanceMetrics&) = default;
};

// D: largest hop distance from any source to a node it reaches. Δ: largest
// in-degree. c: largest number of messages whose source reaches a node, a
// source reaching itself at distance 0.
inline InstanceMetrics metrics(const BroadcastInstance& inst) {
  inst.validate();
  InstanceMetrics m;
  m.n = inst.graph.size();
  m.r = inst.message_count();
  m.max_in_degree = inst.graph.max_in_degree();
  std::vector<std::size_t> owed(m.n + 1, 0);
  std::vector<std::size_t> per_label(m.n + 1, 0);
  for (const auto& s : inst.sources) per_label[s.label] += s.count;
  for (std::size_t s = 1; s <= m.n; ++s) {
    if (per_label[s] == 0) continue;
    auto d = inst.graph.distances_from(static_cast<Label>(s));
    for (std::size_t v = 1; v <= m.n; ++v) {
      if (!d[v]) continue;
      m.eccentricity = std::max(m.eccentricity, *d[v]);
      owed[v] += per_label[s];
    }
  }
  m.congestion = *std::max_element(owed.begin(), owed.end());
  return m;
}

inline Slot default_horizon(std::size_t n) {
  Slot lg = setfam::ceil_log2(std::max<std::size_t>(n, 1)) + 1;
  return 64 * static_cast<Slot>(std::max<std::size_t>(n, 1)) * lg * lg;
}

struct Delivery {
  Label receiver = 0;
  Label sender = 0;
  Message message;
  friend auto operator<=>(const Delivery&, const Delivery&) = default;
};

namespace detail {

inline void check_payload(Label v, const Action& a, ChannelMode mode) {
  if (a.kind != ActionKind::transmit) return;
  if (mode == ChannelMode::bb && a.payload.size() != 1)
    throw ContractViolation("node " + std::to_string(v) + " transmitted " + std::to_string(a.payload.size()) +
                            " messages in a bounded-bandwidth slot");
}

// sender[v] = the unique transmitting in-neighbour of a receiving v, or 0.
// `count` is scratch space of size n+1.
inline void resolve(const RadioGraph& g, const std::vector<ActionKind>& kinds, std::vector<Label>& sender,
                    std::vector<std::uint32_t>& count) {
  const std::size_t n = g.size();
  std::fill(count.begin(), count.end(), 0);
  std::fill(sender.begin(), sender.end(), 0);
  for (std::size_t u = 1; u <= n; ++u) {
    if (kinds[u] != ActionKind::transmit) continue;
    for (Label v : g.out(static_cast<Label>(u))) {
      ++count[v];
      sender[v] = static_cast<Label>(u);
    }
  }
  for (std::size_t v = 1; v <= n; ++v)
    if (kinds[v] != ActionKind::receive || count[v] != 1) sender[v] = 0;
}

}  // namespace detail

// One slot of the collision channel. `actions` is indexed by label (entry 0
// unused). Returns every (receiver, message) pair delivered, sorted.
inline std::vector<Delivery> step(const RadioGraph& g, const std::vector<Action>& actions, ChannelMode mode) {
  const std::size_t n = g.size();
  if (actions.size() != n + 1) throw std::invalid_argument("need one action per label (index 0 unused)");
  std::vector<ActionKind> kinds(n + 1, ActionKind::inactive);
  for (std::size_t v = 1; v <= n; ++v) {
    detail::check_payload(static_cast<Label>(v), actions[v], mode);
    kinds[v] = actions[v].kind;
  }
  std::vector<Label> sender(n + 1);
  std::vector<std::uint32_t> count(n + 1);
  detail::resolve(g, kinds, sender, count);
  std::vector<Delivery> out;
  for (std::size_t v = 1; v <= n; ++v) {
    if (!sender[v]) continue;
    for (const auto& m : actions[sender[v]].payload) out.push_back({static_cast<Label>(v), sender[v], m});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class StopReason { terminated, quiescent, completed, horizon };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::terminated: return "terminated";
    case StopReason::quiescent: return "quiescent";
    case StopReason::completed: return "completed";
    default: return "horizon";
  }
}

struct Transmission {
  Label sender = 0;
  std::vector<Message> payload;
  friend bool operator==(const Transmission&, const Transmission&) = default;
};

struct Reception {
  Label receiver = 0;
  Label sender = 0;
  friend bool operator==(const Reception&, const Reception&) = default;
};

struct SlotRecord {
  std::vector<ActionKind> kinds;  // kinds[v - 1]
  std::vector<Transmission> transmissions;
  std::vector<Reception> receptions;
  friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct SimTrace {
  std::size_t n = 0;
  std::vector<Message> messages;  // priority order
  bool full = false;
  std::vector<SlotRecord> slots;  // one per simulated slot when full
  // first_reception[v][i]: first slot v received messages[i]; endowments are not receptions.
  std::vector<std::vector<std::optional<Slot>>> first_reception;
  std::optional<Slot> completion;
  std::optional<Slot> termination;
  Slot slots_run = 0;
  StopReason stop = StopReason::horizon;
  std::uint64_t transmissions_total = 0;

  bool completed() const { return completion.has_value(); }

  const SlotRecord& at(Slot t) const {
    if (!full) throw std::logic_error("trace was recorded without per-slot detail");
    return slots.at(t);
  }

  std::size_t message_index(const Message& m) const {
    auto it = std::lower_bound(messages.begin(), messages.end(), m);
    if (it == messages.end() || *it != m) return messages.size();
    return static_cast<std::size_t>(it - messages.begin());
  }

  std::vector<Delivery> deliveries(Slot t) const {
    const auto& rec = at(t);
    std::vector<Delivery> out;
    for (const auto& r : rec.receptions)
      for (const auto& tx : rec.transmissions)
        if (tx.sender == r.sender)
          for (const auto& m : tx.payload) out.push_back({r.receiver, r.sender, m});
    std::sort(out.begin(), out.end());
    return out;
  }

  // Labels transmitting in slot t, ascending.
  std::vector<Label> transmitters(Slot t) const {
    std::vector<Label> out;
    for (const auto& tx : at(t).transmissions) out.push_back(tx.sender);
    return out;
  }
};

struct RunOptions {
  std::optional<Slot> max_slots;  // default_horizon(n) when absent
  bool record_slots = true;
  bool stop_on_completion = false;
  bool stop_on_quiescence = true;
  bool stop_on_termination = true;
};

inline SimTrace run(const BroadcastInstance& inst, const ProtocolSchedule& protocol, const RunOptions& opts = {}) {
  inst.validate();
  if (auto req = protocol.required_mode(); req && *req != inst.mode)
    throw ConfigurationError(protocol.name() + " requires channel mode " + to_string(*req));
  if (protocol.single_broadcast() && inst.message_count() != 1)
    throw ConfigurationError(protocol.name() + " broadcasts a single message; instance has r = " +
                             std::to_string(inst.message_count()));
  const RadioGraph& g = inst.graph;
  const std::size_t n = g.size();
  const Slot horizon = opts.max_slots.value_or(default_horizon(n));
  if (horizon == 0) throw std::invalid_argument("max_slots must be >= 1");

  SimTrace tr;
  tr.n = n;
  tr.messages = inst.messages();
  tr.full = opts.record_slots;
  const std::size_t r = tr.messages.size();
  tr.first_reception.assign(n + 1, std::vector<std::optional<Slot>>(r));

  std::vector<std::unique_ptr<NodeProgram>> prog(n + 1);
  std::vector<std::vector<bool>> known(n + 1, std::vector<bool>(r, false));
  std::vector<std::vector<bool>> owed(n + 1, std::vector<bool>(r, false));
  std::vector<bool> is_source(n + 1, false), heard(n + 1, false), dead(n + 1, false);
  std::size_t remaining = 0;
  for (std::size_t i = 0; i < r; ++i) {
    Label s = tr.messages[i].source;
    is_source[s] = true;
    known[s][i] = true;
    auto d = g.distances_from(s);
    for (std::size_t v = 1; v <= n; ++v)
      if (v != s && d[v]) {
        owed[v][i] = true;
        ++remaining;
      }
  }
  for (std::size_t v = 1; v <= n; ++v) {
    auto endow = inst.endowment(static_cast<Label>(v));
    prog[v] = protocol.spawn(static_cast<Label>(v), endow);
  }
  if (remaining == 0) tr.completion = 0;

  std::vector<Action> act(n + 1);
  std::vector<ActionKind> kinds(n + 1, ActionKind::inactive);
  std::vector<Label> sender(n + 1);
  std::vector<std::uint32_t> count(n + 1);
  std::vector<Message> payload;
  const auto window = protocol.quiescence_window();
  Slot quiet = 0;

  for (Slot t = 0; t < horizon; ++t) {
    bool all_dead = true;
    std::size_t tx_count = 0;
    for (std::size_t v = 1; v <= n; ++v) {
      Action a = prog[v]->act(t);
      if (dead[v] && a.kind != ActionKind::inactive)
        throw ContractViolation(protocol.name() + ": node " + std::to_string(v) + " left the inactive state at slot " +
                                std::to_string(t));
      if (a.kind == ActionKind::inactive) dead[v] = true;
      if (a.kind == ActionKind::transmit) {
        if (!is_source[v] && !heard[v])
          throw ContractViolation(protocol.name() + ": node " + std::to_string(v) +
                                  " transmitted before its first reception");
        detail::check_payload(static_cast<Label>(v), a, inst.mode);
        ++tx_count;
      }
      all_dead = all_dead && dead[v];
      act[v] = a;
      kinds[v] = a.kind;
    }
    if (all_dead) {
      tr.termination = t == 0 ? 0 : t - 1;
      tr.stop = StopReason::terminated;
      tr.slots_run = t;
      if (opts.stop_on_termination) return tr;
    }
    tr.transmissions_total += tx_count;
    detail::resolve(g, kinds, sender, count);

    SlotRecord rec;
    if (opts.record_slots) {
      rec.kinds.assign(kinds.begin() + 1, kinds.end());
      for (std::size_t v = 1; v <= n; ++v)
        if (kinds[v] == ActionKind::transmit)
          rec.transmissions.push_back({static_cast<Label>(v), {act[v].payload.begin(), act[v].payload.end()}});
    }
    for (std::size_t v = 1; v <= n; ++v) {
      Label u = sender[v];
      if (!u) continue;
      payload.assign(act[u].payload.begin(), act[u].payload.end());
      heard[v] = true;
      for (const auto& m : payload) {
        std::size_t i = tr.message_index(m);
        if (i == r) throw ContractViolation(protocol.name() + ": node " + std::to_string(u) + " sent an unknown message");
        if (!known[u][i]) throw ContractViolation(protocol.name() + ": node " + std::to_string(u) + " sent a message it never received");
        if (!known[v][i]) {
          known[v][i] = true;
          tr.first_reception[v][i] = t;
          if (owed[v][i] && --remaining == 0) tr.completion = t;
        }
      }
      if (opts.record_slots) rec.receptions.push_back({static_cast<Label>(v), u});
      prog[v]->on_receive(t, payload);
    }
    // Transmitters must only send what they know; known[] above covers receivers.
    if (opts.record_slots) tr.slots.push_back(std::move(rec));
    tr.slots_run = t + 1;

    if (opts.stop_on_completion && tr.completion) {
      tr.stop = StopReason::completed;
      return tr;
    }
    quiet = tx_count == 0 ? quiet + 1 : 0;
    if (window && opts.stop_on_quiescence && quiet >= *window) {
      bool idle = true;
      for (std::size_t v = 1; v <= n && idle; ++v) idle = prog[v]->idle();
      if (idle) {
        tr.stop = StopReason::quiescent;
        return tr;
      }
    }
  }
  tr.stop = StopReason::horizon;
  return tr;
}

inline std::ostream& operator<<(std::ostream& out, const Message& m) { return out << m.source << ':' << m.seq; }

// Canonical text rendering; identical traces render identically.
inline std::string to_text(const SimTrace& tr) {
  std::ostringstream out;
  auto opt = [](const std::optional<Slot>& s) { return s ? std::to_string(*s) : std::string("none"); };
  out << "TRACE n=" << tr.n << " r=" << tr.messages.size() << " slots=" << tr.slots_run
      << " completion=" << opt(tr.completion) << " termination=" << opt(tr.termination)
      << " stop=" << to_string(tr.stop) << '\n';
  for (std::size_t t = 0; t < tr.slots.size(); ++t) {
    const auto& rec = tr.slots[t];
    out << t << ' ';
    for (auto k : rec.kinds) out << (k == ActionKind::transmit ? 'T' : k == ActionKind::receive ? 'R' : '.');
    for (const auto& tx : rec.transmissions) {
      out << " tx" << tx.sender << '[';
      for (std::size_t i = 0; i < tx.payload.size(); ++i) out << (i ? "," : "") << tx.payload[i];
      out << ']';
    }
    for (const auto& rc : rec.receptions) out << " rx" << rc.receiver << '<' << rc.sender;
    out << '\n';
  }
  for (std::size_t v = 1; v <= tr.n; ++v) {
    out << "first " << v;
    for (const auto& s : tr.first_reception[v]) out << ' ' << opt(s);
    out << '\n';
  }
  return out.str();
}

}  // namespace radiobcast
