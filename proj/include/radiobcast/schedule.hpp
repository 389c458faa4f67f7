#pragma once

// The contract between the simulator and a protocol. A protocol spawns one
// NodeProgram per label; a program sees its own label, the slot number, its
// initial endowment and the payloads delivered to it, and nothing else.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "radiobcast/errors.hpp"
#include "radiobcast/label_set.hpp"

namespace radiobcast {

// Identity of a broadcast message: h-th message of source l. The priority
// order is (l, h) lexicographic, lower pairs first.
struct Message {
  Label source = 0;
  std::uint32_t seq = 0;
  friend auto operator<=>(const Message&, const Message&) = default;
};

enum class ChannelMode { bb, ub };

inline std::string to_string(ChannelMode m) { return m == ChannelMode::bb ? "bb" : "ub"; }

enum class ActionKind : std::uint8_t { inactive, receive, transmit };

// The payload span points into the acting program's storage and stays valid
// until that program's next call.
struct Action {
  ActionKind kind = ActionKind::receive;
  std::span<const Message> payload;

  static Action inactive() { return {ActionKind::inactive, {}}; }
  static Action receive() { return {ActionKind::receive, {}}; }
  static Action transmit(std::span<const Message> p) { return {ActionKind::transmit, p}; }
};

class NodeProgram {
 public:
  virtual ~NodeProgram() = default;
  virtual Action act(Slot t) = 0;
  // Called only for successful receptions (exactly one transmitting in-neighbour).
  virtual void on_receive(Slot t, std::span<const Message> payload) = 0;
  // Nothing queued and nothing left to send; used by quiescence detection.
  virtual bool idle() const { return false; }
};

class ProtocolSchedule {
 public:
  virtual ~ProtocolSchedule() = default;

  virtual std::string name() const = 0;
  virtual std::unique_ptr<NodeProgram> spawn(Label v, std::span<const Message> endowment) const = 0;

  // Oblivious schedules can list, for any slot, the labels that transmit in
  // it if informed and still active.
  virtual bool oblivious() const { return false; }
  virtual LabelSet transmit_set(Slot /*t*/, std::size_t /*n*/) const {
    throw ContractViolation(name() + " is not oblivious");
  }

  // Protocol-level phase of a slot, when the protocol has phases.
  virtual std::optional<std::uint64_t> phase_of(Slot /*t*/) const { return std::nullopt; }

  // Nodes eventually go permanently inactive on their own.
  virtual bool self_terminating() const { return false; }

  // Slots without any transmission (all programs idle) after which a run may
  // stop even though nodes never deactivate.
  virtual std::optional<Slot> quiescence_window() const { return std::nullopt; }

  virtual std::optional<ChannelMode> required_mode() const { return std::nullopt; }

  // Disseminates one source message only (r = 1).
  virtual bool single_broadcast() const { return false; }

  // Size of the set family driving the schedule (0 when none).
  virtual std::size_t family_size() const { return 0; }
};

}  // namespace radiobcast
