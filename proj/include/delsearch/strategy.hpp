#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "delsearch/model.hpp"

namespace delsearch {

// One move of one agent at one type. element == -1 abstains. atom == -1
// proposes the element's realized outcome (honest); an explicit atom makes a
// possibly-false claim, which the allocation rules detect and zero out.
struct AgentAction {
  int element = -1;
  int atom = -1;

  bool abstain() const { return element < 0; }
  friend bool operator==(const AgentAction&, const AgentAction&) = default;
};

// Per-type action table for one agent with finite supports. Types are
// indexed mixed-radix over the agent's elements in instance order, first
// element most significant.
class Strategy {
 public:
  Strategy() = default;
  Strategy(const Instance& inst, int agent);

  int agent() const { return agent_; }
  std::uint64_t type_count() const { return actions_.empty() ? 1 : actions_.size(); }
  const std::vector<int>& elements() const { return elems_; }

  AgentAction& at(std::uint64_t type_index) { return actions_[type_index]; }
  const AgentAction& at(std::uint64_t type_index) const { return actions_[type_index]; }

  // own_atoms: one support index per owned element, in instance order.
  std::uint64_t type_index(std::span<const int> own_atoms) const;
  void type_atoms(std::uint64_t type_index, std::vector<int>& own_atoms) const;
  // Type index from a full per-element atom vector.
  std::uint64_t type_index_from_profile(std::span<const int> profile_atoms) const;

  // Exact probability of a type under the product law.
  Rational type_mass(const Instance& inst, std::uint64_t type_index) const;

 private:
  int agent_ = 0;
  std::vector<int> elems_;    // owned element indices
  std::vector<int> radices_;  // support sizes
  std::vector<AgentAction> actions_;
};

struct StrategyProfile {
  std::vector<Strategy> agents;  // agents[i-1] for agent i

  const Strategy& of(int agent) const { return agents[static_cast<std::size_t>(agent) - 1]; }
  Strategy& of(int agent) { return agents[static_cast<std::size_t>(agent) - 1]; }
};

StrategyProfile empty_profile(const Instance& inst);

}  // namespace delsearch
