#include "delsearch/agents.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace delsearch {

namespace {

void require_adversarial(const Instance& inst) {
  if (inst.flavor() != Flavor::adversarial)
    fail(Errc::model_violation, "StrategicFlavor",
         "adversarial behavior is defined for adversarial-flavor instances");
}

void require_strategic(const Instance& inst) {
  if (inst.flavor() != Flavor::strategic)
    fail(Errc::model_violation, "AdversarialFlavor",
         "strategic behavior is defined for strategic-flavor instances");
}

// Outcome id order within one agent: (element position, atom index).
bool id_before(const Instance& inst, int elem_a, int atom_a, int elem_b, int atom_b) {
  int pa = inst.owner_position(elem_a), pb = inst.owner_position(elem_b);
  if (pa != pb) return pa < pb;
  return atom_a < atom_b;
}

// Acceptable observed outcomes of one type, ascending by (x, id).
struct Observed {
  int element;
  int atom;  // -1 for atomless draws
  double x;
};

std::vector<Observed> acceptable_observed(const Instance& inst, const Mechanism& mech,
                                          std::span<const Outcome> own_type) {
  std::vector<Observed> acc;
  for (const Outcome& o : own_type)
    if (acceptable(mech, inst, o)) acc.push_back({o.element, o.atom, o.x});
  std::sort(acc.begin(), acc.end(), [&](const Observed& a, const Observed& b) {
    if (a.x != b.x) return a.x < b.x;
    return id_before(inst, a.element, a.atom, b.element, b.atom);
  });
  return acc;
}

StrategyProfile pessimistic_profile(const Instance& inst, const Mechanism& mech) {
  StrategyProfile profile = empty_profile(inst);
  std::vector<int> own_atoms;
  std::vector<Outcome> own_type;
  for (int i = 1; i <= inst.k(); ++i) {
    Strategy& s = profile.of(i);
    for (std::uint64_t t = 0; t < s.type_count(); ++t) {
      s.type_atoms(t, own_atoms);
      own_type.clear();
      for (std::size_t j = 0; j < s.elements().size(); ++j)
        own_type.push_back(inst.outcome_at(s.elements()[j], own_atoms[j]));
      auto acc = acceptable_observed(inst, mech, own_type);
      s.at(t) = acc.empty() ? AgentAction{} : AgentAction{acc.front().element, -1};
    }
  }
  return profile;
}

}  // namespace

AgentAction adversarial_propose(const Instance& inst, const Mechanism& mech, int agent,
                                std::span<const Outcome> own_type, AdversarialMode mode) {
  require_adversarial(inst);
  if (mode == AdversarialMode::constrained) {
    // Constrained behavior is a property of the whole profile; read the
    // fixpoint's action for this type.
    auto res = adversarial_profile(inst, mech, AdversarialMode::constrained);
    const Strategy& s = res.profile.of(agent);
    std::vector<int> own_atoms(own_type.size());
    for (std::size_t j = 0; j < own_type.size(); ++j) own_atoms[j] = own_type[j].atom;
    return s.at(s.type_index(own_atoms));
  }
  auto acc = acceptable_observed(inst, mech, own_type);
  if (acc.empty()) return AgentAction{};
  return AgentAction{acc.front().element, -1};
}

AdversarialProfileResult adversarial_profile(const Instance& inst, const Mechanism& mech,
                                             AdversarialMode mode) {
  require_adversarial(inst);
  AdversarialProfileResult res;
  res.profile = pessimistic_profile(inst, mech);
  if (mode == AdversarialMode::pessimistic) return res;

  // Constrained: escalate any zero-win-probability proposal to the next
  // acceptable observed outcome that can still win, until stable. Each
  // escalation moves a type's pointer up its finite acceptable list.
  std::vector<int> own_atoms;
  std::vector<Outcome> own_type;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 1; i <= inst.k(); ++i) {
      Strategy& s = res.profile.of(i);
      for (std::uint64_t t = 0; t < s.type_count(); ++t) {
        AgentAction cur = s.at(t);
        if (cur.abstain()) continue;
        if (win_probability(inst, mech, res.profile, i, t, cur) > 0) continue;
        s.type_atoms(t, own_atoms);
        own_type.clear();
        for (std::size_t j = 0; j < s.elements().size(); ++j)
          own_type.push_back(inst.outcome_at(s.elements()[j], own_atoms[j]));
        auto acc = acceptable_observed(inst, mech, own_type);
        std::size_t pos = 0;
        while (pos < acc.size() && acc[pos].element != cur.element) ++pos;
        AgentAction next{};  // abstain unless something above can win
        for (std::size_t j = pos + 1; j < acc.size(); ++j) {
          AgentAction cand{acc[j].element, -1};
          if (win_probability(inst, mech, res.profile, i, t, cand) > 0) {
            next = cand;
            break;
          }
        }
        s.at(t) = next;
        ++res.escalations;
        if (next.abstain()) res.zero_win_abstention = true;
        changed = true;
      }
    }
  }
  return res;
}

namespace {

// Expected principal utility when `agent` plays `action` at `type_index`
// against the others' marginals: E[max(others' winner, own accepted x)].
Rational expected_principal_given_action(const Instance& inst, const Mechanism& mech,
                                         const std::vector<ProposalMarginal>& others,
                                         int agent, const Strategy& mine,
                                         std::uint64_t type_index, const AgentAction& action) {
  (void)agent;
  double own_x = -1.0;
  bool own_live = false;
  if (!action.abstain()) {
    std::vector<int> own_atoms;
    mine.type_atoms(type_index, own_atoms);
    int pos = -1;
    for (std::size_t j = 0; j < mine.elements().size(); ++j)
      if (mine.elements()[j] == action.element) pos = static_cast<int>(j);
    const int realized = own_atoms[static_cast<std::size_t>(pos)];
    const int claim = action.atom >= 0 ? action.atom : realized;
    if (claim == realized) {
      Outcome o = inst.outcome_at(action.element, claim);
      if (acceptable(mech, inst, o)) {
        own_x = o.x;
        own_live = true;
      }
    }
  }
  std::set<double> values;
  for (const auto& m : others)
    for (const auto& e : m.entries) values.insert(e.x);
  Rational total(0), covered(0);
  for (double v : values) {
    Rational le(1), lt(1);
    for (const auto& m : others) {
      le *= m.none + m.at_most(v);
      lt *= m.none + m.below(v);
    }
    Rational pv = le - lt;
    double result = own_live ? std::max(v, own_x) : v;
    total += rat_from_double(result) * pv;
    covered += pv;
  }
  if (own_live) total += rat_from_double(own_x) * (Rational(1) - covered);
  return total;
}

struct ActionEval {
  AgentAction action;
  Rational expected_y;
};

// All candidate actions (one honest proposal per element, plus abstain).
std::vector<AgentAction> candidate_actions(const Strategy& s) {
  std::vector<AgentAction> out;
  out.reserve(s.elements().size() + 1);
  for (int e : s.elements()) out.push_back(AgentAction{e, -1});
  out.push_back(AgentAction{});
  return out;
}

Rational expected_y_of(const Instance& inst, const Mechanism& mech, const TieOrder& tie,
                       const std::vector<ProposalMarginal>& others, const Strategy& mine,
                       std::uint64_t type_index, const AgentAction& action,
                       std::vector<int>& own_atoms) {
  if (action.abstain()) return Rational(0);
  mine.type_atoms(type_index, own_atoms);
  int pos = -1;
  for (std::size_t j = 0; j < mine.elements().size(); ++j)
    if (mine.elements()[j] == action.element) pos = static_cast<int>(j);
  const int realized = own_atoms[static_cast<std::size_t>(pos)];
  const int claim = action.atom >= 0 ? action.atom : realized;
  if (claim != realized) return Rational(0);  // a detected lie pays nothing
  Outcome o = inst.outcome_at(action.element, claim);
  if (!acceptable(mech, inst, o)) return Rational(0);
  if (!o.y || *o.y == 0.0) return Rational(0);
  Rational q(1);
  for (const auto& m : others) q *= m.losing_mass(o.x, tie.rank[action.element], tie);
  return rat_from_double(*o.y) * q;
}

// Action order for the final deterministic tiebreak: proposals by outcome
// id, abstain last.
bool action_id_before(const Instance& inst, const Strategy& mine, std::uint64_t type_index,
                      const AgentAction& a, const AgentAction& b) {
  if (a.abstain() != b.abstain()) return !a.abstain();
  if (a.abstain()) return false;
  std::vector<int> own_atoms;
  mine.type_atoms(type_index, own_atoms);
  auto atom_of = [&](const AgentAction& act) {
    for (std::size_t j = 0; j < mine.elements().size(); ++j)
      if (mine.elements()[j] == act.element) return own_atoms[j];
    return -1;
  };
  return id_before(inst, a.element, atom_of(a), b.element, atom_of(b));
}

}  // namespace

Strategy best_response(const Instance& inst, const Mechanism& mech, int agent,
                       const StrategyProfile& others, std::uint64_t cap) {
  require_strategic(inst);
  Strategy mine(inst, agent);
  if (mine.type_count() > cap)
    fail(Errc::cap_exceeded, "CapExceeded", "agent type space exceeds cap");
  const TieOrder& tie = tie_order(mech);
  std::vector<ProposalMarginal> other_marginals;
  for (int j = 1; j <= inst.k(); ++j)
    if (j != agent) other_marginals.push_back(proposal_marginal(inst, mech, others.of(j)));

  std::vector<int> own_atoms;
  const auto actions = candidate_actions(mine);
  for (std::uint64_t t = 0; t < mine.type_count(); ++t) {
    AgentAction best{};
    Rational best_y(-1);
    Rational best_principal(0);
    bool have = false;
    for (const AgentAction& a : actions) {
      Rational ey = expected_y_of(inst, mech, tie, other_marginals, mine, t, a, own_atoms);
      if (!have || ey > best_y) {
        best = a;
        best_y = ey;
        best_principal =
            expected_principal_given_action(inst, mech, other_marginals, agent, mine, t, a);
        have = true;
        continue;
      }
      if (ey == best_y) {
        Rational ep = expected_principal_given_action(inst, mech, other_marginals, agent, mine, t, a);
        if (ep > best_principal ||
            (ep == best_principal && action_id_before(inst, mine, t, a, best))) {
          best = a;
          best_principal = ep;
        }
      }
    }
    mine.at(t) = best;
  }
  return mine;
}

namespace {

// Decodes a strategy index (mixed radix over types, action count per type)
// into an action table.
void decode_strategy(const std::vector<AgentAction>& actions, std::uint64_t index, Strategy& s) {
  const std::uint64_t base = actions.size();
  for (std::uint64_t t = s.type_count(); t-- > 0;) {
    s.at(t) = actions[static_cast<std::size_t>(index % base)];
    index /= base;
  }
}

}  // namespace

EquilibriumResult find_principal_best_equilibrium(const Instance& inst, const Mechanism& mech,
                                                  std::uint64_t cap) {
  require_strategic(inst);
  const int k = inst.k();
  StrategyProfile profile = empty_profile(inst);
  std::vector<std::vector<AgentAction>> actions(static_cast<std::size_t>(k));
  std::vector<std::uint64_t> space(static_cast<std::size_t>(k));
  long double total = 1.0L;
  for (int i = 1; i <= k; ++i) {
    actions[i - 1] = candidate_actions(profile.of(i));
    long double s = std::pow(static_cast<long double>(actions[i - 1].size()),
                             static_cast<long double>(profile.of(i).type_count()));
    total *= s;
    if (total > static_cast<long double>(cap))
      fail(Errc::cap_exceeded, "CapExceeded", "pure strategy profile space exceeds cap");
    space[i - 1] = static_cast<std::uint64_t>(s);
  }

  const TieOrder& tie = tie_order(mech);
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(k), 0);
  for (int i = 1; i <= k; ++i) decode_strategy(actions[i - 1], 0, profile.of(i));

  EquilibriumResult best;
  bool found = false;
  std::vector<int> own_atoms;
  std::vector<ProposalMarginal> marginals(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) marginals[i - 1] = proposal_marginal(inst, mech, profile.of(i));

  std::vector<Rational> eys;
  while (true) {
    ++best.profiles_checked;

    bool is_equilibrium = true;
    for (int i = 1; i <= k && is_equilibrium; ++i) {
      std::vector<ProposalMarginal> others;
      others.reserve(static_cast<std::size_t>(k) - 1);
      for (int j = 1; j <= k; ++j)
        if (j != i) others.push_back(marginals[j - 1]);
      const Strategy& mine = profile.of(i);
      const auto& acts = actions[i - 1];
      for (std::uint64_t t = 0; t < mine.type_count() && is_equilibrium; ++t) {
        const AgentAction cur = mine.at(t);
        // cur must maximize expected y, and maximize expected principal
        // utility among the y-maximal actions (ties toward the principal).
        eys.clear();
        std::size_t cur_pos = acts.size();
        Rational max_y(0);
        for (std::size_t a = 0; a < acts.size(); ++a) {
          eys.push_back(expected_y_of(inst, mech, tie, others, mine, t, acts[a], own_atoms));
          if (eys.back() > max_y) max_y = eys.back();
          if (acts[a] == cur) cur_pos = a;
        }
        if (eys[cur_pos] < max_y) {
          is_equilibrium = false;
          break;
        }
        std::size_t tied = 0;
        for (const Rational& ey : eys)
          if (ey == max_y) ++tied;
        if (tied > 1) {
          Rational cur_p =
              expected_principal_given_action(inst, mech, others, i, mine, t, cur);
          for (std::size_t a = 0; a < acts.size(); ++a) {
            if (a == cur_pos || eys[a] != max_y) continue;
            Rational ep =
                expected_principal_given_action(inst, mech, others, i, mine, t, acts[a]);
            if (ep > cur_p) {
              is_equilibrium = false;
              break;
            }
          }
        }
      }
    }

    if (is_equilibrium) {
      ++best.equilibria_found;
      Rational value = expected_winner_x(inst, mech, marginals);
      if (!found || value > best.expected_principal) {
        best.expected_principal = value;
        best.profile = profile;
        found = true;
      }
    }

    // odometer over strategy indices, agent k fastest; refresh the
    // marginals of every agent whose strategy changed
    int pos = k - 1;
    while (pos >= 0) {
      if (++idx[pos] < space[pos]) {
        decode_strategy(actions[pos], idx[pos], profile.of(pos + 1));
        marginals[pos] = proposal_marginal(inst, mech, profile.of(pos + 1));
        break;
      }
      idx[pos] = 0;
      decode_strategy(actions[pos], 0, profile.of(pos + 1));
      marginals[pos] = proposal_marginal(inst, mech, profile.of(pos + 1));
      --pos;
    }
    if (pos < 0) break;
  }

  if (!found)
    fail(Errc::no_pure_equilibrium, "NoPureEquilibrium",
         "no pure strategy profile passes the best-response check");
  return best;
}

// ---------------------------------------------------------------------------
// Analogous instances

Instance build_analogous_adversarial(const Instance& strategic) {
  require_strategic(strategic);
  std::vector<Element> elements = strategic.elements();
  for (Element& el : elements) {
    if (const auto* fs = el.distribution.finite()) {
      FiniteSupport copy = *fs;
      for (auto& a : copy.atoms) a.y.reset();
      el.distribution = OutcomeDistribution(DistributionLaw{std::move(copy)});
    }
  }
  return Instance(strategic.k(), Flavor::adversarial, strategic.assignment_mode(),
                  std::move(elements));
}

Instance build_analogous_strategic(const Instance& adversarial) {
  require_adversarial(adversarial);
  if (!adversarial.all_finite())
    fail(Errc::model_violation, "NotFiniteSupport",
         "the y-value construction needs finite supports");
  if (!adversarial.fully_symmetric())
    fail(Errc::model_violation, "NotFullySymmetric",
         "the y-value construction needs a fully-symmetric instance");

  const int k = adversarial.k();
  const auto& first_agent = adversarial.elements_of(1);
  if (first_agent.empty())
    fail(Errc::model_violation, "NoElements", "agents own no elements");
  const std::size_t m = first_agent.size();

  // Label agent 1's outcomes by ascending (x, id); every agent mirrors it.
  struct Labeled {
    int pos;   // element position within the agent
    int atom;  // support index
    double x;
  };
  std::vector<Labeled> labels;
  for (std::size_t j = 0; j < m; ++j) {
    const auto* fs = adversarial.elements()[static_cast<std::size_t>(first_agent[j])]
                         .distribution.finite();
    for (std::size_t a = 0; a < fs->atoms.size(); ++a)
      labels.push_back({static_cast<int>(j), static_cast<int>(a), fs->atoms[a].x});
  }
  std::sort(labels.begin(), labels.end(), [](const Labeled& a, const Labeled& b) {
    if (a.x != b.x) return a.x < b.x;
    if (a.pos != b.pos) return a.pos < b.pos;
    return a.atom < b.atom;
  });

  // P: all other agents observe only copies of omega_1. omega_1's copy in
  // any element is the atom at its support index (all laws are identical).
  const int omega1_atom = labels.front().atom;
  Rational mass1 = adversarial.elements()[static_cast<std::size_t>(first_agent[0])]
                       .distribution.finite()
                       ->atoms[static_cast<std::size_t>(omega1_atom)]
                       .mass;
  Rational p_all = pow_rat(mass1, static_cast<unsigned>((k - 1) * static_cast<int>(m)));
  if (p_all == 0)
    fail(Errc::model_violation, "ZeroP", "the all-least-outcome event has zero probability");
  const Rational half_p = p_all / 2;

  // y by label index, shared across agents by symmetry.
  std::vector<std::vector<double>> y_by_pos(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto* fs = adversarial.elements()[static_cast<std::size_t>(first_agent[j])]
                         .distribution.finite();
    y_by_pos[j].assign(fs->atoms.size(), 0.0);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Labeled& L = labels[i];
    y_by_pos[static_cast<std::size_t>(L.pos)][static_cast<std::size_t>(L.atom)] =
        to_double(pow_rat(half_p, static_cast<unsigned>(i + 1)));
  }

  std::vector<Element> elements = adversarial.elements();
  for (int e = 0; e < adversarial.element_count(); ++e) {
    const int pos = adversarial.owner_position(e);
    const auto* fs = elements[static_cast<std::size_t>(e)].distribution.finite();
    FiniteSupport copy = *fs;
    for (std::size_t a = 0; a < copy.atoms.size(); ++a)
      copy.atoms[a].y = y_by_pos[static_cast<std::size_t>(pos)][a];
    elements[static_cast<std::size_t>(e)].distribution =
        OutcomeDistribution(DistributionLaw{std::move(copy)});
  }
  return Instance(k, Flavor::strategic, adversarial.assignment_mode(), std::move(elements));
}

}  // namespace delsearch
