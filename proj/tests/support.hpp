#pragma once

// Shared builders, randomized instance generators, and the independent
// enumeration oracle used by the unit and acceptance suites.

#include <algorithm>
#include <set>
#include <vector>

#include "delsearch/agents.hpp"
#include "delsearch/bounds.hpp"
#include "delsearch/engine.hpp"
#include "delsearch/io.hpp"
#include "delsearch/mechanisms.hpp"
#include "delsearch/model.hpp"

namespace delsearch::testing {

struct AtomSpec {
  double x;
  long num;
  long den;
  double y = -1.0;  // < 0 means absent
};

inline Element el_finite(int owner, std::vector<AtomSpec> atoms) {
  FiniteSupport fs;
  for (const AtomSpec& a : atoms) {
    FiniteAtom atom;
    atom.x = a.x;
    atom.mass = rat(a.num, a.den);
    if (a.y >= 0.0) atom.y = a.y;
    fs.atoms.push_back(std::move(atom));
  }
  return Element{owner, OutcomeDistribution(DistributionLaw{std::move(fs)})};
}

inline Element el_uniform(int owner, double lo, double hi) {
  return Element{owner, OutcomeDistribution(DistributionLaw{Uniform{lo, hi}})};
}

inline Element el_exponential(int owner, double rate) {
  return Element{owner, OutcomeDistribution(DistributionLaw{Exponential{rate}})};
}

inline Instance make_instance(int k, Flavor flavor, std::vector<Element> elements,
                              AssignmentMode mode = AssignmentMode::fixed) {
  return Instance(k, flavor, mode, std::move(elements));
}

inline ThresholdMechanism uniform_threshold(const Instance& inst, double value,
                                            ThresholdMode mode = ThresholdMode::weak) {
  ThresholdMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.theta.assign(static_cast<std::size_t>(inst.element_count()), ThresholdEntry{value, mode});
  return mech;
}

// ---------------------------------------------------------------------------
// Independent oracle: expected principal utility via full enumeration and
// the public allocation operation (no shared path with the engine sums).

inline std::vector<Proposal> proposals_of(const Instance& inst, const StrategyProfile& profile,
                                          const TypeProfile& tp) {
  std::vector<Proposal> proposals;
  std::vector<int> own_atoms;
  for (const Strategy& s : profile.agents) {
    own_atoms.clear();
    for (int e : s.elements()) own_atoms.push_back(tp.outcomes[static_cast<std::size_t>(e)].atom);
    const AgentAction& act = s.at(s.type_index(own_atoms));
    if (act.abstain()) continue;
    int claim = act.atom;
    if (claim < 0) claim = tp.outcomes[static_cast<std::size_t>(act.element)].atom;
    proposals.push_back(Proposal{s.agent(), inst.outcome_at(act.element, claim)});
  }
  return proposals;
}

inline Rational oracle_expected_principal(const Instance& inst, const Mechanism& mech,
                                          const StrategyProfile& profile) {
  Rational total(0);
  for (const auto& [tp, mass] : enumerate_type_profiles(inst)) {
    std::optional<Outcome> winner;
    if (const auto* my = std::get_if<MyersonMechanism>(&mech))
      winner = allocate_myerson(*my, inst, tp, tp);
    else
      winner = allocate_single_proposal(mech, inst, proposals_of(inst, profile, tp), tp);
    if (winner) total += mass * rat_from_double(winner->x);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Randomized generators for the property and acceptance suites

inline Rational random_masses(Rng& rng, int count, std::vector<Rational>& out) {
  out.clear();
  std::vector<long> weights(static_cast<std::size_t>(count));
  long total = 0;
  for (auto& w : weights) {
    w = 1 + static_cast<long>(rng.below(6));
    total += w;
  }
  Rational sum(0);
  for (long w : weights) {
    out.push_back(rat(w, total));
    sum += out.back();
  }
  return sum;
}

// Agent-symmetric atomless instance: k agents, m uniform/exponential laws.
inline Instance random_atomless_symmetric(Rng& rng, int k, int m) {
  std::vector<OutcomeDistribution> laws;
  for (int j = 0; j < m; ++j) {
    if (rng.below(2) == 0) {
      double lo = static_cast<double>(rng.below(5));
      double hi = lo + 0.5 + static_cast<double>(rng.below(10));
      laws.emplace_back(DistributionLaw{Uniform{lo, hi}});
    } else {
      double rate = 0.25 + 0.25 * static_cast<double>(rng.below(8));
      laws.emplace_back(DistributionLaw{Exponential{rate}});
    }
  }
  std::vector<Element> elements;
  for (int i = 1; i <= k; ++i)
    for (int j = 0; j < m; ++j) elements.push_back(Element{i, laws[static_cast<std::size_t>(j)]});
  return Instance(k, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

// One random finite law with `atoms` outcomes on a small grid.
inline OutcomeDistribution random_finite_law(Rng& rng, int atoms, bool with_y) {
  FiniteSupport fs;
  std::vector<Rational> masses;
  random_masses(rng, atoms, masses);
  for (int a = 0; a < atoms; ++a) {
    FiniteAtom atom;
    atom.x = 0.5 * static_cast<double>(rng.below(17));  // 0, 0.5, ..., 8
    atom.mass = masses[static_cast<std::size_t>(a)];
    if (with_y) atom.y = 0.25 * static_cast<double>(rng.below(21));
    fs.atoms.push_back(std::move(atom));
  }
  return OutcomeDistribution(DistributionLaw{std::move(fs)});
}

// Agent-symmetric finite adversarial instance (per-position identical laws).
inline Instance random_finite_symmetric(Rng& rng, int k, int m, int max_atoms) {
  std::vector<OutcomeDistribution> laws;
  for (int j = 0; j < m; ++j)
    laws.push_back(random_finite_law(rng, 2 + static_cast<int>(rng.below(
                                              static_cast<std::uint64_t>(max_atoms - 1))),
                                     false));
  std::vector<Element> elements;
  for (int i = 1; i <= k; ++i)
    for (int j = 0; j < m; ++j) elements.push_back(Element{i, laws[static_cast<std::size_t>(j)]});
  return Instance(k, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

// Fully-symmetric finite adversarial instance (one law everywhere).
inline Instance random_fully_symmetric(Rng& rng, int k, int m, int atoms) {
  OutcomeDistribution law = random_finite_law(rng, atoms, false);
  std::vector<Element> elements;
  for (int i = 1; i <= k; ++i)
    for (int j = 0; j < m; ++j) elements.push_back(Element{i, law});
  return Instance(k, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

// Small strategic instance, not necessarily symmetric.
inline Instance random_strategic(Rng& rng, int k, int m, int max_atoms) {
  std::vector<Element> elements;
  for (int i = 1; i <= k; ++i)
    for (int j = 0; j < m; ++j)
      elements.push_back(Element{
          i, random_finite_law(rng, 2 + static_cast<int>(rng.below(
                                        static_cast<std::uint64_t>(max_atoms - 1))),
                               true)});
  return Instance(k, Flavor::strategic, AssignmentMode::fixed, std::move(elements));
}

// Random per-element thresholds over the observed support values. When
// above_min is set every threshold rejects the element's least value, so
// all-unacceptable types have positive probability for every agent.
inline ThresholdMechanism random_threshold_mechanism(Rng& rng, const Instance& inst,
                                                     bool above_min) {
  ThresholdMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.theta.resize(static_cast<std::size_t>(inst.element_count()));
  for (int e = 0; e < inst.element_count(); ++e) {
    const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
    std::vector<double> xs;
    for (const auto& a : fs->atoms) xs.push_back(a.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    ThresholdEntry entry;
    entry.mode = rng.below(2) == 0 ? ThresholdMode::weak : ThresholdMode::strict;
    if (above_min) {
      // strictly above the minimum, or strict at it
      if (xs.size() == 1 || rng.below(3) == 0) {
        entry.value = xs.front();
        entry.mode = ThresholdMode::strict;
      } else {
        entry.value = xs[1 + rng.below(xs.size() - 1)];
        if (entry.value == xs.front()) entry.mode = ThresholdMode::strict;
      }
    } else {
      entry.value = xs[rng.below(xs.size())] - (rng.below(2) == 0 ? 0.0 : 0.25);
    }
    mech.theta[static_cast<std::size_t>(e)] = entry;
  }
  return mech;
}

// Monotone piecewise-linear virtual values with breakpoints on the support,
// possibly negative on the left. Every (element, support value) receives a
// globally distinct virtual value: exact cross-agent ties flip the winner
// selection between its tied and untied cases and break truthfulness, so the
// randomized family stays in generic position.
inline MyersonMechanism random_myerson(Rng& rng, const Instance& inst) {
  MyersonMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.phi.resize(static_cast<std::size_t>(inst.element_count()));
  std::set<long> used;  // virtual values in eighths
  auto draw_distinct = [&]() {
    for (;;) {
      long v = -16 + static_cast<long>(rng.below(81));  // [-2, 8] on a 1/8 grid
      if (used.insert(v).second) return v;
    }
  };
  for (int e = 0; e < inst.element_count(); ++e) {
    const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
    std::vector<double> xs;
    for (const auto& a : fs->atoms) xs.push_back(a.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<long> vals;
    for (std::size_t i = 0; i < xs.size(); ++i) vals.push_back(draw_distinct());
    std::sort(vals.begin(), vals.end());
    PiecewiseLinearFn fn;
    for (std::size_t i = 0; i < xs.size(); ++i)
      fn.points.push_back({xs[i], static_cast<double>(vals[i]) / 8.0});
    mech.phi[static_cast<std::size_t>(e)] = std::move(fn);
  }
  return mech;
}

// Finite pool of unowned elements for the shuffled constructions.
inline Instance random_pool(Rng& rng, int n, int max_atoms, int k) {
  std::vector<Element> elements;
  for (int e = 0; e < n; ++e)
    elements.push_back(Element{
        0, random_finite_law(rng, 2 + static_cast<int>(rng.below(
                                      static_cast<std::uint64_t>(max_atoms - 1))),
                             false)});
  return Instance(k, Flavor::adversarial, AssignmentMode::shuffled, std::move(elements));
}

}  // namespace delsearch::testing
