#include "delsearch/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace delsearch {

TieOrder TieOrder::from_order(std::vector<int> order) {
  TieOrder t;
  t.order = std::move(order);
  int n = 0;
  for (int e : t.order) n = std::max(n, e + 1);
  t.rank.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < t.order.size(); ++i) t.rank[t.order[i]] = static_cast<int>(i);
  return t;
}

TieOrder TieOrder::default_order(const Instance& inst) {
  std::vector<int> order(static_cast<std::size_t>(inst.element_count()));
  for (int e = 0; e < inst.element_count(); ++e) order[e] = e;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    int oa = inst.elements()[a].owner, ob = inst.elements()[b].owner;
    if (oa != ob) return oa < ob;
    return inst.owner_position(a) < inst.owner_position(b);
  });
  return from_order(std::move(order));
}

const TieOrder& tie_order(const Mechanism& mech) {
  return std::visit([](const auto& m) -> const TieOrder& { return m.tie; }, mech);
}

double PiecewiseLinearFn::operator()(double x) const {
  if (points.empty()) return x;  // identity when unspecified
  if (x <= points.front().first) return points.front().second;
  if (x >= points.back().first) return points.back().second;
  auto it = std::upper_bound(points.begin(), points.end(), x,
                             [](double a, const std::pair<double, double>& b) { return a < b.first; });
  const auto& [x1, v1] = *it;
  const auto& [x0, v0] = *(it - 1);
  if (x1 == x0) return v0;
  return v0 + (v1 - v0) * (x - x0) / (x1 - x0);
}

namespace {

void check_element(const Instance& inst, const Outcome& o, std::size_t table_size) {
  if (o.element < 0 || o.element >= inst.element_count() || static_cast<std::size_t>(o.element) >= table_size)
    fail(Errc::model_violation, "UnknownElement", "outcome references an element the mechanism does not cover");
}

}  // namespace

bool acceptable(const ThresholdMechanism& mech, const Instance& inst, const Outcome& o) {
  check_element(inst, o, mech.theta.size());
  const ThresholdEntry& t = mech.theta[static_cast<std::size_t>(o.element)];
  return t.mode == ThresholdMode::weak ? o.x >= t.value : o.x > t.value;
}

bool acceptable(const SingleProposalMechanism& mech, const Instance& inst, const Outcome& o) {
  check_element(inst, o, mech.accept.size());
  const AcceptanceSet& s = mech.accept[static_cast<std::size_t>(o.element)];
  if (s.extensional) {
    if (o.atom < 0 || static_cast<std::size_t>(o.atom) >= s.atoms.size()) return false;
    return s.atoms[static_cast<std::size_t>(o.atom)] != 0;
  }
  return s.strict ? o.x > s.min_x : o.x >= s.min_x;
}

bool acceptable(const Mechanism& mech, const Instance& inst, const Outcome& o) {
  if (const auto* t = std::get_if<ThresholdMechanism>(&mech)) return acceptable(*t, inst, o);
  if (const auto* s = std::get_if<SingleProposalMechanism>(&mech)) return acceptable(*s, inst, o);
  fail(Errc::model_violation, "NotSingleProposalFamily",
       "Myerson mechanisms have no per-outcome acceptance sets");
}

std::optional<Outcome> allocate_single_proposal(const Mechanism& mech, const Instance& inst,
                                                std::span<const Proposal> proposals,
                                                const TypeProfile& truth) {
  const TieOrder& tie = tie_order(mech);
  std::set<int> agents_seen;
  const Proposal* best = nullptr;
  for (const Proposal& p : proposals) {
    if (!agents_seen.insert(p.agent).second)
      fail(Errc::model_violation, "DuplicateProposal",
           "agent " + std::to_string(p.agent) + " proposed more than once");
    if (!acceptable(mech, inst, p.claimed)) continue;
    if (best == nullptr || p.claimed.x > best->claimed.x ||
        (p.claimed.x == best->claimed.x &&
         tie.rank[p.claimed.element] < tie.rank[best->claimed.element]))
      best = &p;
  }
  if (best == nullptr) return std::nullopt;
  const Outcome& actual = truth.outcomes[static_cast<std::size_t>(best->claimed.element)];
  if (!same_outcome(best->claimed, actual)) return std::nullopt;  // lie detected
  return actual;
}

std::optional<Outcome> allocate_myerson(const MyersonMechanism& mech, const Instance& inst,
                                        const TypeProfile& reported, const TypeProfile& truth) {
  const int n = inst.element_count();
  if (static_cast<int>(reported.outcomes.size()) != n ||
      static_cast<int>(truth.outcomes.size()) != n)
    fail(Errc::model_violation, "IncompleteReport", "reported type must cover every element");

  const int k = inst.k();
  std::vector<double> agent_best(static_cast<std::size_t>(k), -std::numeric_limits<double>::infinity());
  std::vector<double> virt(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    virt[e] = mech.phi[static_cast<std::size_t>(e)](reported.outcomes[static_cast<std::size_t>(e)].x);
    int owner = inst.elements()[e].owner;
    if (owner >= 1) agent_best[owner - 1] = std::max(agent_best[owner - 1], virt[e]);
  }
  double v_star = -std::numeric_limits<double>::infinity();
  for (double v : agent_best) v_star = std::max(v_star, v);
  if (v_star < 0) return std::nullopt;

  int winners = 0, i_star = 0;
  for (int i = 1; i <= k; ++i)
    if (agent_best[i - 1] == v_star) {
      ++winners;
      i_star = i;
    }

  int chosen = -1;
  if (winners > 1) {
    // Tied top virtual value: the earliest such element in the tie order.
    for (int e : mech.tie.order)
      if (virt[e] == v_star) {
        chosen = e;
        break;
      }
  } else {
    // Unique winner: their best-y outcome with nonnegative virtual value
    // strictly above every other agent's best; ties by tie order.
    double tau = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= k; ++i)
      if (i != i_star) tau = std::max(tau, agent_best[i - 1]);
    double best_y = -1.0;
    for (int e : mech.tie.order) {
      if (inst.elements()[e].owner != i_star) continue;
      if (virt[e] < 0 || !(virt[e] > tau)) continue;
      double y = reported.outcomes[static_cast<std::size_t>(e)].y.value_or(0.0);
      if (chosen < 0 || y > best_y) {
        chosen = e;
        best_y = y;
      }
    }
  }
  if (chosen < 0) return std::nullopt;
  const Outcome& claim = reported.outcomes[static_cast<std::size_t>(chosen)];
  const Outcome& actual = truth.outcomes[static_cast<std::size_t>(chosen)];
  if (!same_outcome(claim, actual)) return std::nullopt;  // lie detected
  return actual;
}

SingleProposalMechanism threshold_as_single_proposal(const ThresholdMechanism& mech,
                                                     const Instance& inst) {
  SingleProposalMechanism out;
  out.tie = mech.tie;
  out.accept.reserve(static_cast<std::size_t>(inst.element_count()));
  for (int e = 0; e < inst.element_count(); ++e) {
    const ThresholdEntry& t = mech.theta[static_cast<std::size_t>(e)];
    if (const auto* fs = inst.elements()[e].distribution.finite()) {
      std::vector<char> mask(fs->atoms.size(), 0);
      for (std::size_t a = 0; a < fs->atoms.size(); ++a) {
        double x = fs->atoms[a].x;
        mask[a] = (t.mode == ThresholdMode::weak ? x >= t.value : x > t.value) ? 1 : 0;
      }
      out.accept.push_back(AcceptanceSet::outcomes(std::move(mask)));
    } else {
      out.accept.push_back(AcceptanceSet::interval(t.value, t.mode == ThresholdMode::strict));
    }
  }
  return out;
}

bool element_symmetric(const ThresholdMechanism& mech, const Instance& inst) {
  for (int i = 1; i <= inst.k(); ++i) {
    const auto& elems = inst.elements_of(i);
    for (std::size_t j = 1; j < elems.size(); ++j) {
      const auto& a = mech.theta[static_cast<std::size_t>(elems[0])];
      const auto& b = mech.theta[static_cast<std::size_t>(elems[j])];
      if (a.value != b.value || a.mode != b.mode) return false;
    }
  }
  return true;
}

bool agent_symmetric(const ThresholdMechanism& mech, const Instance& inst) {
  const auto& first = inst.elements_of(1);
  for (int i = 2; i <= inst.k(); ++i) {
    const auto& elems = inst.elements_of(i);
    if (elems.size() != first.size()) return false;
    for (std::size_t j = 0; j < elems.size(); ++j) {
      const auto& a = mech.theta[static_cast<std::size_t>(first[j])];
      const auto& b = mech.theta[static_cast<std::size_t>(elems[j])];
      if (a.value != b.value || a.mode != b.mode) return false;
    }
  }
  return true;
}

bool fully_symmetric(const ThresholdMechanism& mech, const Instance& inst) {
  return element_symmetric(mech, inst) && agent_symmetric(mech, inst);
}

}  // namespace delsearch
