#include "delsearch/engine.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace delsearch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-element acceptance compiled to flat predicates for the inner loops.
struct CompiledAccept {
  bool extensional = false;
  std::vector<char> mask;
  double min_x = 0.0;
  bool strict = false;

  bool ok(int atom, double x) const {
    if (extensional) {
      if (atom < 0 || static_cast<std::size_t>(atom) >= mask.size()) return false;
      return mask[static_cast<std::size_t>(atom)] != 0;
    }
    return strict ? x > min_x : x >= min_x;
  }
};

std::vector<CompiledAccept> compile_acceptance(const Instance& inst, const Mechanism& mech) {
  std::vector<CompiledAccept> out(static_cast<std::size_t>(inst.element_count()));
  if (const auto* t = std::get_if<ThresholdMechanism>(&mech)) {
    for (int e = 0; e < inst.element_count(); ++e) {
      out[e].min_x = t->theta[static_cast<std::size_t>(e)].value;
      out[e].strict = t->theta[static_cast<std::size_t>(e)].mode == ThresholdMode::strict;
    }
  } else if (const auto* s = std::get_if<SingleProposalMechanism>(&mech)) {
    for (int e = 0; e < inst.element_count(); ++e) {
      const AcceptanceSet& a = s->accept[static_cast<std::size_t>(e)];
      out[e].extensional = a.extensional;
      out[e].mask = a.atoms;
      out[e].min_x = a.min_x;
      out[e].strict = a.strict;
    }
  } else {
    fail(Errc::model_violation, "NotSingleProposalFamily",
         "acceptance sets exist only for threshold/single-proposal mechanisms");
  }
  return out;
}

bool is_myerson(const Mechanism& mech) { return std::holds_alternative<MyersonMechanism>(mech); }

// Shared by the exact evaluators: winner of one joint type under an honest
// or lying table profile, single-proposal family.
struct WinnerPick {
  int element = -1;
  int atom = -1;
  double x = 0.0;
};

std::optional<WinnerPick> pick_winner(const Instance& inst, const std::vector<CompiledAccept>& accept,
                                      const TieOrder& tie, const StrategyProfile& profile,
                                      std::span<const int> atoms) {
  int best_elem = -1, best_claim = -1;
  double best_x = 0.0;
  for (int i = 1; i <= inst.k(); ++i) {
    const Strategy& s = profile.of(i);
    const AgentAction& act = s.at(s.type_index_from_profile(atoms));
    if (act.abstain()) continue;
    const int e = act.element;
    const int claim = act.atom >= 0 ? act.atom : atoms[static_cast<std::size_t>(e)];
    const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
    const double x = fs->atoms[static_cast<std::size_t>(claim)].x;
    if (!accept[static_cast<std::size_t>(e)].ok(claim, x)) continue;
    if (best_elem < 0 || x > best_x || (x == best_x && tie.rank[e] < tie.rank[best_elem])) {
      best_elem = e;
      best_claim = claim;
      best_x = x;
    }
  }
  if (best_elem < 0) return std::nullopt;
  if (best_claim != atoms[static_cast<std::size_t>(best_elem)]) return std::nullopt;  // lie detected
  return WinnerPick{best_elem, best_claim, best_x};
}

// Myerson winner for a truthfully reported joint type.
std::optional<WinnerPick> pick_winner_myerson(const Instance& inst, const MyersonMechanism& mech,
                                              std::span<const int> atoms) {
  const int n = inst.element_count();
  const int k = inst.k();
  thread_local std::vector<double> virt;
  virt.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<double> agent_best(static_cast<std::size_t>(k), -kInf);
  for (int e = 0; e < n; ++e) {
    const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
    virt[e] = mech.phi[static_cast<std::size_t>(e)](fs->atoms[static_cast<std::size_t>(atoms[e])].x);
    int owner = inst.elements()[static_cast<std::size_t>(e)].owner;
    if (owner >= 1) agent_best[owner - 1] = std::max(agent_best[owner - 1], virt[e]);
  }
  double v_star = -kInf;
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
    for (int e : mech.tie.order)
      if (virt[e] == v_star) {
        chosen = e;
        break;
      }
  } else {
    double tau = -kInf;
    for (int i = 1; i <= k; ++i)
      if (i != i_star) tau = std::max(tau, agent_best[i - 1]);
    double best_y = -1.0;
    for (int e : mech.tie.order) {
      if (inst.elements()[static_cast<std::size_t>(e)].owner != i_star) continue;
      if (virt[e] < 0 || !(virt[e] > tau)) continue;
      const auto* fs = inst.elements()[static_cast<std::size_t>(e)].distribution.finite();
      double y = fs->atoms[static_cast<std::size_t>(atoms[e])].y.value_or(0.0);
      if (chosen < 0 || y > best_y) {
        chosen = e;
        best_y = y;
      }
    }
  }
  if (chosen < 0) return std::nullopt;
  const auto* fs = inst.elements()[static_cast<std::size_t>(chosen)].distribution.finite();
  return WinnerPick{chosen, atoms[chosen], fs->atoms[static_cast<std::size_t>(atoms[chosen])].x};
}

// Walks profiles [first, last) keeping an incremental prefix-product of
// masses; calls visit(atoms, mass, index).
template <class Visit>
void walk_profiles(const Instance& inst, std::uint64_t first, std::uint64_t last, Visit&& visit) {
  const int n = inst.element_count();
  std::vector<int> atoms;
  profile_from_index(inst, first, atoms);
  std::vector<Rational> prefix(static_cast<std::size_t>(n) + 1, Rational(1));
  auto refresh = [&](int from) {
    for (int e = from; e < n; ++e)
      prefix[e + 1] = prefix[e] * inst.elements()[static_cast<std::size_t>(e)]
                                      .distribution.finite()
                                      ->atoms[static_cast<std::size_t>(atoms[e])]
                                      .mass;
  };
  refresh(0);
  for (std::uint64_t idx = first; idx < last; ++idx) {
    visit(std::span<const int>(atoms), prefix[static_cast<std::size_t>(n)], idx);
    if (idx + 1 == last) break;
    int changed = n - 1;
    while (changed >= 0) {
      const auto* fs = inst.elements()[static_cast<std::size_t>(changed)].distribution.finite();
      if (++atoms[changed] < static_cast<int>(fs->atoms.size())) break;
      atoms[changed] = 0;
      --changed;
    }
    refresh(std::max(changed, 0));
  }
}

std::uint64_t range_count(std::uint64_t total) {
  const std::uint64_t max_ranges = 128;
  return std::max<std::uint64_t>(1, std::min(total, max_ranges));
}

}  // namespace

// ---------------------------------------------------------------------------
// Proposal marginals

Rational ProposalMarginal::losing_mass(double x, int elem_rank, const TieOrder& tie) const {
  Rational acc = none;
  for (const ProposalEntry& e : entries) {
    if (e.x < x || (e.x == x && tie.rank[e.element] > elem_rank)) acc += e.mass;
    if (e.x > x) break;
  }
  return acc;
}

Rational ProposalMarginal::below(double v) const {
  Rational acc(0);
  for (const ProposalEntry& e : entries) {
    if (e.x >= v) break;
    acc += e.mass;
  }
  return acc;
}

Rational ProposalMarginal::at_most(double v) const {
  Rational acc(0);
  for (const ProposalEntry& e : entries) {
    if (e.x > v) break;
    acc += e.mass;
  }
  return acc;
}

ProposalMarginal proposal_marginal(const Instance& inst, const Mechanism& mech,
                                   const Strategy& strategy) {
  const TieOrder& tie = tie_order(mech);
  const auto accept = compile_acceptance(inst, mech);
  ProposalMarginal m;
  m.none = Rational(0);
  std::vector<int> own_atoms;
  std::vector<std::pair<std::pair<double, int>, Rational>> acc;  // ((x, rank), mass)
  for (std::uint64_t t = 0; t < strategy.type_count(); ++t) {
    const Rational mass = strategy.type_mass(inst, t);
    const AgentAction& act = strategy.at(t);
    if (act.abstain()) {
      m.none += mass;
      continue;
    }
    strategy.type_atoms(t, own_atoms);
    int pos = -1;
    for (std::size_t j = 0; j < strategy.elements().size(); ++j)
      if (strategy.elements()[j] == act.element) pos = static_cast<int>(j);
    if (pos < 0)
      fail(Errc::model_violation, "UnknownElement", "strategy proposes a foreign element");
    const int realized = own_atoms[static_cast<std::size_t>(pos)];
    if (act.atom >= 0 && act.atom != realized)
      fail(Errc::model_violation, "LyingStrategy",
           "factorized evaluation requires honest strategies");
    const auto* fs = inst.elements()[static_cast<std::size_t>(act.element)].distribution.finite();
    const double x = fs->atoms[static_cast<std::size_t>(realized)].x;
    if (!accept[static_cast<std::size_t>(act.element)].ok(realized, x)) {
      m.none += mass;
      continue;
    }
    acc.push_back({{x, tie.rank[act.element]}, mass});
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [key, mass] : acc) {
    if (!m.entries.empty() && m.entries.back().x == key.first &&
        tie.rank[m.entries.back().element] == key.second) {
      m.entries.back().mass += mass;
    } else {
      // recover the element index from its rank
      m.entries.push_back({key.first, tie.order[static_cast<std::size_t>(key.second)], mass});
    }
  }
  return m;
}

Rational expected_winner_x(const Instance& /*inst*/, const Mechanism& /*mech*/,
                           const std::vector<ProposalMarginal>& marginals) {
  std::set<double> values;
  for (const auto& m : marginals)
    for (const auto& e : m.entries) values.insert(e.x);
  Rational total(0);
  for (double v : values) {
    Rational le(1), lt(1);
    for (const auto& m : marginals) {
      le *= m.none + m.at_most(v);
      lt *= m.none + m.below(v);
    }
    total += rat_from_double(v) * (le - lt);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Expected opt

Rational expected_opt_exact(const Instance& inst) {
  if (!inst.all_finite())
    fail(Errc::model_violation, "NotFinite", "exact E[Opt] requires finite supports");
  std::set<double> values;
  for (const Element& el : inst.elements())
    for (const FiniteAtom& a : el.distribution.finite()->atoms) values.insert(a.x);
  Rational total(0), prev(0);
  bool first = true;
  for (double v : values) {
    Rational le(1);
    for (const Element& el : inst.elements()) le *= el.distribution.cdf_exact(v, false);
    total += rat_from_double(v) * (le - (first ? Rational(0) : prev));
    prev = le;
    first = false;
  }
  return total;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double fm, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, fa, m, fm, flm, left, eps / 2.0, depth - 1) +
         simpson(f, m, fm, b, fb, frm, right, eps / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, fa, b, fb, fm, whole, eps, 48);
}

}  // namespace

double expected_opt_quadrature(const Instance& inst, double tol) {
  // E[max] = integral of Pr[max > v]; exponential tails beyond the cutoff
  // are added in closed form (cross terms < 1e-24).
  const double exp_tail_mass = 1e-12;
  std::set<double> cuts{0.0};
  double hi = 0.0;
  double tail = 0.0;
  for (const Element& el : inst.elements()) {
    const auto& d = el.distribution;
    if (const auto* fs = d.finite()) {
      for (const auto& a : fs->atoms) cuts.insert(a.x);
    } else if (const auto* u = std::get_if<Uniform>(&d.law())) {
      cuts.insert(u->lo);
      cuts.insert(u->hi);
    } else if (const auto* ex = std::get_if<Exponential>(&d.law())) {
      cuts.insert(-std::log(exp_tail_mass) / ex->rate);
    } else {
      for (const auto& [x, fx] : std::get<PiecewiseLinearCdf>(d.law()).points) cuts.insert(x);
    }
  }
  for (double c : cuts) hi = std::max(hi, c);
  for (const Element& el : inst.elements())
    if (const auto* ex = std::get_if<Exponential>(&el.distribution.law()))
      tail += std::exp(-ex->rate * hi) / ex->rate;

  auto integrand = [&](double v) {
    double prod = 1.0;
    for (const Element& el : inst.elements()) prod *= el.distribution.cdf(v, false);
    return 1.0 - prod;
  };
  double total = 0.0;
  double prev = 0.0;
  bool started = false;
  const double n_pieces = static_cast<double>(cuts.size());
  for (double c : cuts) {
    if (started && c > prev) total += integrate(integrand, prev, c, tol / n_pieces);
    prev = c;
    started = true;
  }
  return total + tail;
}

// ---------------------------------------------------------------------------
// Chunked Monte Carlo core

namespace {

template <class PerSample>
McResult mc_chunked(std::uint64_t samples, std::uint64_t seed, Exec exec, PerSample&& per_sample) {
  if (samples < 1) fail(Errc::model_violation, "BadSampleCount", "samples must be >= 1");
  const std::uint64_t chunks = std::min<std::uint64_t>(samples, 1024);
  std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
  const std::uint64_t base = samples / chunks, rem = samples % chunks;

  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t count = base + (c < rem ? 1 : 0);
    Rng rng(derive_seed(seed, c));
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t i = 0; i < count; ++i) {
      const double u = per_sample(rng);
      s += u;
      s2 += u * u;
    }
    sums[c] = s;
    squares[c] = s2;
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c)
      run_chunk(static_cast<std::uint64_t>(c));
  } else {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  }

  // Merge in chunk order so the result is independent of thread count.
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    sq += squares[c];
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  double se = 0.0;
  if (samples > 1) {
    const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
    se = std::sqrt(var / n);
  }
  return {mean, se, samples};
}

}  // namespace

McResult mc_estimate(std::uint64_t samples, std::uint64_t seed, Exec exec,
                     const std::function<double(Rng&)>& per_sample) {
  return mc_chunked(samples, seed, exec, [&](Rng& rng) { return per_sample(rng); });
}

McResult expected_opt_mc(const Instance& inst, std::uint64_t samples, std::uint64_t seed, Exec exec) {
  return mc_chunked(samples, seed, exec, [&](Rng& rng) {
    double best = 0.0;
    for (const Element& el : inst.elements()) best = std::max(best, el.distribution.sample(rng).x);
    return best;
  });
}

McResult mc_adversarial_principal(const Instance& inst, const Mechanism& mech,
                                  std::uint64_t samples, std::uint64_t seed, Exec exec) {
  if (inst.flavor() != Flavor::adversarial)
    fail(Errc::model_violation, "StrategicFlavor",
         "adversarial evaluation needs an adversarial-flavor instance");
  const auto accept = compile_acceptance(inst, mech);
  const int n = inst.element_count();
  const int k = inst.k();
  std::vector<int> owner(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) owner[e] = inst.elements()[static_cast<std::size_t>(e)].owner;

  return mc_chunked(samples, seed, exec, [&, n, k](Rng& rng) {
    // Each agent proposes their least acceptable observed value; the
    // principal takes the best proposal.
    thread_local std::vector<double> proposal;
    proposal.assign(static_cast<std::size_t>(k), -1.0);
    for (int e = 0; e < n; ++e) {
      auto draw = inst.elements()[static_cast<std::size_t>(e)].distribution.sample(rng);
      if (!accept[static_cast<std::size_t>(e)].ok(draw.atom, draw.x)) continue;
      const int i = owner[e];
      if (i < 1) continue;
      if (proposal[i - 1] < 0.0 || draw.x < proposal[i - 1]) proposal[i - 1] = draw.x;
    }
    double best = 0.0;
    for (int i = 0; i < k; ++i)
      if (proposal[i] >= 0.0) best = std::max(best, proposal[i]);
    return best;
  });
}

McResult mc_expected_principal(const Instance& inst, const Mechanism& mech,
                               const StrategyProfile& profile, std::uint64_t samples,
                               std::uint64_t seed, Exec exec) {
  if (!inst.all_finite())
    fail(Errc::model_violation, "NotFinite",
         "table-profile Monte Carlo requires finite supports");
  const int n = inst.element_count();
  if (is_myerson(mech)) {
    const auto& my = std::get<MyersonMechanism>(mech);
    return mc_chunked(samples, seed, exec, [&, n](Rng& rng) {
      thread_local std::vector<int> atoms;
      atoms.assign(static_cast<std::size_t>(n), 0);
      for (int e = 0; e < n; ++e)
        atoms[e] = inst.elements()[static_cast<std::size_t>(e)].distribution.sample(rng).atom;
      auto w = pick_winner_myerson(inst, my, atoms);
      return w ? w->x : 0.0;
    });
  }
  const auto accept = compile_acceptance(inst, mech);
  const TieOrder& tie = tie_order(mech);
  return mc_chunked(samples, seed, exec, [&, n](Rng& rng) {
    thread_local std::vector<int> atoms;
    atoms.assign(static_cast<std::size_t>(n), 0);
    for (int e = 0; e < n; ++e)
      atoms[e] = inst.elements()[static_cast<std::size_t>(e)].distribution.sample(rng).atom;
    auto w = pick_winner(inst, accept, tie, profile, atoms);
    return w ? w->x : 0.0;
  });
}

// ---------------------------------------------------------------------------
// Exact principal evaluation

Rational exact_expected_principal(const Instance& inst, const Mechanism& mech,
                                  const StrategyProfile& profile, std::uint64_t cap, Exec exec) {
  const std::uint64_t total = profile_count_checked(inst, cap);
  if (total == 0) return Rational(0);

  const bool myerson = is_myerson(mech);
  std::vector<CompiledAccept> accept;
  if (!myerson) accept = compile_acceptance(inst, mech);
  const TieOrder& tie = tie_order(mech);

  const std::uint64_t ranges = range_count(total);
  std::vector<Rational> partial(ranges, Rational(0));

  auto run_range = [&](std::uint64_t r) {
    const std::uint64_t first = total * r / ranges;
    const std::uint64_t last = total * (r + 1) / ranges;
    Rational local(0);
    walk_profiles(inst, first, last, [&](std::span<const int> atoms, const Rational& mass, std::uint64_t) {
      std::optional<WinnerPick> w =
          myerson ? pick_winner_myerson(inst, std::get<MyersonMechanism>(mech), atoms)
                  : pick_winner(inst, accept, tie, profile, atoms);
      if (w && w->x != 0.0) local += mass * rat_from_double(w->x);
    });
    partial[r] = std::move(local);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(ranges); ++r)
      run_range(static_cast<std::uint64_t>(r));
  } else {
    for (std::uint64_t r = 0; r < ranges; ++r) run_range(r);
  }

  Rational sum(0);
  for (const Rational& p : partial) sum += p;
  return sum;
}

Rational expected_principal_factored(const Instance& inst, const Mechanism& mech,
                                     const StrategyProfile& profile) {
  std::vector<ProposalMarginal> marginals;
  marginals.reserve(profile.agents.size());
  for (const Strategy& s : profile.agents) marginals.push_back(proposal_marginal(inst, mech, s));
  return expected_winner_x(inst, mech, marginals);
}

Rational win_probability(const Instance& inst, const Mechanism& mech,
                         const StrategyProfile& profile, int agent, std::uint64_t type_index,
                         const AgentAction& action) {
  if (action.abstain()) return Rational(0);
  const Strategy& mine = profile.of(agent);
  std::vector<int> own_atoms;
  mine.type_atoms(type_index, own_atoms);
  int pos = -1;
  for (std::size_t j = 0; j < mine.elements().size(); ++j)
    if (mine.elements()[j] == action.element) pos = static_cast<int>(j);
  if (pos < 0) fail(Errc::model_violation, "UnknownElement", "action proposes a foreign element");
  const int realized = own_atoms[static_cast<std::size_t>(pos)];
  const int claim = action.atom >= 0 ? action.atom : realized;
  if (claim != realized) return Rational(0);  // lie: never survives the check
  const Outcome o = inst.outcome_at(action.element, claim);
  if (!acceptable(mech, inst, o)) return Rational(0);

  const TieOrder& tie = tie_order(mech);
  Rational prob(1);
  for (int j = 1; j <= inst.k(); ++j) {
    if (j == agent) continue;
    ProposalMarginal m = proposal_marginal(inst, mech, profile.of(j));
    prob *= m.losing_mass(o.x, tie.rank[action.element], tie);
  }
  return prob;
}

AllocationTable allocation_table(const Instance& inst, const Mechanism& mech,
                                 const StrategyProfile& profile, std::uint64_t cap) {
  const std::uint64_t total = profile_count_checked(inst, cap);
  AllocationTable table;
  table.winner.resize(total);
  const bool myerson = is_myerson(mech);
  std::vector<CompiledAccept> accept;
  if (!myerson) accept = compile_acceptance(inst, mech);
  const TieOrder& tie = tie_order(mech);
  walk_profiles(inst, 0, total, [&](std::span<const int> atoms, const Rational&, std::uint64_t idx) {
    std::optional<WinnerPick> w =
        myerson ? pick_winner_myerson(inst, std::get<MyersonMechanism>(mech), atoms)
                : pick_winner(inst, accept, tie, profile, atoms);
    if (w) table.winner[idx] = OutcomeRef{w->element, w->atom};
  });
  return table;
}

// ---------------------------------------------------------------------------

EvaluationReport delegation_ratio(const Instance& inst, const Mechanism& mech,
                                  const StrategyProfile& profile, EvalMode mode,
                                  std::uint64_t samples, std::uint64_t seed, Exec exec,
                                  std::uint64_t cap) {
  EvaluationReport report;
  report.seed = seed;
  report.samples = mode == EvalMode::mc ? samples : 0;
  report.mode = mode == EvalMode::mc ? "mc" : "exact";

  if (inst.all_finite())
    report.opt = Estimate::exact(expected_opt_exact(inst));
  else
    report.opt = Estimate::real(expected_opt_quadrature(inst));
  if (!(report.opt.as_double() > 0.0))
    fail(Errc::model_violation, "ZeroOpt", "expected opt must be positive for a ratio");

  if (mode == EvalMode::exact) {
    report.principal = Estimate::exact(exact_expected_principal(inst, mech, profile, cap, exec));
  } else {
    McResult r = mc_expected_principal(inst, mech, profile, samples, seed, exec);
    report.principal = Estimate::mc(r.estimate, r.stderr_, r.samples);
  }
  report.ratio = report.principal.as_double() / report.opt.as_double();
  return report;
}

}  // namespace delsearch
