// Compares the serial reference kernels against the OpenMP ones and checks
// that both produce identical results.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "delsearch/agents.hpp"
#include "delsearch/bounds.hpp"
#include "delsearch/engine.hpp"

using namespace delsearch;

namespace {

template <class F>
double time_ms(F&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool match) {
  std::printf("%-38s %10.1f %10.1f %7.2fx %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, match ? "yes" : "NO");
}

// 10 elements x 4 atoms: ~1M joint profiles for the exact kernel.
Instance wide_instance() {
  FiniteSupport fs;
  fs.atoms.push_back({1.0, std::nullopt, rat(1, 4)});
  fs.atoms.push_back({2.0, std::nullopt, rat(1, 4)});
  fs.atoms.push_back({5.0, std::nullopt, rat(1, 4)});
  fs.atoms.push_back({9.0, std::nullopt, rat(1, 4)});
  std::vector<Element> elements;
  for (int i = 1; i <= 2; ++i)
    for (int j = 0; j < 5; ++j)
      elements.push_back(Element{i, OutcomeDistribution(DistributionLaw{fs})});
  return Instance(2, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

Instance atomless_instance() {
  std::vector<Element> elements;
  for (int i = 1; i <= 4; ++i) {
    elements.push_back(Element{i, OutcomeDistribution(DistributionLaw{Uniform{0.0, 4.0}})});
    elements.push_back(Element{i, OutcomeDistribution(DistributionLaw{Exponential{0.7}})});
  }
  return Instance(4, Flavor::adversarial, AssignmentMode::fixed, std::move(elements));
}

ThresholdMechanism mid_threshold(const Instance& inst, double value) {
  ThresholdMechanism mech;
  mech.tie = TieOrder::default_order(inst);
  mech.theta.assign(static_cast<std::size_t>(inst.element_count()),
                    ThresholdEntry{value, ThresholdMode::weak});
  return mech;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  std::printf("%-38s %10s %10s %8s %s\n", "kernel", "serial ms", "openmp ms", "speedup", "match");

  {
    const Rational eps = rat(1, 10);
    Instance inst = hard_instance(4, eps);
    Mechanism mech{hard_mechanism_a(inst, eps)};
    StrategyProfile prof = adversarial_profile(inst, mech).profile;
    McResult rs, rp;
    const std::uint64_t n = 4'000'000;
    double ts = time_ms([&] { rs = mc_expected_principal(inst, mech, prof, n, 7, Exec::serial); });
    double tp = time_ms([&] { rp = mc_expected_principal(inst, mech, prof, n, 7, Exec::parallel); });
    row("mc_expected_principal (4M samples)", ts, tp,
        rs.estimate == rp.estimate && rs.stderr_ == rp.stderr_);
  }

  {
    Instance inst = atomless_instance();
    Mechanism mech{mid_threshold(inst, 1.5)};
    McResult rs, rp;
    const std::uint64_t n = 2'000'000;
    double ts = time_ms([&] { rs = mc_adversarial_principal(inst, mech, n, 11, Exec::serial); });
    double tp = time_ms([&] { rp = mc_adversarial_principal(inst, mech, n, 11, Exec::parallel); });
    row("mc_adversarial_principal (2M samples)", ts, tp,
        rs.estimate == rp.estimate && rs.stderr_ == rp.stderr_);
  }

  {
    Instance inst = wide_instance();
    Mechanism mech{mid_threshold(inst, 3.0)};
    StrategyProfile prof = adversarial_profile(inst, mech).profile;
    Rational vs, vp;
    double ts = time_ms(
        [&] { vs = exact_expected_principal(inst, mech, prof, 2'000'000, Exec::serial); });
    double tp = time_ms(
        [&] { vp = exact_expected_principal(inst, mech, prof, 2'000'000, Exec::parallel); });
    row("exact_expected_principal (~1M types)", ts, tp, vs == vp);
  }

  {
    const Rational eps = rat(1, 20);
    Instance inst = hard_instance(4, eps);  // 8 elements: 65536 mechanisms
    ScanResult ss, sp;
    double ts = time_ms([&] { ss = exhaustive_mechanism_scan(inst, 1'000'000, Exec::serial); });
    double tp = time_ms([&] { sp = exhaustive_mechanism_scan(inst, 1'000'000, Exec::parallel); });
    row("exhaustive_mechanism_scan (65536)", ts, tp,
        ss.best_utility == sp.best_utility && ss.best_index == sp.best_index);
  }

  return 0;
}
