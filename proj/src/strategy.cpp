#include "delsearch/strategy.hpp"

namespace delsearch {

Strategy::Strategy(const Instance& inst, int agent) : agent_(agent), elems_(inst.elements_of(agent)) {
  std::uint64_t count = 1;
  radices_.reserve(elems_.size());
  for (int e : elems_) {
    const auto* fs = inst.elements()[e].distribution.finite();
    if (fs == nullptr)
      fail(Errc::model_violation, "NotFinite", "strategy tables require finite supports");
    radices_.push_back(static_cast<int>(fs->atoms.size()));
    count *= fs->atoms.size();
  }
  actions_.assign(count, AgentAction{});
}

std::uint64_t Strategy::type_index(std::span<const int> own_atoms) const {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < radices_.size(); ++j)
    idx = idx * static_cast<std::uint64_t>(radices_[j]) + static_cast<std::uint64_t>(own_atoms[j]);
  return idx;
}

void Strategy::type_atoms(std::uint64_t type_index, std::vector<int>& own_atoms) const {
  own_atoms.assign(radices_.size(), 0);
  for (std::size_t j = radices_.size(); j-- > 0;) {
    own_atoms[j] = static_cast<int>(type_index % static_cast<std::uint64_t>(radices_[j]));
    type_index /= static_cast<std::uint64_t>(radices_[j]);
  }
}

std::uint64_t Strategy::type_index_from_profile(std::span<const int> profile_atoms) const {
  std::uint64_t idx = 0;
  for (std::size_t j = 0; j < elems_.size(); ++j)
    idx = idx * static_cast<std::uint64_t>(radices_[j]) +
          static_cast<std::uint64_t>(profile_atoms[static_cast<std::size_t>(elems_[j])]);
  return idx;
}

Rational Strategy::type_mass(const Instance& inst, std::uint64_t type_index) const {
  Rational mass(1);
  for (std::size_t j = elems_.size(); j-- > 0;) {
    int atom = static_cast<int>(type_index % static_cast<std::uint64_t>(radices_[j]));
    type_index /= static_cast<std::uint64_t>(radices_[j]);
    mass *= inst.elements()[static_cast<std::size_t>(elems_[j])]
                .distribution.finite()
                ->atoms[static_cast<std::size_t>(atom)]
                .mass;
  }
  return mass;
}

StrategyProfile empty_profile(const Instance& inst) {
  StrategyProfile profile;
  profile.agents.reserve(static_cast<std::size_t>(inst.k()));
  for (int i = 1; i <= inst.k(); ++i) profile.agents.emplace_back(inst, i);
  return profile;
}

}  // namespace delsearch
