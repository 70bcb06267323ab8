#include <algorithm>
#include <map>
#include <sstream>

#include "commdeg/group.hpp"

namespace commdeg {

namespace {

// Greedy generating set: walk members in ascending order, keep those not
// already in the closure of the ones kept so far.
std::vector<ElementId> greedy_generators(const GroupPtr& g, std::span<const ElementId> members) {
  std::vector<ElementId> gens;
  std::vector<std::uint8_t> reached(g->order(), 0);
  reached[kIdentity] = 1;
  for (auto x : members) {
    if (reached[x]) continue;
    gens.push_back(x);
    auto sub = subgroup_closure(g, gens);
    for (auto y : sub.members()) reached[y] = 1;
  }
  return gens;
}

std::string gen_label(std::span<const ElementId> gens) {
  std::ostringstream out;
  out << "gen[";
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (i) out << ',';
    out << gens[i];
  }
  out << ']';
  return out.str();
}

}  // namespace

std::vector<SubgroupRef> all_subgroups(const GroupPtr& g) {
  const std::size_t n = g->order();
  std::map<std::vector<ElementId>, std::vector<ElementId>> found;  // members -> gens

  auto add = [&](const SubgroupRef& s) {
    std::vector<ElementId> members(s.members().begin(), s.members().end());
    if (found.count(members)) return false;
    found.emplace(std::move(members), greedy_generators(g, s.members()));
    return true;
  };

  for (ElementId x = 0; x < n; ++x) {
    const ElementId seed[] = {x};
    add(subgroup_closure(g, seed));
  }

  // Joins of pairs until no new subgroup appears.
  std::vector<std::vector<ElementId>> gens_list;
  for (const auto& [members, gens] : found) gens_list.push_back(gens);
  for (std::size_t i = 0; i < gens_list.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<ElementId> seed = gens_list[i];
      seed.insert(seed.end(), gens_list[j].begin(), gens_list[j].end());
      auto joined = subgroup_closure(g, seed);
      if (add(joined)) {
        std::vector<ElementId> members(joined.members().begin(), joined.members().end());
        gens_list.push_back(found.at(members));
      }
    }
  }

  std::vector<SubgroupRef> out;
  out.reserve(found.size());
  for (auto& [members, gens] : found) {
    std::string label;
    if (members.size() == 1) {
      label = "triv";
    } else if (members.size() == n) {
      label = "full";
    } else {
      label = gen_label(gens);
    }
    out.push_back(SubgroupRef::unchecked(g, members, std::move(label)));
  }
  std::stable_sort(out.begin(), out.end(), [](const SubgroupRef& a, const SubgroupRef& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return std::lexicographical_compare(a.members().begin(), a.members().end(),
                                        b.members().begin(), b.members().end());
  });
  return out;
}

}  // namespace commdeg
