#include "commdeg/group.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <boost/functional/hash.hpp>

#include "commdeg/error.hpp"

namespace commdeg {

namespace {

using Perm = std::vector<std::uint32_t>;

std::string too_large(std::size_t cap) {
  return "group order exceeds cap " + std::to_string(cap);
}

std::string members_label(std::span<const ElementId> members) {
  std::ostringstream out;
  out << "members[";
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out << ',';
    out << members[i];
  }
  out << ']';
  return out.str();
}

}  // namespace

void validate(const PermList& gens) {
  if (gens.degree == 0) {
    throw Error(ErrorCode::InvalidPermutation, "degree must be positive");
  }
  for (std::size_t i = 0; i < gens.perms.size(); ++i) {
    const auto& p = gens.perms[i];
    if (p.size() != gens.degree) {
      throw Error(ErrorCode::InvalidPermutation,
                  "generator " + std::to_string(i) + " has length " +
                      std::to_string(p.size()) + ", expected " +
                      std::to_string(gens.degree));
    }
    std::vector<bool> seen(gens.degree, false);
    for (auto v : p) {
      if (v >= gens.degree || seen[v]) {
        throw Error(ErrorCode::InvalidPermutation,
                    "generator " + std::to_string(i) + " is not a bijection");
      }
      seen[v] = true;
    }
  }
}

std::string cycle_string(std::span<const std::uint32_t> image) {
  std::string out;
  std::vector<bool> done(image.size(), false);
  for (std::size_t start = 0; start < image.size(); ++start) {
    if (done[start] || image[start] == start) continue;
    out += '(';
    std::size_t x = start;
    bool first = true;
    while (!done[x]) {
      done[x] = true;
      if (!first) out += ',';
      out += std::to_string(x + 1);
      first = false;
      x = image[x];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

// ---------------------------------------------------------------------------
// GroupTable

GroupTable::GroupTable(std::size_t order, std::vector<ElementId> mul,
                       std::vector<ElementId> inv, std::vector<std::string> labels,
                       std::string name)
    : order_(order),
      mul_(std::move(mul)),
      inv_(std::move(inv)),
      labels_(std::move(labels)),
      name_(std::move(name)) {
  if (order_ == 0 || mul_.size() != order_ * order_ || inv_.size() != order_ ||
      (!labels_.empty() && labels_.size() != order_)) {
    throw Error(ErrorCode::InvalidArgument, "inconsistent group table dimensions");
  }
}

std::string GroupTable::label(ElementId a) const {
  if (labels_.empty()) return "#" + std::to_string(a);
  return labels_[a];
}

std::size_t GroupTable::element_order(ElementId a) const {
  std::size_t k = 1;
  for (ElementId x = a; x != kIdentity; x = mul(x, a)) ++k;
  return k;
}

bool GroupTable::is_abelian() const {
  for (ElementId a = 0; a < order_; ++a) {
    for (ElementId b = a + 1; b < order_; ++b) {
      if (mul(a, b) != mul(b, a)) return false;
    }
  }
  return true;
}

std::optional<std::string> check_group_axioms(const GroupTable& g,
                                              std::size_t exhaustive_limit,
                                              std::uint64_t seed) {
  const std::size_t n = g.order();
  std::vector<std::uint8_t> seen(n);
  for (ElementId a = 0; a < n; ++a) {
    if (g.mul(kIdentity, a) != a || g.mul(a, kIdentity) != a) {
      return "identity axiom fails at " + std::to_string(a);
    }
    if (g.mul(a, g.inv(a)) != kIdentity || g.mul(g.inv(a), a) != kIdentity) {
      return "inverse axiom fails at " + std::to_string(a);
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (ElementId b = 0; b < n; ++b) {
      if (seen[g.mul(a, b)]++) return "row " + std::to_string(a) + " is not a permutation";
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (ElementId b = 0; b < n; ++b) {
      if (seen[g.mul(b, a)]++) return "column " + std::to_string(a) + " is not a permutation";
    }
  }
  auto assoc = [&](ElementId a, ElementId b, ElementId c) {
    return g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c));
  };
  if (n <= exhaustive_limit) {
    for (ElementId a = 0; a < n; ++a)
      for (ElementId b = 0; b < n; ++b)
        for (ElementId c = 0; c < n; ++c)
          if (!assoc(a, b, c)) return "associativity fails";
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<ElementId> pick(0, static_cast<ElementId>(n - 1));
    for (int i = 0; i < 200000; ++i) {
      if (!assoc(pick(rng), pick(rng), pick(rng))) return "associativity fails (sampled)";
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SubgroupRef

SubgroupRef SubgroupRef::unchecked(GroupPtr parent, std::vector<ElementId> members,
                                   std::string label) {
  auto data = std::make_shared<Data>();
  data->mask.assign(parent->order(), 0);
  for (auto x : members) data->mask[x] = 1;
  data->parent = std::move(parent);
  data->members = std::move(members);
  data->label = std::move(label);
  return SubgroupRef(std::move(data));
}

SubgroupRef SubgroupRef::from_members(GroupPtr parent, std::vector<ElementId> members,
                                      std::string label) {
  const auto n = parent->order();
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.empty() || members.front() != kIdentity || members.back() >= n) {
    throw Error(ErrorCode::InvalidArgument, "subgroup must contain identity and valid ids");
  }
  std::vector<std::uint8_t> mask(n, 0);
  for (auto x : members) mask[x] = 1;
  for (auto a : members) {
    if (!mask[parent->inv(a)]) throw Error(ErrorCode::InvalidArgument, "not closed under inverse");
    for (auto b : members) {
      if (!mask[parent->mul(a, b)]) {
        throw Error(ErrorCode::InvalidArgument, "not closed under multiplication");
      }
    }
  }
  return unchecked(std::move(parent), std::move(members), std::move(label));
}

bool SubgroupRef::is_subset_of(const SubgroupRef& other) const {
  if (parent_ptr() != other.parent_ptr()) return false;
  return std::all_of(members().begin(), members().end(),
                     [&](ElementId x) { return other.contains(x); });
}

bool SubgroupRef::same_members(const SubgroupRef& other) const {
  return parent_ptr() == other.parent_ptr() && data_->members == other.data_->members;
}

std::string SubgroupRef::label() const {
  if (!data_->label.empty()) return data_->label;
  return members_label(data_->members);
}

std::optional<bool> SubgroupRef::cached_normality() const {
  int v = data_->normal.load(std::memory_order_acquire);
  if (v < 0) return std::nullopt;
  return v == 1;
}

void SubgroupRef::cache_normality(bool normal) const {
  data_->normal.store(normal ? 1 : 0, std::memory_order_release);
}

bool same_parent(const SubgroupRef& a, const SubgroupRef& b) {
  return a.parent_ptr() == b.parent_ptr();
}

void require_parent(const GroupTable& g, const SubgroupRef& h) {
  if (&h.parent() != &g) {
    throw Error(ErrorCode::ForeignSubgroup,
                "subgroup " + h.label() + " does not belong to group " + g.name());
  }
}

// ---------------------------------------------------------------------------
// Construction

GroupPtr close_group(const PermList& gens, std::size_t max_order, std::string name) {
  validate(gens);
  const std::size_t degree = gens.degree;
  const std::size_t ngens = gens.perms.size();

  std::vector<Perm> elements;
  std::unordered_map<Perm, ElementId, boost::hash<Perm>> index;
  std::vector<ElementId> parent{0};
  std::vector<std::size_t> parent_gen{0};

  Perm identity(degree);
  std::iota(identity.begin(), identity.end(), 0u);
  elements.push_back(identity);
  index.emplace(identity, 0);

  // right[x * ngens + j] = x * gen_j, where xy means "apply x, then y".
  std::vector<ElementId> right;
  Perm product(degree);
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (std::size_t j = 0; j < ngens; ++j) {
      const auto& x = elements[head];
      const auto& s = gens.perms[j];
      for (std::size_t i = 0; i < degree; ++i) product[i] = s[x[i]];
      auto [it, inserted] = index.try_emplace(product, static_cast<ElementId>(elements.size()));
      if (inserted) {
        if (elements.size() >= max_order) {
          throw Error(ErrorCode::ClosureTooLarge, too_large(max_order));
        }
        elements.push_back(product);
        parent.push_back(static_cast<ElementId>(head));
        parent_gen.push_back(j);
      }
      right.push_back(it->second);
    }
  }

  const std::size_t n = elements.size();
  std::vector<ElementId> mul(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    ElementId* row = mul.data() + a * n;
    row[0] = static_cast<ElementId>(a);
    for (std::size_t b = 1; b < n; ++b) {
      row[b] = right[row[parent[b]] * ngens + parent_gen[b]];
    }
  }
  std::vector<ElementId> inv(n);
  for (std::size_t a = 0; a < n; ++a) {
    const ElementId* row = mul.data() + a * n;
    inv[a] = static_cast<ElementId>(std::find(row, row + n, kIdentity) - row);
  }
  std::vector<std::string> labels;
  labels.reserve(n);
  for (const auto& p : elements) labels.push_back(cycle_string(p));
  return std::make_shared<GroupTable>(n, std::move(mul), std::move(inv), std::move(labels),
                                      std::move(name));
}

namespace {

Perm cycle_perm(std::size_t degree, std::initializer_list<std::uint32_t> cycle) {
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0u);
  std::vector<std::uint32_t> c(cycle);
  for (std::size_t i = 0; i < c.size(); ++i) p[c[i]] = c[(i + 1) % c.size()];
  return p;
}

PermList quaternion_generators() {
  // Right regular representation on {±1, ±i, ±j, ±k}, encoded sign * 4 + unit.
  static constexpr int unit_product[4][4][2] = {
      // {sign flip, unit}
      {{0, 0}, {0, 1}, {0, 2}, {0, 3}},
      {{0, 1}, {1, 0}, {0, 3}, {1, 2}},
      {{0, 2}, {1, 3}, {1, 0}, {0, 1}},
      {{0, 3}, {0, 2}, {1, 1}, {1, 0}},
  };
  PermList gens{8, {}};
  for (int q : {1, 2}) {
    Perm p(8);
    for (std::uint32_t e = 0; e < 8; ++e) {
      const std::uint32_t sign = e / 4, unit = e % 4;
      const auto& r = unit_product[unit][q];
      p[e] = ((sign ^ static_cast<std::uint32_t>(r[0])) * 4) + static_cast<std::uint32_t>(r[1]);
    }
    gens.perms.push_back(std::move(p));
  }
  return gens;
}

}  // namespace

GroupPtr named_group(char family, unsigned n, std::size_t max_order) {
  const std::string name = std::string(1, family) + std::to_string(n);
  PermList gens;
  switch (family) {
    case 'C': {
      if (n == 0) break;
      gens.degree = n;
      if (n > 1) {
        Perm p(n);
        for (unsigned i = 0; i < n; ++i) p[i] = (i + 1) % n;
        gens.perms.push_back(std::move(p));
      }
      return close_group(gens, max_order, name);
    }
    case 'D': {
      if (n == 0) break;
      if (n == 1) {
        gens = {2, {{1, 0}}};
      } else if (n == 2) {
        gens = {4, {{1, 0, 3, 2}, {2, 3, 0, 1}}};
      } else {
        gens.degree = n;
        Perm r(n), s(n);
        for (unsigned i = 0; i < n; ++i) {
          r[i] = (i + 1) % n;
          s[i] = (n - i) % n;
        }
        gens.perms = {std::move(r), std::move(s)};
      }
      return close_group(gens, max_order, name);
    }
    case 'S': {
      if (n == 0) break;
      gens.degree = n;
      if (n >= 2) {
        Perm r(n);
        for (unsigned i = 0; i < n; ++i) r[i] = (i + 1) % n;
        gens.perms.push_back(std::move(r));
        gens.perms.push_back(cycle_perm(n, {0, 1}));
      }
      return close_group(gens, max_order, name);
    }
    case 'A': {
      if (n == 0) break;
      gens.degree = n;
      for (unsigned k = 2; k < n; ++k) gens.perms.push_back(cycle_perm(n, {0, 1, k}));
      return close_group(gens, max_order, name);
    }
    case 'Q': {
      if (n != 8) break;
      return close_group(quaternion_generators(), max_order, "Q8");
    }
    default:
      break;
  }
  throw Error(ErrorCode::UnknownFamily, "unknown group family " + name);
}

ProductGroup direct_product(const GroupPtr& g1, const GroupPtr& g2, std::size_t max_order) {
  const std::size_t n1 = g1->order(), n2 = g2->order();
  if (n1 * n2 > max_order) throw Error(ErrorCode::ClosureTooLarge, too_large(max_order));
  const std::size_t n = n1 * n2;
  std::vector<ElementId> mul(n * n), inv(n), p1(n), p2(n);
  std::vector<std::string> labels;
  const bool labelled = g1->has_labels() || g2->has_labels();
  for (ElementId a = 0; a < n1; ++a) {
    for (ElementId b = 0; b < n2; ++b) {
      const ElementId x = static_cast<ElementId>(a * n2 + b);
      p1[x] = a;
      p2[x] = b;
      inv[x] = static_cast<ElementId>(g1->inv(a) * n2 + g2->inv(b));
      if (labelled) labels.push_back("(" + g1->label(a) + "," + g2->label(b) + ")");
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      mul[x * n + y] = static_cast<ElementId>(g1->mul(p1[x], p1[y]) * n2 + g2->mul(p2[x], p2[y]));
    }
  }
  auto group = std::make_shared<GroupTable>(n, std::move(mul), std::move(inv), std::move(labels),
                                            g1->name() + "x" + g2->name());
  return {std::move(group), std::move(p1), std::move(p2)};
}

SubgroupRef product_subgroup(const ProductGroup& product, const SubgroupRef& a,
                             const SubgroupRef& b) {
  const std::size_t n2 = b.parent().order();
  if (a.parent().order() * n2 != product.group->order()) {
    throw Error(ErrorCode::ForeignSubgroup, "factor subgroups do not match the product");
  }
  std::vector<ElementId> members;
  members.reserve(a.order() * b.order());
  for (auto x : a.members())
    for (auto y : b.members()) members.push_back(static_cast<ElementId>(x * n2 + y));
  std::sort(members.begin(), members.end());
  return SubgroupRef::unchecked(product.group, std::move(members));
}

SubgroupRef subgroup_closure(const GroupPtr& g, std::span<const ElementId> seed,
                             std::string label) {
  const std::size_t n = g->order();
  std::vector<ElementId> gens;
  for (auto s : seed) {
    if (s >= n) {
      throw Error(ErrorCode::InvalidArgument, "element id " + std::to_string(s) +
                                                  " out of range for order " + std::to_string(n));
    }
    if (s != kIdentity) gens.push_back(s);
  }
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<ElementId> members{kIdentity};
  mask[kIdentity] = 1;
  for (std::size_t head = 0; head < members.size(); ++head) {
    for (auto s : gens) {
      const ElementId y = g->mul(members[head], s);
      if (!mask[y]) {
        mask[y] = 1;
        members.push_back(y);
      }
    }
  }
  std::sort(members.begin(), members.end());
  return SubgroupRef::unchecked(g, std::move(members), std::move(label));
}

SubgroupRef trivial_subgroup(const GroupPtr& g) {
  return SubgroupRef::unchecked(g, {kIdentity}, "triv");
}

SubgroupRef full_subgroup(const GroupPtr& g) {
  std::vector<ElementId> all(g->order());
  std::iota(all.begin(), all.end(), 0u);
  return SubgroupRef::unchecked(g, std::move(all), "full");
}

bool is_normal(const GroupTable& g, const SubgroupRef& h) {
  require_parent(g, h);
  if (auto cached = h.cached_normality()) return *cached;
  bool normal = true;
  if (!h.is_full() && !h.is_trivial()) {
    for (ElementId x = 0; x < g.order() && normal; ++x) {
      const ElementId xi = g.inv(x);
      for (auto m : h.members()) {
        if (!h.contains(g.mul(g.mul(x, m), xi))) {
          normal = false;
          break;
        }
      }
    }
  }
  h.cache_normality(normal);
  return normal;
}

SubgroupRef centralizer_of_element(const GroupTable& g, const SubgroupRef& k, ElementId w) {
  require_parent(g, k);
  if (w >= g.order()) throw Error(ErrorCode::InvalidArgument, "element id out of range");
  std::vector<ElementId> members;
  for (auto x : k.members()) {
    if (g.mul(x, w) == g.mul(w, x)) members.push_back(x);
  }
  return SubgroupRef::unchecked(k.parent_ptr(), std::move(members));
}

SubgroupRef centralizer_of_subgroup(const SubgroupRef& h, const SubgroupRef& k) {
  if (!same_parent(h, k)) {
    throw Error(ErrorCode::ForeignSubgroup, "subgroups live in different groups");
  }
  const auto& g = h.parent();
  std::vector<ElementId> members;
  for (auto x : h.members()) {
    bool central = true;
    for (auto y : k.members()) {
      if (g.mul(x, y) != g.mul(y, x)) {
        central = false;
        break;
      }
    }
    if (central) members.push_back(x);
  }
  return SubgroupRef::unchecked(h.parent_ptr(), std::move(members));
}

ConjugacyInfo conjugacy(const GroupTable& g, const SubgroupRef& k) {
  require_parent(g, k);
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  const std::size_t n = g.order();
  ConjugacyInfo info;
  info.class_of.assign(n, kUnset);
  info.centralizer_order.assign(n, 0);
  for (ElementId x = 0; x < n; ++x) {
    if (info.class_of[x] != kUnset) continue;
    const std::size_t cls = info.classes.size();
    std::vector<ElementId> orbit;
    for (auto c : k.members()) {
      const ElementId y = g.mul(g.mul(g.inv(c), x), c);
      if (info.class_of[y] == kUnset) {
        info.class_of[y] = cls;
        orbit.push_back(y);
      }
    }
    std::sort(orbit.begin(), orbit.end());
    for (auto y : orbit) info.centralizer_order[y] = k.order() / orbit.size();
    info.classes.push_back(std::move(orbit));
  }
  return info;
}

ConjugacyInfo conjugacy(const GroupPtr& g) { return conjugacy(*g, full_subgroup(g)); }

SubgroupRef center(const GroupPtr& g) {
  const std::size_t n = g->order();
  std::vector<ElementId> members;
  for (ElementId z = 0; z < n; ++z) {
    bool central = true;
    for (ElementId x = 0; x < n && central; ++x) central = g->mul(z, x) == g->mul(x, z);
    if (central) members.push_back(z);
  }
  return SubgroupRef::unchecked(g, std::move(members), "center");
}

QuotientGroup quotient_group(const GroupPtr& g, const SubgroupRef& normal) {
  if (!is_normal(*g, normal)) {
    throw Error(ErrorCode::NotNormal, "subgroup " + normal.label() + " is not normal");
  }
  constexpr auto kUnset = static_cast<ElementId>(-1);
  const std::size_t n = g->order();
  std::vector<ElementId> projection(n, kUnset);
  std::vector<ElementId> reps;
  for (ElementId x = 0; x < n; ++x) {
    if (projection[x] != kUnset) continue;
    const auto coset = static_cast<ElementId>(reps.size());
    reps.push_back(x);
    for (auto m : normal.members()) projection[g->mul(x, m)] = coset;
  }
  const std::size_t q = reps.size();
  std::vector<ElementId> mul(q * q), inv(q);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) mul[a * q + b] = projection[g->mul(reps[a], reps[b])];
    inv[a] = projection[g->inv(reps[a])];
    if (g->has_labels()) labels.push_back(g->label(reps[a]) + "N");
  }
  auto group = std::make_shared<GroupTable>(q, std::move(mul), std::move(inv), std::move(labels),
                                            g->name() + "/" + normal.label());
  return {std::move(group), std::move(projection)};
}

SubgroupRef image_subgroup(const SubgroupRef& h, const QuotientGroup& q) {
  if (h.parent().order() != q.projection.size()) {
    throw Error(ErrorCode::ForeignSubgroup, "subgroup does not belong to the quotient's parent");
  }
  std::vector<ElementId> members;
  for (auto x : h.members()) members.push_back(q.projection[x]);
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return SubgroupRef::unchecked(q.group, std::move(members));
}

unsigned smallest_prime_divisor(const GroupTable& g) {
  const std::size_t n = g.order();
  if (n < 2) throw Error(ErrorCode::TrivialGroup, "trivial group has no prime divisor");
  for (std::size_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) return static_cast<unsigned>(p);
  }
  return static_cast<unsigned>(n);
}

}  // namespace commdeg
