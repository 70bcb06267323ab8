#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace commdeg {

using ElementId = std::uint32_t;

inline constexpr ElementId kIdentity = 0;
inline constexpr std::size_t kDefaultMaxOrder = 10080;

/// Generators of a permutation group; each perm is an image array on
/// {0..degree-1}.
struct PermList {
  std::size_t degree = 1;
  std::vector<std::vector<std::uint32_t>> perms;
};

/// Throws InvalidPermutation unless every image array is a bijection of the
/// declared degree.
void validate(const PermList& gens);

/// 1-based cycle notation, e.g. "(1,2,3)(4,5)"; identity renders as "()".
std::string cycle_string(std::span<const std::uint32_t> image);

/// A finite group materialized as dense element ids 0..N-1 with identity 0.
/// Immutable after construction; share through GroupPtr.
class GroupTable {
 public:
  GroupTable(std::size_t order, std::vector<ElementId> mul,
             std::vector<ElementId> inv, std::vector<std::string> labels,
             std::string name);

  std::size_t order() const { return order_; }
  ElementId mul(ElementId a, ElementId b) const {
    return mul_[static_cast<std::size_t>(a) * order_ + b];
  }
  ElementId inv(ElementId a) const { return inv_[a]; }
  std::span<const ElementId> row(ElementId a) const {
    return {mul_.data() + static_cast<std::size_t>(a) * order_, order_};
  }

  const std::string& name() const { return name_; }
  bool has_labels() const { return !labels_.empty(); }
  std::string label(ElementId a) const;

  std::size_t element_order(ElementId a) const;
  bool is_abelian() const;

 private:
  std::size_t order_;
  std::vector<ElementId> mul_;
  std::vector<ElementId> inv_;
  std::vector<std::string> labels_;
  std::string name_;
};

using GroupPtr = std::shared_ptr<const GroupTable>;

/// Returns a description of the first violated group axiom, or nullopt.
/// Associativity is exhaustive up to `exhaustive_limit`, sampled above it.
std::optional<std::string> check_group_axioms(const GroupTable& g,
                                              std::size_t exhaustive_limit = 256,
                                              std::uint64_t seed = 1);

/// A subgroup stored by membership in its parent. Copies are cheap and share
/// the normality cache.
class SubgroupRef {
  struct Data {
    GroupPtr parent;
    std::vector<ElementId> members;
    std::vector<std::uint8_t> mask;
    std::string label;
    // -1 unknown, 0 not normal, 1 normal.
    mutable std::atomic<int> normal{-1};
  };

 public:
  /// Validates that `members` is a subgroup of `parent`; throws
  /// InvalidArgument otherwise.
  static SubgroupRef from_members(GroupPtr parent, std::vector<ElementId> members,
                                  std::string label = {});
  /// For callers that already know `members` is a sorted subgroup.
  static SubgroupRef unchecked(GroupPtr parent, std::vector<ElementId> members,
                               std::string label = {});

  const GroupPtr& parent_ptr() const { return data_->parent; }
  const GroupTable& parent() const { return *data_->parent; }
  std::span<const ElementId> members() const { return data_->members; }
  std::size_t order() const { return data_->members.size(); }
  bool contains(ElementId x) const { return data_->mask[x] != 0; }
  bool is_trivial() const { return order() == 1; }
  bool is_full() const { return order() == parent().order(); }
  bool is_subset_of(const SubgroupRef& other) const;
  bool same_members(const SubgroupRef& other) const;

  /// Re-parseable subgroup spec when known ("full", "gen[1,2]", ...), else a
  /// member list rendering.
  std::string label() const;

  std::optional<bool> cached_normality() const;
  void cache_normality(bool normal) const;

 private:
  explicit SubgroupRef(std::shared_ptr<Data> data) : data_(std::move(data)) {}
  std::shared_ptr<Data> data_;
};

bool same_parent(const SubgroupRef& a, const SubgroupRef& b);
/// Throws ForeignSubgroup when `h` does not live in `g`.
void require_parent(const GroupTable& g, const SubgroupRef& h);

struct ConjugacyInfo {
  std::vector<std::vector<ElementId>> classes;
  std::vector<std::size_t> class_of;
  std::vector<std::size_t> centralizer_order;
};

struct ProductGroup {
  GroupPtr group;
  std::vector<ElementId> proj1;
  std::vector<ElementId> proj2;
};

struct QuotientGroup {
  GroupPtr group;
  std::vector<ElementId> projection;
};

GroupPtr close_group(const PermList& gens, std::size_t max_order = kDefaultMaxOrder,
                     std::string name = {});

/// family is one of C, D, S, A, Q (Q only with parameter 8). D n has order 2n.
GroupPtr named_group(char family, unsigned param,
                     std::size_t max_order = kDefaultMaxOrder);

ProductGroup direct_product(const GroupPtr& g1, const GroupPtr& g2,
                            std::size_t max_order = kDefaultMaxOrder);

/// The subgroup A x B of a product built by direct_product.
SubgroupRef product_subgroup(const ProductGroup& product, const SubgroupRef& a,
                             const SubgroupRef& b);

SubgroupRef subgroup_closure(const GroupPtr& g, std::span<const ElementId> seed,
                             std::string label = {});
SubgroupRef trivial_subgroup(const GroupPtr& g);
SubgroupRef full_subgroup(const GroupPtr& g);

bool is_normal(const GroupTable& g, const SubgroupRef& h);

SubgroupRef centralizer_of_element(const GroupTable& g, const SubgroupRef& k, ElementId w);
SubgroupRef centralizer_of_subgroup(const SubgroupRef& h, const SubgroupRef& k);

/// Orbits of G's elements under conjugation by K, ordered by least member.
ConjugacyInfo conjugacy(const GroupTable& g, const SubgroupRef& k);
/// G-conjugacy classes of G.
ConjugacyInfo conjugacy(const GroupPtr& g);

SubgroupRef center(const GroupPtr& g);

/// Cosets are ordered by their least member id. Throws NotNormal.
QuotientGroup quotient_group(const GroupPtr& g, const SubgroupRef& n);

/// Image of `h` under the quotient projection.
SubgroupRef image_subgroup(const SubgroupRef& h, const QuotientGroup& q);

unsigned smallest_prime_divisor(const GroupTable& g);

/// Every subgroup of `g`, sorted by (order, members). Exponential in general;
/// intended for small groups.
std::vector<SubgroupRef> all_subgroups(const GroupPtr& g);

}  // namespace commdeg
