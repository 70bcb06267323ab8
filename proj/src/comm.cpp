#include "commdeg/comm.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "commdeg/error.hpp"

namespace commdeg {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Brute: return "brute";
    case Method::ClassFormula: return "class_formula";
    case Method::Distribution: return "distribution";
    case Method::Character: return "character";
  }
  return "unknown";
}

std::string_view predicate_name(Predicate p) {
  return p == Predicate::Derived ? "derived" : "paper";
}

void CommParams::validate() const {
  if (!same_parent(H, K)) {
    throw Error(ErrorCode::ForeignSubgroup, "H and K must share a parent group");
  }
  if (n < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "n and m must be at least 1");
  if (g >= group().order()) {
    throw Error(ErrorCode::InvalidArgument, "element id " + std::to_string(g) +
                                                " out of range for order " +
                                                std::to_string(group().order()));
  }
}

BigInt CommDistribution::total() const {
  BigInt sum = 0;
  for (const auto& c : counts) sum += c;
  return sum;
}

std::vector<ElementId> CommDistribution::support() const {
  std::vector<ElementId> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) out.push_back(static_cast<ElementId>(i));
  }
  return out;
}

ElementId left_normed_commutator(const GroupTable& g, std::span<const ElementId> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptyTuple, "left-normed commutator of empty tuple");
  ElementId acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = commutator(g, acc, xs[i]);
  return acc;
}

BigInt tuple_count(const SubgroupRef& h, const SubgroupRef& k, unsigned n, unsigned m) {
  return ipow(BigInt(h.order()), n) * ipow(BigInt(k.order()), m);
}

namespace {

constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

bool fits_u64(const BigInt& v) { return v <= BigInt(kU64Max); }

// Splits [0, count) into contiguous chunks, one accumulator per worker, and
// sums the accumulators in worker order. Integer sums make the result
// independent of the split.
template <class Count, class Body>
std::vector<Count> parallel_accumulate(std::size_t count, std::size_t width, unsigned threads,
                                       Body body) {
  const unsigned workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, count)));
  if (workers <= 1) {
    std::vector<Count> acc(width, Count(0));
    body(std::size_t{0}, count, acc);
    return acc;
  }
  std::vector<std::vector<Count>> partial(workers, std::vector<Count>(width, Count(0)));
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    const std::size_t begin = std::min(count, t * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, t, begin, end] { body(begin, end, partial[t]); });
  }
  for (auto& th : pool) th.join();
  for (unsigned t = 1; t < workers; ++t) {
    for (std::size_t i = 0; i < width; ++i) partial[0][i] += partial[t][i];
  }
  return std::move(partial[0]);
}

template <class Count>
std::vector<Count> commutation_step(const GroupTable& g, const std::vector<Count>& in,
                                    const SubgroupRef& s, unsigned threads) {
  std::vector<ElementId> supp;
  for (std::size_t w = 0; w < in.size(); ++w) {
    if (in[w] != 0) supp.push_back(static_cast<ElementId>(w));
  }
  std::vector<ElementId> inv_s;
  inv_s.reserve(s.order());
  for (auto x : s.members()) inv_s.push_back(g.inv(x));
  const auto members = s.members();
  return parallel_accumulate<Count>(
      supp.size(), in.size(), threads,
      [&](std::size_t begin, std::size_t end, std::vector<Count>& acc) {
        for (std::size_t i = begin; i < end; ++i) {
          const ElementId w = supp[i];
          const Count& c = in[w];
          const auto row_wi = g.row(g.inv(w));
          const auto row_w = g.row(w);
          for (std::size_t j = 0; j < members.size(); ++j) {
            acc[g.mul(row_wi[inv_s[j]], row_w[members[j]])] += c;
          }
        }
      });
}

template <class Count>
std::vector<Count> run_steps(const GroupTable& g, std::vector<Count> counts, const SubgroupRef& s,
                             unsigned steps, unsigned threads) {
  for (unsigned i = 0; i < steps; ++i) counts = commutation_step(g, counts, s, threads);
  return counts;
}

std::vector<BigInt> to_big(const std::vector<std::uint64_t>& v) {
  return {v.begin(), v.end()};
}

std::string block_source(const SubgroupRef& s, char var, unsigned count) {
  return std::string(1, var) + "-block " + s.label() + "^" + std::to_string(count);
}

void brute_recurse(const GroupTable& g, const std::vector<std::span<const ElementId>>& slots,
                   std::size_t depth, ElementId value, std::vector<std::uint64_t>& hist) {
  const auto slot = slots[depth];
  if (depth + 1 == slots.size()) {
    const auto row_vi = g.row(g.inv(value));
    const auto row_v = g.row(value);
    for (auto x : slot) ++hist[g.mul(row_vi[g.inv(x)], row_v[x])];
    return;
  }
  for (auto x : slot) brute_recurse(g, slots, depth + 1, commutator(g, value, x), hist);
}

ExactProb make_prob(const BigInt& count, const BigInt& total, Method method,
                    const CommParams& params) {
  return ExactProb{Rational(count, total), method, params};
}

}  // namespace

CommDistribution brute_distribution(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                    unsigned m, const EngineOptions& opts) {
  if (!same_parent(h, k)) throw Error(ErrorCode::ForeignSubgroup, "H and K must share a parent");
  if (n < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "n and m must be at least 1");
  const BigInt total = tuple_count(h, k, n, m);
  if (total > BigInt(opts.brute_cap)) {
    throw Error(ErrorCode::BruteCapExceeded,
                "brute force needs " + total.str() + " tuples, cap is " +
                    std::to_string(opts.brute_cap));
  }
  const auto& g = h.parent();
  std::vector<std::span<const ElementId>> slots;
  for (unsigned i = 0; i < n; ++i) slots.push_back(h.members());
  for (unsigned i = 0; i < m; ++i) slots.push_back(k.members());

  const auto first = h.members();
  auto hist = parallel_accumulate<std::uint64_t>(
      first.size(), g.order(), opts.threads,
      [&](std::size_t begin, std::size_t end, std::vector<std::uint64_t>& acc) {
        for (std::size_t i = begin; i < end; ++i) brute_recurse(g, slots, 1, first[i], acc);
      });
  return {to_big(hist), n, m, "brute " + block_source(h, 'x', n) + ", " + block_source(k, 'y', m)};
}

ExactProb prob_brute(const CommParams& params, const EngineOptions& opts) {
  params.validate();
  auto dist = brute_distribution(params.H, params.K, params.n, params.m, opts);
  return make_prob(dist.counts[params.g], tuple_count(params.H, params.K, params.n, params.m),
                   Method::Brute, params);
}

CommDistribution comm_distribution(const SubgroupRef& h, unsigned n, const EngineOptions& opts) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be at least 1");
  const auto& g = h.parent();
  CommDistribution out;
  out.x_slots = n;
  out.source = block_source(h, 'x', n);
  if (fits_u64(ipow(BigInt(h.order()), n))) {
    std::vector<std::uint64_t> base(g.order(), 0);
    for (auto x : h.members()) base[x] = 1;
    out.counts = to_big(run_steps(g, std::move(base), h, n - 1, opts.threads));
  } else {
    std::vector<BigInt> base(g.order(), 0);
    for (auto x : h.members()) base[x] = 1;
    out.counts = run_steps(g, std::move(base), h, n - 1, opts.threads);
  }
  return out;
}

CommDistribution extend_by_conjugators(const CommDistribution& dist, const SubgroupRef& k,
                                       unsigned m, const EngineOptions& opts) {
  const auto& g = k.parent();
  if (dist.counts.size() != g.order()) {
    throw Error(ErrorCode::ForeignSubgroup, "distribution does not live in K's parent group");
  }
  CommDistribution out;
  out.x_slots = dist.x_slots;
  out.y_slots = dist.y_slots + m;
  out.source = dist.source + ", " + block_source(k, 'y', m);
  if (fits_u64(dist.total() * ipow(BigInt(k.order()), m))) {
    std::vector<std::uint64_t> in;
    in.reserve(dist.counts.size());
    for (const auto& c : dist.counts) in.push_back(c.convert_to<std::uint64_t>());
    out.counts = to_big(run_steps(g, std::move(in), k, m, opts.threads));
  } else {
    out.counts = run_steps(g, dist.counts, k, m, opts.threads);
  }
  return out;
}

ExactProb prob_fast_from(const CommDistribution& x_block, const CommParams& params,
                         const EngineOptions& opts) {
  params.validate();
  auto full = extend_by_conjugators(x_block, params.K, params.m, opts);
  return make_prob(full.counts[params.g], tuple_count(params.H, params.K, params.n, params.m),
                   Method::Distribution, params);
}

ExactProb prob_fast(const CommParams& params, const EngineOptions& opts) {
  params.validate();
  return prob_fast_from(comm_distribution(params.H, params.n, opts), params, opts);
}

BigInt class_formula_count(const GroupTable& g, const CommDistribution& x_block,
                           const ConjugacyInfo& conj_k, unsigned m, ElementId target,
                           Predicate predicate) {
  const ElementId target_inv = g.inv(target);
  BigInt sum = 0;
  for (std::size_t i = 0; i < x_block.counts.size(); ++i) {
    if (x_block.counts[i] == 0) continue;
    const auto w = static_cast<ElementId>(i);
    const ElementId probe =
        predicate == Predicate::Derived ? g.mul(w, target) : g.mul(target_inv, w);
    if (conj_k.class_of[probe] != conj_k.class_of[w]) continue;
    sum += x_block.counts[i] * ipow(BigInt(conj_k.centralizer_order[w]), m);
  }
  return sum;
}

ExactProb prob_class_formula_from(const CommDistribution& x_block, const CommParams& params,
                                  const EngineOptions& opts) {
  params.validate();
  const auto& g = params.group();
  const auto conj = conjugacy(g, params.K);
  const BigInt sum = class_formula_count(g, x_block, conj, params.m, params.g, opts.predicate);
  return make_prob(sum, tuple_count(params.H, params.K, params.n, params.m),
                   Method::ClassFormula, params);
}

ExactProb prob_class_formula(const CommParams& params, const EngineOptions& opts) {
  params.validate();
  return prob_class_formula_from(comm_distribution(params.H, params.n, opts), params, opts);
}

BigInt zeta(const GroupTable& g, const SubgroupRef& h, ElementId target) {
  require_parent(g, h);
  if (target >= g.order()) throw Error(ErrorCode::InvalidArgument, "element id out of range");
  const auto conj = conjugacy(g, full_subgroup(h.parent_ptr()));
  BigInt sum = 0;
  for (auto x : h.members()) {
    if (conj.class_of[g.mul(x, target)] == conj.class_of[x]) sum += conj.centralizer_order[x];
  }
  return sum;
}

BigInt zeta_nm(const CommParams& params, const EngineOptions& opts) {
  params.validate();
  if (!params.K.is_full()) {
    throw Error(ErrorCode::InvalidArgument, "zeta_nm requires K to be the whole group");
  }
  auto full = extend_by_conjugators(comm_distribution(params.H, params.n, opts), params.K,
                                    params.m, opts);
  return full.counts[params.g];
}

std::vector<ElementId> commutator_value_set(const SubgroupRef& h, const SubgroupRef& k,
                                            unsigned n, unsigned m, const EngineOptions& opts) {
  if (!same_parent(h, k)) throw Error(ErrorCode::ForeignSubgroup, "H and K must share a parent");
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be at least 1");
  return extend_by_conjugators(comm_distribution(h, n, opts), k, m, opts).support();
}

SubgroupRef nested_commutator_subgroup(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                       unsigned m, const EngineOptions& opts) {
  auto values = commutator_value_set(h, k, n, m, opts);
  return subgroup_closure(h.parent_ptr(), values);
}

ExactProb nilpotency_degree(const SubgroupRef& h, unsigned n, const EngineOptions& opts) {
  return prob_fast(CommParams{h, full_subgroup(h.parent_ptr()), n, 1, kIdentity}, opts);
}

ExactProb commutativity_degree(const GroupPtr& g, const EngineOptions& opts) {
  return nilpotency_degree(full_subgroup(g), 1, opts);
}

std::vector<ExactProb> prob_profile(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                                    unsigned m, const EngineOptions& opts) {
  CommParams base{h, k, n, m, kIdentity};
  base.validate();
  auto full = extend_by_conjugators(comm_distribution(h, n, opts), k, m, opts);
  const BigInt total = tuple_count(h, k, n, m);
  std::vector<ExactProb> out;
  out.reserve(full.counts.size());
  for (std::size_t i = 0; i < full.counts.size(); ++i) {
    base.g = static_cast<ElementId>(i);
    out.push_back(make_prob(full.counts[i], total, Method::Distribution, base));
  }
  return out;
}

BigInt y_set_size(const SubgroupRef& h, const SubgroupRef& k, unsigned n,
                  const EngineOptions& opts) {
  if (!same_parent(h, k)) throw Error(ErrorCode::ForeignSubgroup, "H and K must share a parent");
  const auto dist = comm_distribution(h, n, opts);
  const auto conj = conjugacy(h.parent(), k);
  BigInt sum = 0;
  for (std::size_t w = 0; w < dist.counts.size(); ++w) {
    if (conj.centralizer_order[w] == 1) sum += dist.counts[w];
  }
  return sum;
}

}  // namespace commdeg
