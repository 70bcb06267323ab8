#include "commdeg/character.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "commdeg/comm.hpp"
#include "commdeg/error.hpp"

namespace commdeg {

namespace {

double row_deviation(const CharacterTable& t) {
  const double order = static_cast<double>(t.group->order());
  double worst = 0;
  for (std::size_t i = 0; i < t.irreducibles.size(); ++i) {
    for (std::size_t j = 0; j < t.irreducibles.size(); ++j) {
      Complex sum = 0;
      for (std::size_t k = 0; k < t.num_classes(); ++k) {
        sum += static_cast<double>(t.class_sizes[k]) * t.irreducibles[i].values[k] *
               std::conj(t.irreducibles[j].values[k]);
      }
      worst = std::max(worst, std::abs(sum / order - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double column_deviation(const CharacterTable& t) {
  const double order = static_cast<double>(t.group->order());
  double worst = 0;
  for (std::size_t a = 0; a < t.num_classes(); ++a) {
    for (std::size_t b = 0; b < t.num_classes(); ++b) {
      Complex sum = 0;
      for (const auto& chi : t.irreducibles) sum += chi.values[a] * std::conj(chi.values[b]);
      const double ca = order / static_cast<double>(t.class_sizes[a]);
      const double cb = order / static_cast<double>(t.class_sizes[b]);
      worst = std::max(worst, std::abs(sum - (a == b ? ca : 0.0)) / std::sqrt(ca * cb));
    }
  }
  return worst;
}

// Descending lexicographic order on values rounded to the rounding tolerance.
bool value_key_greater(const ClassFunction& a, const ClassFunction& b) {
  auto key = [](double v) { return std::llround(v / kRoundingTol); };
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const auto ar = key(a.values[k].real()), br = key(b.values[k].real());
    if (ar != br) return ar > br;
    const auto ai = key(a.values[k].imag()), bi = key(b.values[k].imag());
    if (ai != bi) return ai > bi;
  }
  return false;
}

struct Attempt {
  std::vector<ClassFunction> chars;
  std::vector<unsigned> degrees;
};

enum class AttemptFailure { None, Degenerate, Tolerance };

AttemptFailure try_diagonalize(const CharacterTable& skel, const std::vector<double>& coeffs,
                               const CharTableOptions& opts, Attempt& out) {
  const auto& g = *skel.group;
  const std::size_t r = skel.num_classes();
  const double order = static_cast<double>(g.order());

  // M(j,k) = sum_i c_i a_ijk with a_ijk = #{(x,y) in C_i x C_j : xy = rep_k}.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r),
                                            static_cast<Eigen::Index>(r));
  for (std::size_t k = 0; k < r; ++k) {
    const ElementId z = skel.class_reps[k];
    for (ElementId x = 0; x < g.order(); ++x) {
      const ElementId y = g.mul(g.inv(x), z);
      m(static_cast<Eigen::Index>(skel.class_of[y]), static_cast<Eigen::Index>(k)) +=
          coeffs[skel.class_of[x]];
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, true);
  if (solver.info() != Eigen::Success) return AttemptFailure::Degenerate;
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  const Eigen::MatrixXcd vecs = solver.eigenvectors();

  double scale = 1.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) scale = std::max(scale, std::abs(lambda[i]));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(lambda[i] - lambda[j]) < opts.eigen_gap * scale) {
        return AttemptFailure::Degenerate;
      }
    }
  }

  out.chars.clear();
  out.degrees.clear();
  for (Eigen::Index col = 0; col < static_cast<Eigen::Index>(r); ++col) {
    const Complex lead = vecs(0, col);
    if (std::abs(lead) < 1e-12) return AttemptFailure::Degenerate;
    std::vector<Complex> omega(r);
    double weight = 0;
    for (std::size_t k = 0; k < r; ++k) {
      omega[k] = vecs(static_cast<Eigen::Index>(k), col) / lead;
      weight += std::norm(omega[k]) / static_cast<double>(skel.class_sizes[k]);
    }
    const double degree = std::sqrt(order / weight);
    const double rounded = std::round(degree);
    if (rounded < 1 || std::abs(degree - rounded) > kRoundingTol) return AttemptFailure::Tolerance;
    ClassFunction chi;
    chi.values.resize(r);
    for (std::size_t k = 0; k < r; ++k) {
      chi.values[k] = rounded * omega[k] / static_cast<double>(skel.class_sizes[k]);
    }
    chi.values[0] = rounded;
    out.chars.push_back(std::move(chi));
    out.degrees.push_back(static_cast<unsigned>(rounded));
  }
  return AttemptFailure::None;
}

}  // namespace

CharacterTable class_skeleton(const GroupPtr& g) {
  auto conj = conjugacy(g);
  std::vector<std::size_t> idx(conj.classes.size());
  std::iota(idx.begin(), idx.end(), 0);
  // conjugacy() already orders by least member; stable sort keeps that as the
  // tie-break.
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return conj.classes[a].size() < conj.classes[b].size();
  });
  CharacterTable t;
  t.group = g;
  t.class_of.assign(g->order(), 0);
  for (std::size_t pos = 0; pos < idx.size(); ++pos) {
    auto& cls = conj.classes[idx[pos]];
    for (auto x : cls) t.class_of[x] = pos;
    t.class_sizes.push_back(cls.size());
    t.class_reps.push_back(cls.front());
    t.classes.push_back(std::move(cls));
  }
  return t;
}

CharacterTable character_table(const GroupPtr& g, const CharTableOptions& opts) {
  CharacterTable table = class_skeleton(g);
  table.tolerance = opts.tolerance;
  const std::size_t r = table.num_classes();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  AttemptFailure last = AttemptFailure::Degenerate;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    std::vector<double> coeffs(r);
    for (auto& c : coeffs) c = coeff(rng);
    Attempt result;
    last = try_diagonalize(table, coeffs, opts, result);
    if (last != AttemptFailure::None) continue;

    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (result.degrees[a] != result.degrees[b]) return result.degrees[a] < result.degrees[b];
      return value_key_greater(result.chars[a], result.chars[b]);
    });
    table.irreducibles.clear();
    table.degrees.clear();
    for (auto i : order) {
      table.irreducibles.push_back(result.chars[i]);
      table.degrees.push_back(result.degrees[i]);
    }
    const auto report = verify_orthogonality(table, opts.tolerance);
    if (report.pass) return table;
    last = AttemptFailure::Tolerance;
  }
  if (last == AttemptFailure::Degenerate) {
    throw Error(ErrorCode::DegenerateEigenbasis,
                "no separating class-matrix combination found for " + g->name());
  }
  throw Error(ErrorCode::ToleranceExceeded,
              "character table of " + g->name() + " failed orthogonality checks");
}

OrthogonalityReport verify_orthogonality(const CharacterTable& table, double threshold) {
  OrthogonalityReport report;
  report.row_deviation = row_deviation(table);
  report.column_deviation = column_deviation(table);
  report.pass = table.irreducibles.size() == table.num_classes() &&
                report.row_deviation < threshold && report.column_deviation < threshold;
  return report;
}

double prob_char_pg(const CharacterTable& table, ElementId g) {
  if (g >= table.group->order()) throw Error(ErrorCode::InvalidArgument, "element id out of range");
  Complex sum = 0;
  for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
    sum += table.value(i, g) / static_cast<double>(table.degrees[i]);
  }
  sum /= static_cast<double>(table.group->order());
  if (std::abs(sum.imag()) > kComparisonTol) {
    throw Error(ErrorCode::ImaginaryResidue,
                "imaginary part " + std::to_string(sum.imag()) + " exceeds tolerance");
  }
  return sum.real();
}

std::vector<Complex> decompose(const ClassFunction& f, const CharacterTable& table) {
  if (f.values.size() != table.num_classes()) {
    throw Error(ErrorCode::InvalidArgument, "class function length does not match the table");
  }
  const double order = static_cast<double>(table.group->order());
  std::vector<Complex> out;
  out.reserve(table.irreducibles.size());
  for (const auto& chi : table.irreducibles) {
    Complex sum = 0;
    for (std::size_t k = 0; k < table.num_classes(); ++k) {
      sum += static_cast<double>(table.class_sizes[k]) * f.values[k] * std::conj(chi.values[k]);
    }
    out.push_back(sum / order);
  }
  return out;
}

CharacterReport is_character(const ClassFunction& f, const CharacterTable& table) {
  CharacterReport report;
  report.multiplicities = decompose(f, table);
  bool ok = true;
  for (const auto& mult : report.multiplicities) {
    const double nearest = std::round(mult.real());
    const double dev = std::abs(mult - Complex(nearest, 0));
    report.rounding_deviation = std::max(report.rounding_deviation, dev);
    report.rounded.push_back(static_cast<long long>(nearest));
    if (dev > kRoundingTol || nearest < 0) ok = false;
  }
  double scale = 1.0;
  for (const auto& v : f.values) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < table.num_classes(); ++k) {
    Complex recon = 0;
    for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
      recon += static_cast<double>(report.rounded[i]) * table.irreducibles[i].values[k];
    }
    report.reconstruction_deviation =
        std::max(report.reconstruction_deviation, std::abs(recon - f.values[k]) / scale);
  }
  report.is_character = ok && report.reconstruction_deviation < kRoundingTol;
  return report;
}

bool is_class_constant(const CharacterTable& table, std::span<const BigInt> counts) {
  if (counts.size() != table.group->order()) {
    throw Error(ErrorCode::InvalidArgument, "counts length does not match group order");
  }
  for (const auto& cls : table.classes) {
    for (auto x : cls) {
      if (counts[x] != counts[cls.front()]) return false;
    }
  }
  return true;
}

ClassFunction class_function_from_counts(const CharacterTable& table,
                                         std::span<const BigInt> counts) {
  if (!is_class_constant(table, counts)) {
    throw Error(ErrorCode::NotClassFunction, "counts are not constant on conjugacy classes");
  }
  ClassFunction f;
  for (auto rep : table.class_reps) f.values.emplace_back(counts[rep].convert_to<double>(), 0.0);
  return f;
}

PsiResult psi_class_function(const CharacterTable& table) {
  const auto& g = *table.group;
  const auto full = full_subgroup(table.group);
  std::vector<BigInt> counts(g.order());
  for (ElementId x = 0; x < g.order(); ++x) counts[x] = zeta(g, full, x);
  PsiResult out;
  out.psi = class_function_from_counts(table, counts);
  for (auto rep : table.class_reps) out.exact.push_back(counts[rep]);
  out.multiplicities = decompose(out.psi, table);
  for (std::size_t i = 0; i < out.multiplicities.size(); ++i) {
    const double expected = static_cast<double>(g.order()) / table.degrees[i];
    out.max_deviation = std::max(out.max_deviation, std::abs(out.multiplicities[i] - expected));
  }
  return out;
}

double restriction_norm(const CharacterTable& table, std::size_t chi, const SubgroupRef& h) {
  require_parent(*table.group, h);
  double sum = 0;
  for (auto x : h.members()) sum += std::norm(table.value(chi, x));
  return sum / static_cast<double>(h.order());
}

double prob_char_relative(const CharacterTable& table, const SubgroupRef& h, ElementId g) {
  if (!is_normal(*table.group, h)) {
    throw Error(ErrorCode::NotNormal, "subgroup " + h.label() + " is not normal");
  }
  if (g >= table.group->order()) throw Error(ErrorCode::InvalidArgument, "element id out of range");
  const double hs = static_cast<double>(h.order());
  Complex sum = 0;
  for (std::size_t i = 0; i < table.irreducibles.size(); ++i) {
    sum += hs * restriction_norm(table, i, h) / table.degrees[i] * table.value(i, g);
  }
  sum /= hs * static_cast<double>(table.group->order());
  if (std::abs(sum.imag()) > kComparisonTol) {
    throw Error(ErrorCode::ImaginaryResidue, "imaginary residue in relative character sum");
  }
  return sum.real();
}

bool vanishes_outside(const CharacterTable& table, std::size_t chi, const SubgroupRef& h) {
  require_parent(*table.group, h);
  for (ElementId x = 0; x < table.group->order(); ++x) {
    if (!h.contains(x) && std::abs(table.value(chi, x)) >= kComparisonTol) return false;
  }
  return true;
}

}  // namespace commdeg
