#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "commdeg/group.hpp"
#include "commdeg/rational.hpp"

namespace commdeg {

using Complex = std::complex<double>;

inline constexpr double kConstructionTol = 1e-8;
inline constexpr double kRoundingTol = 1e-6;
inline constexpr double kComparisonTol = 1e-8;

/// One complex value per conjugacy class of the owning table.
struct ClassFunction {
  std::vector<Complex> values;
};

/// Numerical character table. Classes are sorted by (size, least member id),
/// so class 0 is the identity; irreducibles by degree, then by values in
/// descending lexicographic order (trivial character first).
struct CharacterTable {
  GroupPtr group;
  std::vector<std::vector<ElementId>> classes;
  std::vector<std::size_t> class_sizes;
  std::vector<ElementId> class_reps;
  std::vector<std::size_t> class_of;
  std::vector<ClassFunction> irreducibles;
  std::vector<unsigned> degrees;
  double tolerance = kConstructionTol;

  std::size_t num_classes() const { return classes.size(); }
  Complex value(std::size_t chi, ElementId x) const {
    return irreducibles[chi].values[class_of[x]];
  }
};

struct CharTableOptions {
  std::uint64_t seed = 0x5eed;
  int max_retries = 20;
  double eigen_gap = 1e-8;
  double tolerance = kConstructionTol;
};

/// Burnside's method: the central characters are the common eigenvectors of
/// the class-multiplication matrices, found by diagonalizing one random real
/// combination of them.
CharacterTable character_table(const GroupPtr& g, const CharTableOptions& opts = {});

/// Classes of G in table order, without the irreducibles.
CharacterTable class_skeleton(const GroupPtr& g);

struct OrthogonalityReport {
  double row_deviation = 0;
  double column_deviation = 0;
  bool pass = false;
};

OrthogonalityReport verify_orthogonality(const CharacterTable& table,
                                         double threshold = kRoundingTol);

/// p_g(G) = (1/|G|) sum_chi chi(g)/chi(1). Throws ImaginaryResidue.
double prob_char_pg(const CharacterTable& table, ElementId g);

/// <f, chi_i> for every irreducible.
std::vector<Complex> decompose(const ClassFunction& f, const CharacterTable& table);

struct CharacterReport {
  bool is_character = false;
  std::vector<Complex> multiplicities;
  std::vector<long long> rounded;
  double rounding_deviation = 0;
  double reconstruction_deviation = 0;  // relative to max(1, max |f|)
};

CharacterReport is_character(const ClassFunction& f, const CharacterTable& table);

/// Lifts exact per-element counts to a class function. Throws
/// NotClassFunction when the counts differ inside a class.
ClassFunction class_function_from_counts(const CharacterTable& table,
                                         std::span<const BigInt> counts);
bool is_class_constant(const CharacterTable& table, std::span<const BigInt> counts);

struct PsiResult {
  std::vector<BigInt> exact;  // psi per class, exact
  ClassFunction psi;
  std::vector<Complex> multiplicities;
  double max_deviation = 0;  // max |m_i - |G|/chi_i(1)|
};

/// psi(g) = #{(x,y) in G x G : [x,y] = g} and its decomposition.
PsiResult psi_class_function(const CharacterTable& table);

/// <chi_H, chi_H>_H.
double restriction_norm(const CharacterTable& table, std::size_t chi, const SubgroupRef& h);

/// Character-sum form of p_g^(1,1)(H,G) for normal H. Throws NotNormal.
double prob_char_relative(const CharacterTable& table, const SubgroupRef& h, ElementId g);

bool vanishes_outside(const CharacterTable& table, std::size_t chi, const SubgroupRef& h);

}  // namespace commdeg
