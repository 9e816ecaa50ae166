#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cat0/rational.hpp"

namespace cat0 {

enum class FamilyKind { FreeGroup, FreeAbelian, FiniteCyclic, FreeProduct, DirectWithLine };

// The line factor of a direct product: Z acting by translations, or the
// infinite dihedral group Z_2 * Z_2 acting on the line by reflections.
enum class LineKind { Translation, Dihedral };

class GroupFamily;
using FamilyPtr = std::shared_ptr<const GroupFamily>;

class GroupFamily {
 public:
  FamilyKind kind() const { return kind_; }
  int rank() const { return rank_; }
  int order() const { return order_; }
  const std::vector<FamilyPtr>& factors() const { return factors_; }
  const FamilyPtr& base() const { return base_; }
  LineKind line_kind() const { return line_kind_; }

  // Generators are flattened: free product factors in order, then for a
  // direct product the base generators followed by the line generators.
  int generator_count() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& generator_names() const { return names_; }
  const std::string& generator_name(int gen) const { return names_.at(gen); }
  int generator_index(std::string_view name) const;  // throws std::invalid_argument

  // Free products only.
  int factor_of_generator(int gen) const;
  int factor_offset(int factor) const { return offsets_.at(factor); }

  // Direct products only: index of the first line generator.
  int line_generator() const;

  bool is_involution(int gen) const;
  // Free groups and free products of Z and Z_2 factors: the Cayley graph with
  // respect to the flattened generators is a tree.
  bool has_tree_cayley_graph() const;

  std::string describe() const;

  friend FamilyPtr free_group(int k, std::vector<std::string> names);
  friend FamilyPtr free_abelian(int n, std::vector<std::string> names);
  friend FamilyPtr finite_cyclic(int m, std::vector<std::string> names);
  friend FamilyPtr free_product(std::vector<FamilyPtr> factors, std::vector<std::string> names);
  friend FamilyPtr direct_with_line(FamilyPtr base, LineKind line, std::vector<std::string> names);

 private:
  FamilyKind kind_ = FamilyKind::FreeGroup;
  int rank_ = 0;
  int order_ = 0;
  std::vector<FamilyPtr> factors_;
  std::vector<int> offsets_;
  FamilyPtr base_;
  LineKind line_kind_ = LineKind::Translation;
  std::vector<std::string> names_;
};

// Factories validate ranks and orders and throw std::invalid_argument.
// An empty name list selects default names.
FamilyPtr free_group(int k, std::vector<std::string> names = {});
FamilyPtr free_abelian(int n, std::vector<std::string> names = {});
FamilyPtr finite_cyclic(int m, std::vector<std::string> names = {});
FamilyPtr free_product(std::vector<FamilyPtr> factors, std::vector<std::string> names = {});
FamilyPtr direct_with_line(FamilyPtr base, LineKind line = LineKind::Translation,
                           std::vector<std::string> names = {});

bool same_family(const GroupFamily& a, const GroupFamily& b);

// A maximal power of one free-group generator inside a reduced word.
struct Run {
  int gen = 0;
  std::int64_t exp = 0;
  bool operator==(const Run&) const = default;
};

// Element in normal form. The fields used depend on the family:
//   FreeGroup      runs_ (adjacent runs have distinct generators)
//   FreeAbelian    coords_ (n integers)
//   FiniteCyclic   coords_ (one residue in [0, m))
//   FreeProduct    alternating nontrivial syllables
//   DirectWithLine base_ (one element) and line_
// For the dihedral line, line_ = t encodes x -> (-1)^t x + t on the orbit of
// the basepoint, so that c1 = +1, c2 = -1 and the word length is |t|.
class GroupElement {
 public:
  GroupElement() = default;
  static GroupElement identity(FamilyPtr family);
  static GroupElement generator(FamilyPtr family, int gen, std::int64_t exp = 1);
  static GroupElement abelian(FamilyPtr family, std::vector<std::int64_t> coords);
  static GroupElement direct(FamilyPtr family, GroupElement base, std::int64_t line);
  // The element of a free product given by one factor element.
  static GroupElement syllable(FamilyPtr product, int factor, GroupElement value);

  const FamilyPtr& family() const { return family_; }
  bool is_identity() const;

  const std::vector<Run>& runs() const { return runs_; }
  const std::vector<std::int64_t>& coords() const { return coords_; }
  const std::vector<int>& syllable_factors() const { return syllable_factor_; }
  const std::vector<GroupElement>& syllable_values() const { return syllable_value_; }
  const GroupElement& base() const { return base_.at(0); }
  std::int64_t line() const { return line_; }

  GroupElement& operator*=(const GroupElement& other);
  GroupElement inverse() const;

  // Letters of the normal form as codes 2*gen + (inverse ? 1 : 0), flattened
  // generator indices. Used for deterministic tie-breaking.
  std::vector<int> letters() const;
  std::size_t letter_count() const;

  std::string to_string() const;
  std::size_t hash() const;

  bool operator==(const GroupElement& other) const;

 private:
  void check_same_family(const GroupElement& other) const;
  void append_letters(std::vector<int>& out, int offset) const;

  FamilyPtr family_;
  std::vector<Run> runs_;
  std::vector<std::int64_t> coords_;
  std::vector<int> syllable_factor_;
  std::vector<GroupElement> syllable_value_;
  std::vector<GroupElement> base_;
  std::int64_t line_ = 0;
};

GroupElement operator*(GroupElement g, const GroupElement& h);

struct GroupElementHash {
  std::size_t operator()(const GroupElement& g) const { return g.hash(); }
};

// Raw word: (flattened generator, exponent) pairs, not necessarily reduced.
using RawWord = std::vector<std::pair<int, std::int64_t>>;

GroupElement reduce(const RawWord& word, const FamilyPtr& family);
GroupElement multiply(const GroupElement& g, const GroupElement& h);

// Parses "a b^-1 a^2", "a*b", "(ab)^3"-free flat words with optional ^k
// exponents, or "e"/"1" for the identity. Throws std::invalid_argument on
// unknown generators.
GroupElement parse_element(std::string_view text, const FamilyPtr& family);

// Pairs (factor index, factor element); throws std::invalid_argument unless
// the family is a free product.
std::vector<std::pair<int, GroupElement>> syllables(const GroupElement& g);

GroupElement power(const GroupElement& g, std::int64_t n);

// Positive length per flattened generator.
class WeightAssignment {
 public:
  WeightAssignment() = default;
  explicit WeightAssignment(std::vector<Rational> weights);
  static WeightAssignment unit(const GroupFamily& family);

  const Rational& operator[](int gen) const { return weights_.at(gen); }
  std::size_t size() const { return weights_.size(); }
  const std::vector<Rational>& values() const { return weights_; }
  Rational min_weight() const;
  Rational max_weight() const;
  WeightAssignment slice(int offset, int count) const;

 private:
  std::vector<Rational> weights_;
};

// Weighted word length with respect to the flattened generating set, for
// every supported family.
Rational word_length(const GroupElement& g, const WeightAssignment& weights);

// Sum of letter weights of the normal form; equals the distance from the
// identity vertex in the weighted Cayley tree. Throws std::invalid_argument
// when the family has no tree Cayley graph.
Rational weighted_length(const GroupElement& g, const WeightAssignment& weights);

// Every element with word_length <= L exactly once, sorted by length and then
// lexicographically by letters.
std::vector<GroupElement> ball(const FamilyPtr& family, const WeightAssignment& weights, const Rational& L);

// Unordered enumeration of the same set without materializing it.
void for_each_in_ball(const FamilyPtr& family, const WeightAssignment& weights, const Rational& L,
                      const std::function<void(const GroupElement&)>& visit);

// Reduced words of tree families as run-length encoded letters. An involution
// letter always has sign +1 and count 1.
struct TreeRun {
  int gen = 0;
  int sign = 1;
  std::int64_t count = 0;
  bool operator==(const TreeRun&) const = default;
};
using TreeWord = std::vector<TreeRun>;

// Tree word of an element of a tree family, or of the base of a direct
// product with a tree family as base.
TreeWord tree_word(const GroupElement& g);
GroupElement from_tree_word(const FamilyPtr& tree_family, const TreeWord& word);
// Appends one run, merging or cancelling against the tail.
void append_run(TreeWord& word, TreeRun run, const GroupFamily& tree_family);
Rational tree_word_length(const TreeWord& word, const WeightAssignment& weights);
std::int64_t tree_word_letters(const TreeWord& word);
std::string tree_word_string(const TreeWord& word, const GroupFamily& tree_family);

}  // namespace cat0
