#pragma once

#include "logpi1/exactlin.hpp"
#include "logpi1/rational.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace logpi1::lie {

using exactlin::Index;

// Words over the generator alphabet; letter i is the char 'a' + i, so
// lexicographic string order is generator order.
using Word = std::string;

// Sparse element of the free associative algebra truncated at word length q.
using AssocPoly = std::map<Word, Rational>;

AssocPoly assoc_mul(const AssocPoly& x, const AssocPoly& y, int q);
AssocPoly assoc_exp(const AssocPoly& x, int q);  // x without constant term
AssocPoly assoc_log(const AssocPoly& x, int q);  // x with constant term 1

bool is_lyndon(const Word& w);
std::vector<Word> lyndon_words(int k, int n);  // length-n words, lex order
// w = uv with v the longest proper Lyndon suffix; both factors are Lyndon.
std::pair<Word, Word> standard_factorization(const Word& w);
// The standard bracketing of a Lyndon word expanded in the associative
// algebra: the word itself plus lexicographically larger words.
AssocPoly bracketing_expansion(const Word& w);

// Coordinates of a Lie element of the associative algebra over the standard
// bracketings of Lyndon words; throws if the input is not a Lie element.
std::map<Word, Rational> lyndon_coefficients(AssocPoly z);

// Lyndon coefficients of log(exp a * exp b) through word length q.
std::map<Word, Rational> bch_universal(int q);

// Witt formula dims of the free Lie algebra, degrees 1..q.
std::vector<Index> lyndon_dims(int k, int q);

// Element of a NilpotentLie: coordinates per degree over the quotient basis.
// Absent degrees are zero.
struct LieElement {
  std::map<int, Vec> comp;
};

// exp(log) in the truncated Malcev group.
struct GroupElement {
  LieElement log;
};

// Determined by generator images; applied to an element by evaluating the
// standard bracketings of basis words on the images.
struct LieAutomorphism {
  std::vector<LieElement> images;
};

struct ValidationReport {
  bool ok = true;
  std::string first_violation;
};

struct InnerVerdict {
  bool inner = false;
  // inner: conjugation by exp(witness) realizes the automorphism; the full
  // solution set is witness + (central elements).
  LieElement witness;
  // not inner: first equation degree with no solution, and the per-generator
  // residuals there at the canonical partial solution.
  int obstruction_degree = 0;
  std::vector<LieElement> residuals;
};

// Free nilpotent Lie algebra on ordered generators truncated at class q,
// optionally quotiented by the graded ideal generated by relators. Basis per
// degree: Lyndon words (free), or the surviving subset (quotient).
class NilpotentLie {
 public:
  NilpotentLie() = default;

  int q() const { return q_; }
  const std::vector<std::string>& generators() const { return gens_; }
  Index dim(int n) const;
  std::vector<Index> gr_dims() const;  // degrees 1..q
  Index free_dim(int n) const;
  const std::vector<Word>& words(int n) const;          // free Lyndon basis
  const std::vector<Index>& surviving(int n) const;     // quotient basis word indices
  std::string basis_label(int n, Index i) const;        // bracket notation
  const Mat& projection(int n) const;                   // free coords -> quotient coords

  LieElement zero() const { return {}; }
  LieElement gen(Index i) const;
  LieElement element(int n, Index i) const;
  bool is_zero(const LieElement& x) const;
  bool equal(const LieElement& x, const LieElement& y) const;
  LieElement add(const LieElement& x, const LieElement& y) const;
  LieElement sub(const LieElement& x, const LieElement& y) const;
  LieElement scale(const Rational& c, const LieElement& x) const;
  LieElement bracket(const LieElement& x, const LieElement& y) const;

  // log(exp x * exp y) via the universal series.
  LieElement bch(const LieElement& x, const LieElement& y) const;
  // sum_k (-n)^k/k! (ad e)^k x = Ad(exp(-n e)) x.
  LieElement ad_exp(const LieElement& e, long n, const LieElement& x) const;

  GroupElement exp(const LieElement& x) const { return {x}; }
  GroupElement mul(const GroupElement& g, const GroupElement& h) const;
  GroupElement inverse(const GroupElement& g) const;
  GroupElement conjugate(const GroupElement& g, const GroupElement& h) const;  // h^-1 g h

  LieElement apply(const LieAutomorphism& phi, const LieElement& x) const;
  // gamma -> exp(c)^-1 gamma exp(c) on generators.
  LieAutomorphism inner_automorphism(const LieElement& c) const;
  ValidationReport validate_automorphism(const LieAutomorphism& phi) const;
  // Induced matrix of phi on degree n (columns = images of basis elements).
  Mat induced_matrix(const LieAutomorphism& phi, int n) const;

  // Columns: basis of {z in gr_n : [z, generators] = 0}.
  Mat center(int n) const;

  // Degree-by-degree solve of exp(d) phi(g) = g exp(d) for all generators.
  InnerVerdict is_inner(const LieAutomorphism& phi) const;

  // Quotient bracket table: dim(p+s) x dim(p)*dim(s), column i*dim(s)+j.
  Mat structure_table(int p, int s) const;

  const std::vector<std::map<int, Vec>>& relators_free() const { return relfree_; }

 private:
  friend NilpotentLie free_nilpotent(const std::vector<std::string>& gens, int q);
  friend NilpotentLie quotient(const NilpotentLie& l, const std::vector<LieElement>& relators);

  void build_free();
  void apply_relators();  // closes relfree_ into an ideal and sets surv_/proj_
  Vec lift(int n, const Vec& x) const;  // quotient coords -> free coords
  Vec free_bracket(int p, const Vec& x, int s, const Vec& y) const;
  Vec peel(int n, AssocPoly p) const;  // homogeneous Lie assoc poly -> free coords
  void check_element(const LieElement& x) const;
  LieElement eval_word(const Word& w, const LieElement& x, const LieElement& y) const;
  LieElement prune(LieElement x) const;

  int q_ = 1;
  std::vector<std::string> gens_;
  std::map<int, std::vector<Word>> words_;
  std::map<int, std::map<Word, Index>> index_;
  std::map<std::pair<int, int>, Mat> ftable_;  // free tables, p <= s
  std::vector<std::map<int, Vec>> relfree_;    // relator components, free coords
  std::map<int, std::vector<Index>> surv_;
  std::map<int, Mat> proj_;
  std::map<Word, Rational> bchc_;
};

NilpotentLie free_nilpotent(const std::vector<std::string>& gens, int q);
// Relators in l's coordinates; homogeneous components must have degree >= 2.
NilpotentLie quotient(const NilpotentLie& l, const std::vector<LieElement>& relators);

// Antisymmetry and Jacobi on all basis pairs/triples within the truncation.
ValidationReport validate(const NilpotentLie& l);

nlohmann::json to_json(const NilpotentLie& l);
NilpotentLie lie_from_json(const nlohmann::json& j);
nlohmann::json element_to_json(const LieElement& x);
LieElement element_from_json(const nlohmann::json& j);

}  // namespace logpi1::lie
