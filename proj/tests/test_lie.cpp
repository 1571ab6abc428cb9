#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logpi1/nilpotent_lie.hpp"

#include <random>
#include <vector>

using namespace logpi1;
using namespace logpi1::lie;

namespace {

LieElement random_element(const NilpotentLie& l, std::mt19937& rng, int max_degree = -1) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  if (max_degree < 0) max_degree = l.q();
  LieElement x;
  for (int n = 1; n <= max_degree; ++n) {
    Vec v(l.dim(n));
    for (Index i = 0; i < v.size(); ++i) v(i) = coeff(rng);
    if (!v.isZero()) x.comp[n] = v;
  }
  return x;
}

// Element coordinates as a word -> coefficient map over the free Lyndon basis.
std::map<Word, Rational> word_map(const NilpotentLie& l, const LieElement& x) {
  std::map<Word, Rational> m;
  for (const auto& [n, v] : x.comp)
    for (Index i = 0; i < v.size(); ++i)
      if (v(i) != 0) m[l.words(n)[static_cast<size_t>(l.surviving(n)[static_cast<size_t>(i)])]] = v(i);
  return m;
}

}  // namespace

TEST_CASE("Lyndon words: lists, dims, factorization") {
  CHECK(lyndon_words(2, 1) == std::vector<Word>{"a", "b"});
  CHECK(lyndon_words(2, 2) == std::vector<Word>{"ab"});
  CHECK(lyndon_words(2, 3) == std::vector<Word>{"aab", "abb"});
  CHECK(lyndon_words(2, 4) == std::vector<Word>{"aaab", "aabb", "abbb"});

  CHECK(is_lyndon("a"));
  CHECK(is_lyndon("aabab"));
  CHECK_FALSE(is_lyndon("aa"));
  CHECK_FALSE(is_lyndon("ba"));
  CHECK_FALSE(is_lyndon(""));

  // Witt formula against direct enumeration
  CHECK(lyndon_dims(2, 4) == std::vector<Index>{2, 1, 2, 3});
  CHECK(lyndon_dims(4, 3) == std::vector<Index>{4, 6, 20});
  CHECK(lyndon_dims(1, 3) == std::vector<Index>{1, 0, 0});
  CHECK(lyndon_dims(0, 3) == std::vector<Index>{0, 0, 0});
  for (int k = 1; k <= 4; ++k) {
    auto dims = lyndon_dims(k, 4);
    for (int n = 1; n <= 4; ++n)
      CHECK(static_cast<Index>(lyndon_words(k, n).size()) == dims[static_cast<size_t>(n - 1)]);
  }

  CHECK(standard_factorization("ab") == std::pair<Word, Word>{"a", "b"});
  CHECK(standard_factorization("aab") == std::pair<Word, Word>{"a", "ab"});
  CHECK(standard_factorization("abb") == std::pair<Word, Word>{"ab", "b"});
  CHECK(standard_factorization("aabb") == std::pair<Word, Word>{"a", "abb"});

  const AssocPoly e_aab = bracketing_expansion("aab");
  const AssocPoly expected{{"aab", 1}, {"aba", -2}, {"baa", 1}};
  CHECK(e_aab == expected);
}

TEST_CASE("free nilpotent algebras: dims, labels, Lie axioms") {
  auto l24 = free_nilpotent({"a", "b"}, 4);
  CHECK(l24.gr_dims() == std::vector<Index>{2, 1, 2, 3});
  CHECK(l24.basis_label(2, 0) == "[a,b]");
  CHECK(l24.basis_label(4, 1) == "[a,[[a,b],b]]");

  auto l42 = free_nilpotent({"p", "q", "r", "s"}, 2);
  CHECK(l42.gr_dims() == std::vector<Index>{4, 6});

  auto l13 = free_nilpotent({"z"}, 3);
  CHECK(l13.gr_dims() == std::vector<Index>{1, 0, 0});

  auto l0 = free_nilpotent({}, 3);
  CHECK(l0.gr_dims() == std::vector<Index>{0, 0, 0});
  CHECK(l0.is_zero(l0.bch(l0.zero(), l0.zero())));

  CHECK(validate(l24).ok);
  CHECK(validate(free_nilpotent({"x", "y", "z"}, 3)).ok);
  CHECK(validate(l42).ok);

  // [a,b] is the degree-2 basis element; [b,a] its negative
  auto ab = l24.bracket(l24.gen(0), l24.gen(1));
  CHECK(l24.equal(ab, l24.element(2, 0)));
  CHECK(l24.equal(l24.bracket(l24.gen(1), l24.gen(0)), l24.scale(-1, l24.element(2, 0))));

  CHECK_THROWS_AS(free_nilpotent({"a", "a"}, 2), std::invalid_argument);
  CHECK_THROWS_AS(free_nilpotent({"a"}, 0), std::invalid_argument);
}

TEST_CASE("universal BCH coefficients: closed form through degree 4") {
  const std::map<Word, Rational> q2{{"a", 1}, {"b", 1}, {"ab", Rational(1) / 2}};
  CHECK(bch_universal(2) == q2);

  // v + w + (1/2)[v,w] + (1/12)([v,[v,w]] + [w,[w,v]]); note [w,[w,v]] is the
  // standard bracketing of abb: [w,[w,v]] = [[v,w],w].
  const std::map<Word, Rational> q3{{"a", 1},           {"b", 1},
                                    {"ab", Rational(1) / 2}, {"aab", Rational(1) / 12},
                                    {"abb", Rational(1) / 12}};
  CHECK(bch_universal(3) == q3);

  // Degree 4 adds the single term -(1/24)[w,[v,[v,w]]] = +(1/24)[v,[[v,w],w]].
  std::map<Word, Rational> q4 = q3;
  q4["aabb"] = Rational(1) / 24;
  CHECK(bch_universal(4) == q4);
}

TEST_CASE("bch: commuting case, closed form, associativity, group ops") {
  auto free2 = free_nilpotent({"a", "b"}, 4);
  std::mt19937 rng(20240812);

  // commuting case: the abelianization
  auto ab = quotient(free2, {free2.element(2, 0)});
  CHECK(ab.gr_dims() == std::vector<Index>{2, 0, 0, 0});
  for (int t = 0; t < 5; ++t) {
    auto x = random_element(ab, rng), y = random_element(ab, rng);
    CHECK(ab.equal(ab.bch(x, y), ab.add(x, y)));
  }

  // closed form on generators through degree 4
  auto a = free2.gen(0), b = free2.gen(1);
  auto br = [&](const LieElement& x, const LieElement& y) { return free2.bracket(x, y); };
  auto expected = free2.add(
      free2.add(a, b),
      free2.add(free2.scale(Rational(1) / 2, br(a, b)),
                free2.add(free2.scale(Rational(1) / 12, br(a, br(a, b))),
                          free2.add(free2.scale(Rational(1) / 12, br(b, br(b, a))),
                                    free2.scale(Rational(-1) / 24, br(b, br(a, br(a, b))))))));
  CHECK(free2.equal(free2.bch(a, b), expected));

  // associativity validates the whole coefficient table
  for (int t = 0; t < 40; ++t) {
    auto x = random_element(free2, rng), y = random_element(free2, rng),
         z = random_element(free2, rng);
    CHECK(free2.equal(free2.bch(free2.bch(x, y), z), free2.bch(x, free2.bch(y, z))));
  }

  // group inverse and identity
  for (int t = 0; t < 5; ++t) {
    auto g = free2.exp(random_element(free2, rng));
    CHECK(free2.is_zero(free2.mul(g, free2.inverse(g)).log));
    CHECK(free2.equal(free2.conjugate(g, free2.exp(free2.zero())).log, g.log));
  }

  // mismatched element rejected
  auto other = free_nilpotent({"x", "y", "z"}, 4);
  CHECK_THROWS_AS(free2.bch(a, other.gen(2)), std::invalid_argument);
}

TEST_CASE("ad_exp: flow property, conjugation cross-check, associative oracle") {
  auto l = free_nilpotent({"a", "b"}, 4);
  std::mt19937 rng(7);

  for (auto [n, m] : std::vector<std::pair<long, long>>{{1, 1}, {2, -1}, {3, 2}, {0, 5}}) {
    auto e = random_element(l, rng), x = random_element(l, rng);
    CHECK(l.equal(l.ad_exp(e, n, l.ad_exp(e, m, x)), l.ad_exp(e, n + m, x)));
  }

  // log(h^-1 g h) = Ad(exp(-e)) log g
  for (int t = 0; t < 8; ++t) {
    auto e = random_element(l, rng), x = random_element(l, rng);
    CHECK(l.equal(l.conjugate(l.exp(x), l.exp(e)).log, l.ad_exp(e, 1, x)));
  }

  // pure associative-algebra oracle: log(e^-b e^a e^b) in Lyndon coordinates
  const AssocPoly ea{{"a", 1}}, eb{{"b", 1}};
  AssocPoly conj = assoc_mul(assoc_mul(assoc_exp({{"b", -1}}, 4), assoc_exp(ea, 4), 4),
                             assoc_exp(eb, 4), 4);
  auto oracle = lyndon_coefficients(assoc_log(conj, 4));
  auto viaLie = word_map(l, l.ad_exp(l.gen(1), 1, l.gen(0)));
  CHECK(oracle == viaLie);

  // central e: conjugation is trivial
  auto top = l.element(4, 2);
  auto g = l.exp(random_element(l, rng));
  CHECK(l.equal(l.conjugate(g, l.exp(top)).log, g.log));
}

TEST_CASE("quotient: one-relator dims, descent, composition, errors") {
  auto f4 = free_nilpotent({"v1", "v2", "w1", "w2"}, 3);
  auto rel = f4.add(f4.bracket(f4.gen(0), f4.gen(1)), f4.bracket(f4.gen(2), f4.gen(3)));
  auto lab = quotient(f4, {rel});
  CHECK(lab.gr_dims() == std::vector<Index>{4, 5, 16});
  CHECK(validate(lab).ok);

  // same algebra one class deeper; dims from the enveloping-algebra series
  // 1/(1-4t+t^2): power sums 4, 14, 52, 194 give gr dims 4, 5, 16, 45.
  auto f44 = free_nilpotent({"v1", "v2", "w1", "w2"}, 4);
  auto rel4 = f44.add(f44.bracket(f44.gen(0), f44.gen(1)), f44.bracket(f44.gen(2), f44.gen(3)));
  auto lab4 = quotient(f44, {rel4});
  CHECK(lab4.gr_dims() == std::vector<Index>{4, 5, 16, 45});
  CHECK(validate(lab4).ok);

  // the relator and its bracket closure vanish in the quotient
  auto relq = lab.add(lab.bracket(lab.gen(0), lab.gen(1)), lab.bracket(lab.gen(2), lab.gen(3)));
  CHECK(lab.is_zero(relq));
  CHECK(lab.is_zero(lab.bracket(lab.gen(0), relq)));

  auto f2 = free_nilpotent({"w1", "w2"}, 4);
  auto ab2 = quotient(f2, {f2.bracket(f2.gen(0), f2.gen(1))});
  CHECK(ab2.gr_dims() == std::vector<Index>{2, 0, 0, 0});

  // empty relator list: identity
  auto same = quotient(f2, {});
  CHECK(same.gr_dims() == f2.gr_dims());
  CHECK(same.structure_table(1, 1) == f2.structure_table(1, 1));

  // quotient of a quotient agrees with the combined quotient
  auto f3 = free_nilpotent({"x", "y", "z"}, 3);
  auto rxy = f3.bracket(f3.gen(0), f3.gen(1)), rxz = f3.bracket(f3.gen(0), f3.gen(2));
  auto step = quotient(quotient(f3, {rxy}), {quotient(f3, {rxy}).bracket(
                                                 quotient(f3, {rxy}).gen(0),
                                                 quotient(f3, {rxy}).gen(2))});
  auto both = quotient(f3, {rxy, rxz});
  CHECK(step.gr_dims() == both.gr_dims());
  CHECK(step.structure_table(1, 2) == both.structure_table(1, 2));

  // degree errors
  LieElement deg1 = f2.gen(0);
  CHECK_THROWS_AS(quotient(f2, {deg1}), std::invalid_argument);
  LieElement toodeep;
  toodeep.comp[4] = Vec::Zero(f4.dim(4));  // f4 has q = 3
  CHECK_THROWS_AS(quotient(f4, {toodeep}), std::invalid_argument);
}

TEST_CASE("is_inner: identity, conjugations, witness recovery") {
  std::mt19937 rng(99);
  auto f44 = free_nilpotent({"v1", "v2", "w1", "w2"}, 4);
  auto rel4 = f44.add(f44.bracket(f44.gen(0), f44.gen(1)), f44.bracket(f44.gen(2), f44.gen(3)));
  auto lab4 = quotient(f44, {rel4});

  for (const NilpotentLie& l : {free_nilpotent({"a", "b"}, 4), lab4}) {
    LieAutomorphism ident;
    for (Index i = 0; i < static_cast<Index>(l.generators().size()); ++i)
      ident.images.push_back(l.gen(i));
    auto v = l.is_inner(ident);
    CHECK(v.inner);
    CHECK(l.is_zero(v.witness));

    for (int t = 0; t < 3; ++t) {
      auto c = random_element(l, rng);
      auto phi = l.inner_automorphism(c);
      auto verdict = l.is_inner(phi);
      REQUIRE(verdict.inner);
      // the witness conjugates exactly like c does...
      for (Index i = 0; i < static_cast<Index>(l.generators().size()); ++i)
        CHECK(l.equal(l.ad_exp(verdict.witness, 1, l.gen(i)), phi.images[static_cast<size_t>(i)]));
      // ...and differs from c by a central group element
      auto z = l.bch(verdict.witness, l.scale(-1, c));
      for (Index i = 0; i < static_cast<Index>(l.generators().size()); ++i)
        CHECK(l.is_zero(l.bracket(z, l.gen(i))));
      // generator equations imply the condition on arbitrary elements
      auto x = random_element(l, rng);
      CHECK(l.equal(l.bch(verdict.witness, l.apply(phi, x)), l.bch(x, verdict.witness)));
    }
  }

  // non-automorphism rejected
  auto f2 = free_nilpotent({"a", "b"}, 3);
  LieAutomorphism broken;
  broken.images = {f2.gen(0), f2.zero()};
  CHECK_THROWS_AS(f2.is_inner(broken), std::invalid_argument);

  // a genuine automorphism that moves the graded pieces is never inner
  LieAutomorphism swap;
  swap.images = {f2.gen(1), f2.gen(0)};
  CHECK(f2.validate_automorphism(swap).ok);
  auto sv = f2.is_inner(swap);
  CHECK_FALSE(sv.inner);
  CHECK(sv.obstruction_degree == 1);
}

TEST_CASE("is_inner: the one-relator monodromy obstruction") {
  for (int q : {3, 4}) {
    auto f = free_nilpotent({"v1", "v2", "w1", "w2"}, q);
    auto rel = f.add(f.bracket(f.gen(0), f.gen(1)), f.bracket(f.gen(2), f.gen(3)));
    auto l = quotient(f, {rel});

    auto e = l.bracket(l.gen(0), l.gen(1));  // [v1,v2]
    LieAutomorphism phi;
    phi.images = {l.gen(0), l.gen(1), l.ad_exp(e, 1, l.gen(2)), l.ad_exp(e, 1, l.gen(3))};
    REQUIRE(l.validate_automorphism(phi).ok);

    auto v = l.is_inner(phi);
    CHECK_FALSE(v.inner);
    CHECK(v.obstruction_degree == 3);
    REQUIRE(v.residuals.size() == 4);
    // v-generator equations are consistent (their residuals vanish)...
    CHECK(l.is_zero(v.residuals[0]));
    CHECK(l.is_zero(v.residuals[1]));
    // ...and the w1 equation is blocked by exactly [w1,[v1,v2]]
    auto expected = l.bracket(l.gen(2), l.bracket(l.gen(0), l.gen(1)));
    CHECK_FALSE(l.is_zero(expected));
    CHECK(l.equal(v.residuals[2], expected));

    // composing with any inner automorphism does not change the verdict
    std::mt19937 rng(3);
    auto c = random_element(l, rng);
    auto inner = l.inner_automorphism(c);
    LieAutomorphism composed;
    for (auto& img : inner.images) composed.images.push_back(l.apply(phi, img));
    auto cv = l.is_inner(composed);
    CHECK_FALSE(cv.inner);
    CHECK(cv.obstruction_degree == v.obstruction_degree);
  }
}

TEST_CASE("center") {
  auto l = free_nilpotent({"a", "b"}, 3);
  CHECK(l.center(1).cols() == 0);
  CHECK(l.center(2).cols() == 0);
  CHECK(l.center(3).cols() == l.dim(3));

  auto ab = quotient(l, {l.element(2, 0)});
  CHECK(ab.center(1).cols() == 2);
}

TEST_CASE("serialization round-trips") {
  auto f = free_nilpotent({"v1", "v2", "w1", "w2"}, 3);
  auto rel = f.add(f.bracket(f.gen(0), f.gen(1)), f.bracket(f.gen(2), f.gen(3)));
  auto lab = quotient(f, {rel});

  for (const NilpotentLie& l : {f, lab}) {
    auto j = to_json(l);
    auto back = lie_from_json(j);
    CHECK(back.gr_dims() == l.gr_dims());
    CHECK(back.structure_table(1, 1) == l.structure_table(1, 1));
    CHECK(back.structure_table(1, 2) == l.structure_table(1, 2));
    CHECK(to_json(back).dump() == j.dump());
  }

  std::mt19937 rng(5);
  auto x = random_element(lab, rng);
  auto back = element_from_json(element_to_json(x));
  CHECK(lab.equal(back, x));
}
