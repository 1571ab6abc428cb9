#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logpi1/bar.hpp"
#include "logpi1/minimal.hpp"
#include "logpi1/nilpotent_lie.hpp"

#include <stdexcept>
#include <vector>

using namespace logpi1;
using exactlin::Index;
using exactlin::SpVec;

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat flip(Index gp, Index gq) {  // gr_p (x) gr_q -> gr_q (x) gr_p
  Mat f = Mat::Zero(gq * gp, gp * gq);
  for (Index i = 0; i < gp; ++i)
    for (Index j = 0; j < gq; ++j) f(j * gp + i, i * gq + j) = 1;
  return f;
}

Mat ident(Index n) { return Mat::Identity(n, n); }

bool product_associative(const bar::HopfH0& h, int p, int q, int r) {
  const Mat lhs = h.product.at({p + q, r}) * kron(h.product.at({p, q}), ident(h.gr_dim[r]));
  const Mat rhs = h.product.at({p, q + r}) * kron(ident(h.gr_dim[p]), h.product.at({q, r}));
  return (lhs - rhs).isZero(Rational(0));
}

bool product_commutative(const bar::HopfH0& h, int p, int q) {
  const Mat lhs = h.product.at({q, p}) * flip(h.gr_dim[p], h.gr_dim[q]);
  return (lhs - h.product.at({p, q})).isZero(Rational(0));
}

bool coassociative(const bar::HopfH0& h, int p, int q, int r) {
  const Mat lhs = kron(h.coproduct.at({p, q}), ident(h.gr_dim[r])) * h.coproduct.at({p + q, r});
  const Mat rhs = kron(ident(h.gr_dim[p]), h.coproduct.at({q, r})) * h.coproduct.at({p, q + r});
  return (lhs - rhs).isZero(Rational(0));
}

// Dimensions of the universal envelope of a graded Lie algebra with gr
// dimensions a[0], a[1], ... (degrees 1, 2, ...), by the PBW product formula.
std::vector<Index> pbw_dims(const std::vector<Index>& a, int cap) {
  std::vector<Index> h(cap + 1, 0);
  h[0] = 1;
  for (int k = 1; k <= cap && k <= static_cast<int>(a.size()); ++k)
    for (Index rep = 0; rep < a[k - 1]; ++rep)
      for (int s = k; s <= cap; ++s) h[s] += h[s - k];
  return h;
}

cdga::Cdga model_of(const cdga::Cdga& a, int stages, int cap = 3) {
  minimal::BuildOptions opt;
  opt.model_cap = cap;
  return minimal::build(a, stages, opt).model;
}

bool spvec_is(const SpVec<Rational>& v, const std::vector<std::pair<int64_t, Rational>>& want) {
  return v == want;
}

}  // namespace

TEST_CASE("exterior algebra on one generator: divided powers") {
  const cdga::Cdga m = cdga::marked_curve_model(0, 2);  // /\(x), zero differential
  const bar::BarState b = bar::build_bar(m, 3);
  for (int s = 0; s <= 3; ++s) CHECK(b.dim(s, s) == 1);
  CHECK(b.dim(2, 3) == 0);
  CHECK(b.d_i_col(2, 2, 0).empty());
  CHECK(b.d_c_col(2, 2, 0).empty());

  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == std::vector<Index>{1, 1, 1, 1});
  CHECK(h.product.at({1, 1})(0, 0) == 2);  // [x] ^ [x] = 2 [x|x]
  CHECK(h.product.at({1, 2})(0, 0) == 3);  // [x] ^ [x|x] = 3 [x|x|x]
  CHECK(h.coproduct.at({1, 1})(0, 0) == 1);  // [x](x)[x] term of Delta [x|x]
  CHECK(h.coproduct.at({0, 2})(0, 0) == 1);

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 1, 0, 0});

  const bar::DualHopf d = bar::dual_filtered_hopf(h);
  CHECK(d.dims == std::vector<Index>{1, 2, 3, 4});
}

TEST_CASE("differential columns pin the sign convention") {
  const cdga::Cdga m = model_of(cdga::marked_curve_model(0, 3), 2);
  // Generators e1_1, e1_2, e2_1 with d e2_1 = e1_1 ^ e1_2 (pair index 0).
  const bar::BarState b = bar::build_bar(m, 2);
  CHECK(b.dim(1, 1) == 3);
  CHECK(b.dim(2, 2) == 9);  // (dim M^1)^2
  CHECK(b.dim(1, 2) == 3);

  CHECK(spvec_is(b.d_i_col(1, 1, 2), {{0, Rational(-1)}}));  // d_I[e2_1] = -[d e2_1]
  CHECK(b.d_i_col(1, 1, 0).empty());
  // d_C[a_1|a_2] = -[a_1 a_2] on the 0-line.
  CHECK(spvec_is(b.d_c_col(2, 2, 1), {{0, Rational(-1)}}));  // [e1_1|e1_2]
  CHECK(spvec_is(b.d_c_col(2, 2, 3), {{0, Rational(1)}}));   // [e1_2|e1_1]
  // d_I[e2_1|e1_1] = -[d e2_1|e1_1]; block (2,1) of piece (2,3) starts at 9.
  CHECK(spvec_is(b.d_i_col(2, 2, 6), {{9, Rational(-1)}}));

  // Word encoding round trip.
  const auto w = b.word(2, 3, 9);
  CHECK(w == std::vector<std::pair<int, Index>>{{2, 0}, {1, 0}});
  CHECK(b.index_of(w) == 9);
}

TEST_CASE("abelian genus 1: symmetric algebra on two letters") {
  const cdga::Cdga m = model_of(cdga::unmarked_curve_model(1), 1);
  const bar::BarState b = bar::build_bar(m, 3);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == std::vector<Index>{1, 2, 3, 4});
  CHECK(h.gr_dim == pbw_dims({2}, 3));

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 2, 0, 0});
  CHECK(q.cobracket.at({1, 1}).isZero(Rational(0)));

  const bar::M1Comparison cmp = bar::compare_to_M1(b);
  CHECK(cmp.ok);
  CHECK(cmp.graded_iso);
  CHECK(cmp.intertwines);
  CHECK(cmp.m1_gr_dim == std::vector<Index>{0, 2, 0, 0});

  const bar::DualHopf d = bar::dual_filtered_hopf(h);
  CHECK(d.dims == std::vector<Index>{1, 3, 6, 10});

  // Zero differential: E_1 equals the bar pieces themselves.
  const bar::E1Table e = bar::eilenberg_moore_E1(b);
  CHECK(e.agree);
  CHECK(e.dims.at({0, 0}) == std::pair<Index, Index>{1, 1});
  CHECK(e.dims.at({2, 3}).first == b.dim(2, 3));
  CHECK(e.dims.at({3, 3}).first == 8);
}

TEST_CASE("three marked points at Q = 2: free rank-2 tensor algebra") {
  const cdga::Cdga m = model_of(cdga::marked_curve_model(0, 3), 2);
  const bar::BarState b = bar::build_bar(m, 3);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.letter_dim == 2);
  CHECK(h.gr_dim == std::vector<Index>{1, 2, 4, 6});
  CHECK(h.gr_dim == pbw_dims({2, 1}, 3));

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 2, 1, 0});

  const bar::M1Comparison cmp = bar::compare_to_M1(b);
  CHECK(cmp.ok);

  const bar::DualHopf d = bar::dual_filtered_hopf(h);
  CHECK(d.dims[2] == 7);

  const bar::E1Table e = bar::eilenberg_moore_E1(b);
  CHECK(e.agree);
  CHECK(e.dims.at({0, 0}) == std::pair<Index, Index>{1, 1});

  // Determinism of the construction.
  const bar::HopfH0 h2 = bar::h0(bar::build_bar(m, 3));
  CHECK((h.top[2] - h2.top[2]).isZero(Rational(0)));
  CHECK((h.x1[3] - h2.x1[3]).isZero(Rational(0)));
}

TEST_CASE("three marked points at Q = 3: indecomposables and comparison") {
  const cdga::Cdga m = model_of(cdga::marked_curve_model(0, 3), 3);
  const bar::BarState b = bar::build_bar(m, 3);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == pbw_dims(lie::lyndon_dims(2, 3), 3));
  CHECK(h.gr_dim == std::vector<Index>{1, 2, 4, 8});

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 2, 1, 2});

  const bar::M1Comparison cmp = bar::compare_to_M1(b);
  CHECK(cmp.ok);
  CHECK(cmp.m1_gr_dim == std::vector<Index>{0, 2, 1, 2});
  CHECK(cmp.iso_level == std::vector<char>{1, 1, 1, 1});

  // Hopf axioms on the graded pieces.
  CHECK(product_associative(h, 1, 1, 1));
  CHECK(product_commutative(h, 1, 2));
  CHECK(product_commutative(h, 1, 1));
  CHECK(coassociative(h, 1, 1, 1));
  CHECK(h.coproduct.at({0, 3}) == Mat::Identity(8, 8));

  // co-Jacobi at level 3: (1 + xi + xi^2)(delta (x) id) delta = 0.
  const Index g1 = q.gr_dim[1];
  const Mat t = kron(q.cobracket.at({1, 1}), ident(g1)) * q.cobracket.at({2, 1});
  Mat rot = Mat::Zero(g1 * g1 * g1, g1 * g1 * g1);  // x(x)y(x)z -> z(x)x(x)y
  for (Index i = 0; i < g1; ++i)
    for (Index j = 0; j < g1; ++j)
      for (Index l = 0; l < g1; ++l)
        rot((l * g1 + i) * g1 + j, (i * g1 + j) * g1 + l) = 1;
  CHECK((t + rot * t + rot * rot * t).isZero(Rational(0)));

  const bar::E1Table e = bar::eilenberg_moore_E1(b);
  CHECK(e.agree);
}

TEST_CASE("genus 2 at Q = 2: class-two symplectic quotient") {
  const cdga::Cdga m = model_of(cdga::unmarked_curve_model(2), 2);
  const bar::BarState b = bar::build_bar(m, 3);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == std::vector<Index>{1, 4, 15, 40});
  CHECK(h.gr_dim == pbw_dims({4, 5}, 3));

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 4, 5, 0});

  const bar::M1Comparison cmp = bar::compare_to_M1(b);
  CHECK(cmp.ok);
  CHECK(cmp.m1_gr_dim == std::vector<Index>{0, 4, 5, 0});
}

TEST_CASE("genus 2 at Q = 3: Labute dimensions through the bar construction") {
  const cdga::Cdga m = model_of(cdga::unmarked_curve_model(2), 3, 2);
  const bar::BarState b = bar::build_bar(m, 3);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == std::vector<Index>{1, 4, 15, 56});
  CHECK(h.gr_dim == pbw_dims({4, 5, 16}, 3));

  const bar::Indecomposables q = bar::indecomposables(h);
  CHECK(q.gr_dim == std::vector<Index>{0, 4, 5, 16});

  const bar::M1Comparison cmp = bar::compare_to_M1(b);
  CHECK(cmp.ok);

  // co-Jacobi at level 3.
  const Index g1 = q.gr_dim[1];
  const Mat t = kron(q.cobracket.at({1, 1}), ident(g1)) * q.cobracket.at({2, 1});
  Mat rot = Mat::Zero(g1 * g1 * g1, g1 * g1 * g1);
  for (Index i = 0; i < g1; ++i)
    for (Index j = 0; j < g1; ++j)
      for (Index l = 0; l < g1; ++l)
        rot((l * g1 + i) * g1 + j, (i * g1 + j) * g1 + l) = 1;
  CHECK((t + rot * t + rot * rot * t).isZero(Rational(0)));
}

TEST_CASE("interval-tensored input and a contractible curve piece") {
  const cdga::Cdga iv = cdga::tensor_with_interval(cdga::marked_curve_model(0, 3), 2).algebra;
  const cdga::Cdga m = model_of(iv, 3);
  const bar::BarState b = bar::build_bar(m, 2);
  const bar::HopfH0 h = bar::h0(b);
  CHECK(h.gr_dim == std::vector<Index>{1, 2, 4});  // model of a (0,3) curve again
  const cdga::Cdga fully = model_of(cdga::marked_curve_model(0, 1), 2);
  // A contractible curve piece: trivial Hopf algebra.
  const bar::HopfH0 h2 = bar::h0(bar::build_bar(fully, 2));
  CHECK(h2.gr_dim == std::vector<Index>{1, 0, 0});
}

TEST_CASE("build_bar rejects bad input") {
  const cdga::Cdga m = cdga::marked_curve_model(0, 3);
  CHECK_THROWS_AS(bar::build_bar(m, 0), std::invalid_argument);

  cdga::Cdga bad;
  bad.cap = 1;
  bad.space.labels[0] = {"1", "u"};
  bad.space.labels[1] = {};
  bad.mult[{0, 0}] = Mat::Zero(2, 4);
  bad.mult[{0, 0}](0, 0) = 1;
  bad.mult[{0, 0}](1, 1) = 1;
  bad.mult[{0, 0}](1, 2) = 1;
  bad.mult[{0, 0}](1, 3) = 1;
  bad.augmentation = Vec::Zero(2);
  bad.augmentation(0) = 1;
  CHECK_THROWS_AS(bar::build_bar(bad, 2), std::invalid_argument);
}
