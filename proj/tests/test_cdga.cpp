#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logpi1/cdga.hpp"

using namespace logpi1;
using namespace logpi1::cdga;
using exactlin::Index;

namespace {

// Pad Lambda^2(deg-1) -> deg-2 cup matrix from the stored (1,1) table.
Mat cup_matrix(const Cdga& a) {
  const Index n = a.dim(1);
  Mat m(a.dim(2), n * (n - 1) / 2);
  Index col = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) m.col(col++) = a.product(1, i, 1, j);
  return m;
}

}  // namespace

TEST_CASE("marked model dimensions and rejection of r = 0") {
  CHECK(marked_curve_model(0, 3).dim(1) == 2);
  CHECK(marked_curve_model(1, 1).dim(1) == 2);
  CHECK(marked_curve_model(2, 1).dim(1) == 4);
  CHECK(marked_curve_model(0, 3).dim(2) == 0);
  CHECK_THROWS_AS(marked_curve_model(1, 0), std::invalid_argument);
}

TEST_CASE("unmarked model: symplectic products") {
  Cdga g1 = unmarked_curve_model(1);
  CHECK(g1.dim(0) == 1);
  CHECK(g1.dim(1) == 2);
  CHECK(g1.dim(2) == 1);
  CHECK(g1.product(1, 0, 1, 1) == Vec::Ones(1));   // v1 v2 = w
  CHECK(g1.product(1, 1, 1, 0) == Vec(-Vec::Ones(1)));
  CHECK(g1.product(1, 0, 1, 0).isZero(Rational(0)));  // v1^2 = 0
  CHECK(g1.product(1, 1, 1, 1).isZero(Rational(0)));

  Cdga g2 = unmarked_curve_model(2);
  CHECK(g2.dim(1) == 4);
  int nonzero_pairs = 0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j)
      if (!g2.product(1, i, 1, j).isZero(Rational(0))) ++nonzero_pairs;
  CHECK(nonzero_pairs == 2);

  CHECK_THROWS_AS(unmarked_curve_model(0), std::invalid_argument);
}

TEST_CASE("cup pairing: rank one, kernel of codimension one") {
  for (int g = 1; g <= 3; ++g) {
    Cdga a = unmarked_curve_model(g);
    Mat cup = cup_matrix(a);
    CHECK(exactlin::rank<Rational>(cup) == 1);
    CHECK(exactlin::kernel_basis<Rational>(cup).cols() == 2 * g * (2 * g - 1) / 2 - 1);
    if (g == 1) CHECK(cup.cols() == 1);  // 1-dim source and target: an isomorphism
  }
}

TEST_CASE("validate: all stock models with 2g + r <= 8") {
  for (int g = 0; 2 * g <= 8; ++g)
    for (int r = 1; 2 * g + r <= 8; ++r) {
      Cdga a = marked_curve_model(g, r);
      auto rep = validate(a);
      CAPTURE(g); CAPTURE(r); CAPTURE(rep.first_violation);
      CHECK(rep.ok);
      auto cx = a.complex();
      CHECK(exactlin::cohomology(cx, 1).dim() == 2 * g + r - 1);
      CHECK(exactlin::cohomology(cx, 2).dim() == 0);
    }
  for (int g = 1; g <= 3; ++g) {
    Cdga a = unmarked_curve_model(g);
    auto rep = validate(a);
    CAPTURE(g); CAPTURE(rep.first_violation);
    CHECK(rep.ok);
    auto cx = a.complex();
    CHECK(exactlin::cohomology(cx, 1).dim() == 2 * g);
    CHECK(exactlin::cohomology(cx, 2).dim() == 1);
  }
}

TEST_CASE("validate flags an injected d*d != 0 at the offending element") {
  Cdga a = marked_curve_model(0, 2);  // degree-1 part is 1-dim
  a.space.labels[2] = {"z"};
  a.mult[{1, 1}] = Mat::Zero(1, 1);  // v1*v1 = 0, now landing in the new degree 2
  a.diff[0] = Mat::Ones(1, 1);  // d(1) = v1
  a.diff[1] = Mat::Ones(1, 1);  // d(v1) = z
  auto rep = validate(a);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first_violation.find("d*d != 0") != std::string::npos);
  CHECK(rep.first_violation.find("'1'") != std::string::npos);
}

TEST_CASE("validate: exterior algebra on two degree-1 generators") {
  auto rep = validate(unmarked_curve_model(1));
  CHECK(rep.ok);
}

namespace {

// Polynomial degree of a basis label "t^k*x" / "t^kdt*x", and whether it is
// a dt-term.
std::pair<int, bool> poly_part(const std::string& lab) {
  size_t pos = lab.find("t^");
  REQUIRE(pos != std::string::npos);
  int k = std::stoi(lab.substr(pos + 2));
  return {k, lab.find("dt*") != std::string::npos};
}

// Evaluation at t=1 cannot be a strict algebra morphism on any truncation in
// which t is nilpotent; it is a chain map, preserves the unit, and is
// multiplicative on every pair whose product survives the truncation.
void check_eval_at_one(const Cdga& big, const Cdga& base, const CdgaMorphism& p, int cap_d) {
  for (int n = 0; n <= base.cap; ++n)
    CHECK(p.at(big, base, n + 1) * big.d(n) == base.d(n) * p.at(big, base, n));

  Vec u = Vec::Zero(big.dim(0));
  u(big.unitIndex()) = 1;
  Vec ub = Vec::Zero(base.dim(0));
  ub(base.unitIndex()) = 1;
  CHECK(p.at(big, base, 0) * u == ub);

  for (int dp = 0; dp <= base.cap; ++dp)
    for (int dq = dp; dp + dq <= base.cap; ++dq) {
      const Mat fp = p.at(big, base, dp), fq = p.at(big, base, dq);
      const Mat fpq = p.at(big, base, dp + dq);
      for (Index i = 0; i < big.dim(dp); ++i)
        for (Index j = 0; j < big.dim(dq); ++j) {
          auto [ka, dta] = poly_part(big.space.labels.at(dp)[static_cast<size_t>(i)]);
          auto [kb, dtb] = poly_part(big.space.labels.at(dq)[static_cast<size_t>(j)]);
          int limit = (dta || dtb) ? cap_d - 1 : cap_d;
          if (ka + kb > limit) continue;  // truncated product: no claim
          Vec lhs = fpq * big.product(dp, i, dq, j);
          Vec rhs = base.multiply(dp, fp.col(i), dq, fq.col(j));
          CHECK(lhs == rhs);
        }
    }
}

}  // namespace

TEST_CASE("interval tensor: axioms, evaluations, H^0") {
  Cdga q = marked_curve_model(0, 1);  // the trivial connected algebra Q
  IntervalTensor t = tensor_with_interval(q, 3);
  auto rep = validate(t.algebra);
  CAPTURE(rep.first_violation);
  CHECK(rep.ok);

  // p0 is a strict augmentation-preserving cdga morphism.
  CHECK(validate_morphism(t.algebra, q, t.p0).ok);
  check_eval_at_one(t.algebra, q, t.p1, 3);

  // H^0(R(t,dt)_{<=3}) = Q, and the truncated interval is acyclic
  auto cx = t.algebra.complex();
  CHECK(t.algebra.dim(0) == 4);
  CHECK(exactlin::cohomology(cx, 0).dim() == 1);
  CHECK(exactlin::cohomology(cx, 1).dim() == 0);

  // p0 and p1 restricted to the unit inclusion are the identity
  Vec unit_incl = Vec::Zero(t.algebra.dim(0));
  unit_incl(t.algebra.unitIndex()) = 1;
  CHECK(t.p0.at(t.algebra, q, 0) * unit_incl == Vec::Ones(1));
  CHECK(t.p1.at(t.algebra, q, 0) * unit_incl == Vec::Ones(1));

  // p0 != p1: they disagree on t
  CHECK(t.p0.at(t.algebra, q, 0) != t.p1.at(t.algebra, q, 0));

  // the same on a genuine curve model
  Cdga g1 = unmarked_curve_model(1);
  IntervalTensor tg = tensor_with_interval(g1, 2);
  auto repg = validate(tg.algebra);
  CAPTURE(repg.first_violation);
  CHECK(repg.ok);
  CHECK(validate_morphism(tg.algebra, g1, tg.p0).ok);
  check_eval_at_one(tg.algebra, g1, tg.p1, 2);
}

TEST_CASE("serialization round-trip is canonical") {
  for (const Cdga& a : {marked_curve_model(1, 2), unmarked_curve_model(2)}) {
    nlohmann::json j = to_json(a);
    Cdga b = cdga_from_json(j);
    CHECK(to_json(b).dump() == j.dump());
    CHECK(validate(b).ok);
    CHECK(b.dim(1) == a.dim(1));
  }
}
