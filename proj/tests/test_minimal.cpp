#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "logpi1/minimal.hpp"

#include <stdexcept>
#include <vector>

using namespace logpi1;
using namespace logpi1::minimal;
using cdga::Cdga;
using cdga::CdgaMorphism;
using exactlin::Index;

namespace {

CdgaMorphism identity_morphism(const Cdga& a) {
  CdgaMorphism f;
  for (int n = 0; n <= a.cap; ++n)
    if (a.dim(n) > 0) f.f.f[n] = Mat::Identity(a.dim(n), a.dim(n));
  return f;
}

lie::LieElement gen(const lie::NilpotentLie& l, Index i) {
  lie::LieElement x;
  x.comp[1] = Vec::Unit(l.dim(1), i);
  return x;
}

// L(x1..x_{2g}) / (sum [x_{2i-1}, x_{2i}]), truncated at class q.
lie::NilpotentLie symplectic_quotient(int g, int q) {
  std::vector<std::string> names;
  for (int i = 1; i <= 2 * g; ++i) names.push_back("x" + std::to_string(i));
  const auto fr = lie::free_nilpotent(names, q);
  lie::LieElement rel = fr.zero();
  for (int i = 0; i < g; ++i)
    rel = fr.add(rel, fr.bracket(gen(fr, 2 * i), gen(fr, 2 * i + 1)));
  return lie::quotient(fr, {rel});
}

// Decode the lexicographic pair basis of the assembled degree-2 part.
std::vector<std::pair<Index, Index>> pair_basis(Index n) {
  std::vector<std::pair<Index, Index>> out;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v) out.emplace_back(u, v);
  return out;
}

}  // namespace

TEST_CASE("marked (0,3): stage dimensions, assembled algebra, morphism, minimality") {
  const Cdga a = cdga::marked_curve_model(0, 3);
  const MinimalModel m = build(a, 4);

  CHECK(m.stage_dims() == std::vector<Index>{2, 1, 2, 3});
  CHECK(m.total_gens() == 8);
  CHECK(m.model.dim(0) == 1);
  CHECK(m.model.dim(1) == 8);
  CHECK(m.model.dim(2) == 28);
  CHECK(m.model.dim(3) == 56);

  CHECK(cdga::validate(m.model).ok);
  CHECK(cdga::validate_morphism(m.model, a, m.rho).ok);

  // d(E_1) = 0 and d(E_q) lies in pairs of strictly earlier generators.
  std::vector<int> stage_of;
  for (size_t q = 0; q < m.stages.size(); ++q)
    for (Index i = 0; i < m.stages[q].dim; ++i) stage_of.push_back(static_cast<int>(q) + 1);
  const auto pairs = pair_basis(m.model.dim(1));
  const Mat d1 = m.model.d(1);
  for (Index g = 0; g < m.model.dim(1); ++g)
    for (Index r = 0; r < d1.rows(); ++r)
      if (d1(r, g) != 0) {
        CHECK(stage_of[pairs[r].first] < stage_of[g]);
        CHECK(stage_of[pairs[r].second] < stage_of[g]);
      }
  CHECK(d1.leftCols(2).isZero(Rational(0)));

  const auto rep = check_minimality(m, a);
  CHECK(rep.ok);
  CHECK(rep.first_failing_stage == 0);

  // Deterministic: a second build gives identical stage data.
  const MinimalModel m2 = build(a, 4);
  for (size_t q = 0; q < m.stages.size(); ++q) {
    CHECK(m.stages[q].attach == m2.stages[q].attach);
    CHECK(m.stages[q].rho1 == m2.stages[q].rho1);
  }
}

TEST_CASE("stage dimensions follow the Witt formula for marked models") {
  CHECK(build(cdga::marked_curve_model(0, 3), 4).stage_dims() ==
        std::vector<Index>(lie::lyndon_dims(2, 4)));
  CHECK(build(cdga::marked_curve_model(1, 2), 4).stage_dims() ==
        std::vector<Index>(lie::lyndon_dims(3, 4)));
  BuildOptions light;
  light.model_cap = 2;
  CHECK(build(cdga::marked_curve_model(2, 1), 3, light).stage_dims() ==
        std::vector<Index>(lie::lyndon_dims(4, 3)));
}

TEST_CASE("unmarked g=1: the cup isomorphism stops the tower, dual is abelian") {
  const Cdga a = cdga::unmarked_curve_model(1);
  const MinimalModel m = build(a, 4);
  CHECK(m.stage_dims() == std::vector<Index>{2, 0, 0, 0});
  CHECK(cdga::validate(m.model).ok);
  CHECK(cdga::validate_morphism(m.model, a, m.rho).ok);
  CHECK(check_minimality(m, a).ok);

  const auto dual = dual_lie(m);
  const auto oracle = symplectic_quotient(1, 4);
  for (int n = 1; n <= 4; ++n) CHECK(dual.dim(n) == oracle.dim(n));
  CHECK(dual.dim(1) == 2);
  CHECK(dual.dim(2) == 0);
  CHECK(dual.structure_table(1, 1) == oracle.structure_table(1, 1));
}

TEST_CASE("unmarked g=2: Labute dimensions and structure constants") {
  const Cdga a = cdga::unmarked_curve_model(2);

  const MinimalModel m2 = build(a, 2);
  CHECK(m2.stage_dims() == std::vector<Index>{4, 5});
  CHECK(cdga::validate(m2.model).ok);
  CHECK(cdga::validate_morphism(m2.model, a, m2.rho).ok);
  CHECK(check_minimality(m2, a).ok);

  BuildOptions light;
  light.model_cap = 2;
  const MinimalModel m3 = build(a, 3, light);
  CHECK(m3.stage_dims() == std::vector<Index>{4, 5, 16});

  const auto dual = dual_lie(m3);
  const auto oracle = symplectic_quotient(2, 3);
  for (int n = 1; n <= 3; ++n) CHECK(dual.dim(n) == oracle.dim(n));
  CHECK(dual.structure_table(1, 1) == oracle.structure_table(1, 1));
  CHECK(dual.structure_table(1, 2) == oracle.structure_table(1, 2));
}

TEST_CASE("marked (0,3) at Q=2: dual Lie is free of rank 2, class 2") {
  const Cdga a = cdga::marked_curve_model(0, 3);
  const auto dual = dual_lie(build(a, 2));
  const auto fr = lie::free_nilpotent({"x1", "x2"}, 2);
  CHECK(dual.dim(1) == 2);
  CHECK(dual.dim(2) == 1);
  CHECK(dual.structure_table(1, 1) == fr.structure_table(1, 1));
}

TEST_CASE("acyclic inputs: the interval algebra has the trivial minimal model") {
  // R(t,dt) itself (marked (0,1) has one point class and nothing else).
  const Cdga interval = cdga::tensor_with_interval(cdga::marked_curve_model(0, 1), 3).algebra;
  const MinimalModel mi = build(interval, 2);
  CHECK(mi.stage_dims() == std::vector<Index>{0, 0});
  CHECK(mi.model.dim(0) == 1);
  CHECK(mi.model.dim(1) == 0);
  CHECK(check_minimality(mi, interval).ok);

  // R(t,dt) (x) A for A with nonzero H^1 keeps only A's classes.
  const Cdga at = cdga::tensor_with_interval(cdga::marked_curve_model(0, 3), 2).algebra;
  const MinimalModel mt = build(at, 3);
  CHECK(mt.stage_dims() == std::vector<Index>{2, 1, 2});
  CHECK(check_minimality(mt, at).ok);
}

TEST_CASE("check_minimality flags corrupted stage data") {
  const Cdga a = cdga::marked_curve_model(0, 3);

  // Zeroed attaching map: the tower stops killing H^1 at stage 2.
  MinimalModel broken = build(a, 3);
  broken.stages[1].attach.setZero();
  const auto rep = check_minimality(broken, a);
  CHECK_FALSE(rep.ok);
  CHECK(rep.first_failing_stage == 2);
  CHECK(rep.message.find("H^1") != std::string::npos);

  // A non-cocycle attaching column at stage 4.
  MinimalModel bad = build(a, 4);
  const Index prefix = 5;  // generators of stages 1..3
  const auto pairs = pair_basis(prefix);
  bool corrupted = false;
  for (Index r = 0; r < static_cast<Index>(pairs.size()) && !corrupted; ++r) {
    const auto [u, v] = pairs[r];
    const Vec pr = bad.model.multiply(1, Vec(Vec::Unit(8, u)), 1, Vec(Vec::Unit(8, v)));
    if (!Vec(bad.model.d(2) * pr).isZero(Rational(0))) {
      bad.stages[3].attach.col(0) = Vec::Unit(static_cast<Index>(pairs.size()), r);
      corrupted = true;
    }
  }
  REQUIRE(corrupted);
  const auto rep2 = check_minimality(bad, a);
  CHECK_FALSE(rep2.ok);
  CHECK(rep2.first_failing_stage == 4);
  CHECK(rep2.message.find("cocycle") != std::string::npos);
}

TEST_CASE("homotopy lifting: identity, section changes, and a wrong candidate") {
  const Cdga a = cdga::marked_curve_model(0, 3);
  const CdgaMorphism id = identity_morphism(a);
  const MinimalModel m = build(a, 3);

  // Identity comparison: constant homotopy exists.
  const Mat one = Mat::Identity(m.total_gens(), m.total_gens());
  CHECK(homotopy_lift_check(a, a, id, m, m, one));

  // Same algebra under the alternative section rule.
  BuildOptions alt;
  alt.alt_sections = true;
  const MinimalModel malt = build(a, 3, alt);
  CHECK(malt.stage_dims() == m.stage_dims());
  const Mat phi = induced_comparison(a, a, id, m, malt);
  CHECK(exactlin::rank<Rational>(phi) == m.total_gens());
  CHECK(homotopy_lift_check(a, a, id, m, malt, phi));

  // The swap on H^1 is a genuine morphism of models, but it cannot be
  // homotopic to the identity: endpoint classes differ.
  CdgaMorphism swap;
  swap.f.f[0] = Mat::Identity(1, 1);
  swap.f.f[1] = Mat::Zero(2, 2);
  swap.f.f[1](0, 1) = 1;
  swap.f.f[1](1, 0) = 1;
  REQUIRE(cdga::validate_morphism(a, a, swap).ok);
  const Mat phi_swap = induced_comparison(a, a, swap, m, m);
  CHECK_FALSE(homotopy_lift_check(a, a, id, m, m, phi_swap));
  // ... while against f = swap itself it is the induced comparison.
  CHECK(homotopy_lift_check(a, a, swap, m, m, phi_swap));

  // Swapping only the stage-1 block breaks the chain rule: rejected.
  Mat nonmorphism = one;
  nonmorphism.topLeftCorner(2, 2) = swap.f.f[1];
  CHECK_THROWS_AS(homotopy_lift_check(a, a, id, m, m, nonmorphism), std::invalid_argument);

  // Shape errors are rejected before any solving.
  CHECK_THROWS_AS(homotopy_lift_check(a, a, id, m, m, Mat(Mat::Identity(3, 3))),
                  std::invalid_argument);
}

TEST_CASE("induced_comparison input checking") {
  const Cdga a = cdga::marked_curve_model(0, 3);
  const Cdga b = cdga::marked_curve_model(1, 2);  // H^1 ranks differ: not a quasi-iso
  const MinimalModel ma = build(a, 2);
  const MinimalModel mb = build(b, 2);
  CdgaMorphism f;  // zero map in degree 1 is a valid morphism, but no quasi-iso
  f.f.f[0] = Mat::Identity(1, 1);
  f.f.f[1] = Mat::Zero(3, 2);
  REQUIRE(cdga::validate_morphism(a, b, f).ok);
  CHECK_THROWS_AS(induced_comparison(a, b, f, ma, mb), std::invalid_argument);

  CdgaMorphism zero_to_self;
  zero_to_self.f.f[0] = Mat::Identity(1, 1);
  zero_to_self.f.f[1] = Mat::Zero(2, 2);
  REQUIRE(cdga::validate_morphism(a, a, zero_to_self).ok);
  CHECK_THROWS_AS(induced_comparison(a, a, zero_to_self, ma, ma), std::invalid_argument);
}

TEST_CASE("serialization round trip and build idempotence through JSON") {
  const Cdga a = cdga::unmarked_curve_model(2);
  const MinimalModel m = build(a, 2);
  const auto j = to_json(m);
  const MinimalModel back = minimal_from_json(j, a);
  CHECK(back.model_cap == m.model_cap);
  REQUIRE(back.stages.size() == m.stages.size());
  for (size_t q = 0; q < m.stages.size(); ++q) {
    CHECK(back.stages[q].dim == m.stages[q].dim);
    CHECK(back.stages[q].attach == m.stages[q].attach);
    CHECK(back.stages[q].rho1 == m.stages[q].rho1);
  }
  for (int n = 0; n <= m.model.cap; ++n) CHECK(back.model.dim(n) == m.model.dim(n));
  CHECK(back.model.d(1) == m.model.d(1));
  CHECK(back.rho.at(back.model, a, 1) == m.rho.at(m.model, a, 1));
  CHECK(to_json(back) == j);

  // Rebuilding from a round-tripped input algebra reproduces the stage data.
  const Cdga a2 = cdga::cdga_from_json(cdga::to_json(a));
  const MinimalModel m2 = build(a2, 2);
  for (size_t q = 0; q < m.stages.size(); ++q) {
    CHECK(m2.stages[q].attach == m.stages[q].attach);
    CHECK(m2.stages[q].rho1 == m.stages[q].rho1);
  }
}

TEST_CASE("build rejects bad inputs") {
  const Cdga a = cdga::marked_curve_model(0, 3);
  CHECK_THROWS_AS(build(a, 0), std::invalid_argument);
  BuildOptions bad;
  bad.model_cap = 5;
  CHECK_THROWS_AS(build(a, 2, bad), std::invalid_argument);

  // Q x Q in degree 0: a valid algebra that is not connected.
  Cdga split;
  split.cap = 1;
  split.space.labels[0] = {"1", "u"};
  Mat t = Mat::Zero(2, 4);
  t(0, 0) = 1;  // 1*1 = 1
  t(1, 1) = 1;  // 1*u = u
  t(1, 2) = 1;  // u*1 = u
  t(1, 3) = 1;  // u*u = u
  split.mult[{0, 0}] = t;
  split.augmentation = Vec::Zero(2);
  split.augmentation(0) = 1;
  split.unit = 0;
  REQUIRE(cdga::validate(split).ok);
  CHECK_THROWS_AS(build(split, 2), std::invalid_argument);
}
