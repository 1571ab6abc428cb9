#pragma once

#include "logpi1/cdga.hpp"
#include "logpi1/nilpotent_lie.hpp"

#include <string>
#include <vector>

namespace logpi1::minimal {

using cdga::Cdga;
using cdga::CdgaMorphism;
using exactlin::Index;

// One Hirsch extension: dim new degree-1 generators e with d(e) = attach (a
// cocycle in the exterior square of the earlier generators, rows indexed by
// pairs u < v in lexicographic order) and rho(e) = rho1 in A^1.
struct HirschStage {
  Index dim = 0;
  Mat attach;  // C(earlier, 2) x dim
  Mat rho1;    // dim A^1 x dim
};

// Tower of Hirsch extensions M(Q) = /\(E_1 (+) ... (+) E_Q) together with the
// assembled truncated cdga (degrees 0..model_cap) and the morphism rho to A.
// model_cap = 2 skips the exterior cube; use it when the generator count makes
// degree 3 impractical (the stage data stays complete either way).
struct MinimalModel {
  std::vector<HirschStage> stages;
  Cdga model;
  CdgaMorphism rho;
  int model_cap = 3;

  std::vector<Index> stage_dims() const;
  Index total_gens() const;
};

struct BuildOptions {
  int model_cap = 3;
  // Alternate deterministic section rule (reversed scan order for cohomology
  // representatives and kernel bases); produces a second model of the same
  // algebra for comparison tests.
  bool alt_sections = false;
};

// Inductive construction: stage 1 is H^1(A) with chosen cocycle
// representatives; stage q adjoins Ker(H^2(M(q-1)) -> H^2(A)) with the chosen
// representative cocycles as attaching maps. Deterministic.
MinimalModel build(const Cdga& a, int stages, const BuildOptions& opt = {});

// The nilpotent Lie algebra dual to the degree-1 part, bracket dual to -d,
// presented on generators dual to a basis of L/[L,L] as a quotient of the free
// nilpotent Lie algebra of class Q.
lie::NilpotentLie dual_lie(const MinimalModel& m);

struct MinimalityReport {
  bool ok = true;
  int first_failing_stage = 0;  // 1-based; 0 when ok
  std::string message;
};

// Re-derives the defining properties stage by stage: H^0 and H^1 of M(q') map
// isomorphically to those of A, and H^2(M(q'-1), A) -> H^2(M(q'), A) vanishes
// (mapping cones computed independently of the construction).
MinimalityReport check_minimality(const MinimalModel& m, const Cdga& a);

// Degree-1 matrix of the comparison morphism phi: M -> M' over f: A -> A'
// (class matching stage by stage, then strictification by a coboundary
// correction). Throws if f is not a morphism between quasi-isomorphic inputs.
Mat induced_comparison(const Cdga& a, const Cdga& a2, const CdgaMorphism& f,
                       const MinimalModel& ma, const MinimalModel& ma2);

// Decides existence of a Sullivan homotopy h: M -> R(t,dt) (x) A' between
// f . rho and rho' . phi, solving generator by generator with polynomial cap
// D = Q+1 and one retry at 2D. phi1 is the degree-1 matrix of the candidate;
// it must extend to a cdga morphism (throws invalid_argument otherwise).
bool homotopy_lift_check(const Cdga& a, const Cdga& a2, const CdgaMorphism& f,
                         const MinimalModel& ma, const MinimalModel& ma2, const Mat& phi1);

nlohmann::json to_json(const MinimalModel& m);
MinimalModel minimal_from_json(const nlohmann::json& j, const Cdga& a);

}  // namespace logpi1::minimal
