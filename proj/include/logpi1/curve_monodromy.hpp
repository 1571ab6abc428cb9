#pragma once

#include "logpi1/nilpotent_lie.hpp"

#include "json.hpp"

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace logpi1::curve {

using exactlin::Index;

// Dual graph of a semistable curve over the standard log point: one vertex per
// component (with geometric genus and marked-point count), one edge per double
// point. Equal endpoints encode a self-intersection; every edge has two
// distinguishable sides (branches), side s living at ends[s].
struct Vertex {
  int id = 0;
  int genus = 0;
  int marked = 0;
};

struct Edge {
  int id = 0;
  std::array<int, 2> ends{};
};

struct DualGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
};

struct ValidationReport {
  bool ok = true;
  std::string first_violation;
};

enum class GraphKind { stable, minimal_semistable };

// Stability: every rational component needs (double points, self-loops counted
// doubly) + marks >= 3. Minimality relaxes this to rational components meeting
// other components in at most one point. Both exclude the smooth unmarked
// genus-1 curve. Throws on a disconnected graph or duplicate/missing ids.
ValidationReport validate_graph(const DualGraph& g, GraphKind kind);

// Base point data: a good section (image in the smooth non-marked locus), a
// section through a marked point with contact slope b >= 1, or a tangential
// section at one side of a double point.
struct BaseDatum {
  enum class Kind { good, marked, tangential };
  Kind kind = Kind::good;
  int vertex = 0;  // good, marked
  long slope = 1;  // marked
  int edge = 0;    // tangential
  int side = 0;    // tangential
};

BaseDatum good_point(int vertex);
BaseDatum marked_point(int vertex, long slope);
BaseDatum tangential_side(int edge, int side);

// Restriction of a nilpotent connection to a double point: two commuting
// nilpotent endomorphisms (the branch residues); the tangential eta acts by
// exp(n1 - n2).
struct NilpotentPair {
  Mat n1, n2;
};

ValidationReport validate(const NilpotentPair& p);

// Generators contributed by one component: 2*genus surface generators followed
// by the branch/marked loop generators (one per special point except the
// last). survive[j] is the generator's index in the amalgamated algebra, or -1
// if the edge relations eliminated it.
struct GenBlock {
  int vertex = 0;
  int genus = 0;
  int marked = 0;
  int branches = 0;
  std::vector<std::string> labels;
  std::vector<Index> survive;
};

// Presentation of L(X/S)/Fil^{q+1}: free blocks per component amalgamated over
// the edges. Each side's e(edge, side) is the log of the tangential eta there;
// the two sides of an edge are mutually inverse, so e(edge, 0) + e(edge, 1) = 0
// is the defining relation (for an unmarked component the side contributes its
// symplectic sum, for a marked one its distinguished loop generator).
struct CurvePresentation {
  DualGraph graph;
  int q = 4;
  lie::NilpotentLie algebra;
  std::vector<GenBlock> blocks;  // vertex order, ids ascending
  std::map<std::pair<int, int>, lie::LieElement> e;  // (edge id, side)
};

// Amalgamated truncated presentation. Requires q >= 2 and a structurally valid
// connected graph (stability is not required here); the base datum must name
// an existing vertex/edge and respect its marked count.
CurvePresentation presentation(const DualGraph& g, const BaseDatum& base, int q);

const lie::LieElement& e_image(const CurvePresentation& p, int edge, int side);

// One reduced line instance: the induced quotient line graph (original ids,
// interior marks erased) plus the terminal suggested as the base end.
struct ReducedInstance {
  DualGraph line;
  int y_terminal = 0;
  std::string provenance;
};

struct Reduction {
  std::vector<ReducedInstance> instances;
  std::vector<std::string> trace;
};

// Tree-shaped graphs only (loops go to loop_check): connect the two smallest
// terminal vertices by the unique path, discard off-path branches by smoothing
// their attachment points, erase interior marked points, and split the line at
// interior non-rational components. Every output is a line whose interior
// vertices are rational and unmarked; a smooth vertex reduces to nothing.
Reduction reduce(const DualGraph& g);

// Monodromy on a line presentation, computed at the tangential base at the
// terminal the base datum points to: identity on that terminal's block,
// b -> ad_exp(e0, n, b) on the far block, where e0 = e(first edge, base side)
// and n = number of edges. Bracket preservation is verified before returning.
lie::LieAutomorphism monodromy_automorphism(const CurvePresentation& p, const BaseDatum& base);

// Abelianized monodromy defect along the first cycle: each of the n cycle
// edges contributes exp(n1 - n2) on the 2-dimensional witness pair with branch
// residues +1/-1; returns the accumulated upper corner 2n. Throws "no loop" on
// trees.
long loop_check(const DualGraph& g);

struct InstanceVerdict {
  DualGraph line;
  int y_vertex = 0;
  int n_edges = 0;
  bool non_inner = false;
  lie::InnerVerdict inner;
};

struct MonodromyReport {
  bool smooth = false;
  int q = 4;
  std::string verdict;
  bool nontrivial_in_out = false;
  std::vector<std::string> trace;
  std::vector<InstanceVerdict> instances;
  lie::LieElement delta_log;  // smooth, not-good base: log of the inner witness
  long loop_pairing = 0;      // loop branch: the 2n defect
};

// Full decision pipeline at truncation q: smooth curves are trivial in Aut
// (good base) or inner via delta = exp(b e) (marked base); a loop forces
// nontriviality already on the abelianization; otherwise reduce to lines, test
// each instance's monodromy for innerness, and aggregate.
MonodromyReport analyze(const DualGraph& g, const BaseDatum& base, int q = 4);

nlohmann::json graph_to_json(const DualGraph& g);
DualGraph graph_from_json(const nlohmann::json& j);
nlohmann::json base_to_json(const BaseDatum& b);
BaseDatum base_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const MonodromyReport& r);

}  // namespace logpi1::curve
