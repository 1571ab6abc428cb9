#include "logpi1/curve_monodromy.hpp"

#include "logpi1/exactlin.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logpi1::curve {

namespace {

std::map<int, int> vertex_positions(const DualGraph& g) {
  std::map<int, int> pos;
  for (size_t i = 0; i < g.vertices.size(); ++i)
    if (!pos.emplace(g.vertices[i].id, static_cast<int>(i)).second)
      throw std::invalid_argument("dual graph: duplicate vertex id " +
                                  std::to_string(g.vertices[i].id));
  return pos;
}

void check_structure(const DualGraph& g) {
  if (g.vertices.empty()) throw std::invalid_argument("dual graph: no vertices");
  const auto pos = vertex_positions(g);
  std::set<int> eids;
  for (const auto& v : g.vertices)
    if (v.genus < 0 || v.marked < 0)
      throw std::invalid_argument("dual graph: negative genus or marked count at vertex " +
                                  std::to_string(v.id));
  for (const auto& e : g.edges) {
    if (!eids.insert(e.id).second)
      throw std::invalid_argument("dual graph: duplicate edge id " + std::to_string(e.id));
    for (int s = 0; s < 2; ++s)
      if (!pos.count(e.ends[static_cast<size_t>(s)]))
        throw std::invalid_argument("dual graph: edge " + std::to_string(e.id) +
                                    " touches unknown vertex " +
                                    std::to_string(e.ends[static_cast<size_t>(s)]));
  }
  // Connectivity.
  std::vector<char> seen(g.vertices.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& e : g.edges)
      for (int s = 0; s < 2; ++s) {
        if (pos.at(e.ends[static_cast<size_t>(s)]) != v) continue;
        const int w = pos.at(e.ends[static_cast<size_t>(1 - s)]);
        if (!seen[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          stack.push_back(w);
        }
      }
  }
  for (size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument("dual graph: disconnected (vertex " +
                                  std::to_string(g.vertices[i].id) + " unreachable)");
}

DualGraph canonical(const DualGraph& g) {
  DualGraph c = g;
  std::sort(c.vertices.begin(), c.vertices.end(),
            [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
  std::sort(c.edges.begin(), c.edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  return c;
}

// Incident branches at each vertex, ordered by (edge id, side). A self-loop
// contributes two branches to the same vertex.
std::map<int, std::vector<std::pair<int, int>>> branch_lists(const DualGraph& g) {
  std::map<int, std::vector<std::pair<int, int>>> br;
  for (const auto& v : g.vertices) br[v.id];
  for (const auto& e : g.edges)
    for (int s = 0; s < 2; ++s) br[e.ends[static_cast<size_t>(s)]].emplace_back(e.id, s);
  return br;
}

void check_base(const DualGraph& g, const BaseDatum& base) {
  const auto pos = vertex_positions(g);
  switch (base.kind) {
    case BaseDatum::Kind::good:
      if (!pos.count(base.vertex))
        throw std::invalid_argument("base: unknown vertex " + std::to_string(base.vertex));
      break;
    case BaseDatum::Kind::marked: {
      if (!pos.count(base.vertex))
        throw std::invalid_argument("base: unknown vertex " + std::to_string(base.vertex));
      if (g.vertices[static_cast<size_t>(pos.at(base.vertex))].marked < 1)
        throw std::invalid_argument("base: vertex " + std::to_string(base.vertex) +
                                    " has no marked point");
      if (base.slope < 1) throw std::invalid_argument("base: marked slope must be >= 1");
      break;
    }
    case BaseDatum::Kind::tangential: {
      const auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                   [&](const Edge& e) { return e.id == base.edge; });
      if (it == g.edges.end())
        throw std::invalid_argument("base: unknown edge " + std::to_string(base.edge));
      if (base.side != 0 && base.side != 1)
        throw std::invalid_argument("base: edge side must be 0 or 1");
      break;
    }
  }
}

long degree(const DualGraph& g, int vertex) {
  long d = 0;
  for (const auto& e : g.edges)
    for (int s = 0; s < 2; ++s)
      if (e.ends[static_cast<size_t>(s)] == vertex) ++d;
  return d;
}

bool has_cycle(const DualGraph& g) {
  // Connected, so a tree has exactly |V|-1 edges.
  return g.edges.size() >= g.vertices.size();
}

// Linear bookkeeping for the amalgamation: a Lie element of the shape
// (degree-1 combination of block generators) + (combination of the blocks'
// symplectic sums). Closed under the edge substitutions because surface
// generators are never eliminated.
struct Formal {
  Vec deg1;
  Vec symp;
};

Formal formal_zero(Index gens, Index blocks) {
  return {Vec::Zero(gens), Vec::Zero(blocks)};
}

void axpy(Formal& a, const Rational& c, const Formal& b) {
  a.deg1 += c * b.deg1;
  a.symp += c * b.symp;
}

}  // namespace

BaseDatum good_point(int vertex) {
  BaseDatum b;
  b.kind = BaseDatum::Kind::good;
  b.vertex = vertex;
  return b;
}

BaseDatum marked_point(int vertex, long slope) {
  BaseDatum b;
  b.kind = BaseDatum::Kind::marked;
  b.vertex = vertex;
  b.slope = slope;
  return b;
}

BaseDatum tangential_side(int edge, int side) {
  BaseDatum b;
  b.kind = BaseDatum::Kind::tangential;
  b.edge = edge;
  b.side = side;
  return b;
}

ValidationReport validate_graph(const DualGraph& g, GraphKind kind) {
  check_structure(g);
  if (g.vertices.size() == 1 && g.edges.empty() && g.vertices[0].genus == 1 &&
      g.vertices[0].marked == 0)
    return {false, "smooth unmarked genus-1 curve is excluded"};
  for (const auto& v : g.vertices) {
    if (v.genus > 0) continue;
    long to_others = 0, doubled = 0;
    for (const auto& e : g.edges) {
      const bool self = e.ends[0] == e.ends[1];
      for (int s = 0; s < 2; ++s)
        if (e.ends[static_cast<size_t>(s)] == v.id) ++doubled;
      if (!self && (e.ends[0] == v.id || e.ends[1] == v.id)) ++to_others;
    }
    if (kind == GraphKind::minimal_semistable && to_others > 1) continue;
    if (doubled + v.marked < 3)
      return {false, "rational component " + std::to_string(v.id) + " has only " +
                         std::to_string(doubled + v.marked) + " special points"};
  }
  return {};
}

ValidationReport validate(const NilpotentPair& p) {
  const Index n = p.n1.rows();
  if (p.n1.cols() != n || p.n2.rows() != n || p.n2.cols() != n)
    return {false, "endomorphisms are not square of equal size"};
  for (const Mat* m : {&p.n1, &p.n2}) {
    Mat pw = *m;
    for (Index k = 1; k < n; ++k) pw = pw * *m;
    if (!pw.isZero(Rational(0))) return {false, "endomorphism is not nilpotent"};
  }
  if (p.n1 * p.n2 != p.n2 * p.n1) return {false, "residues do not commute"};
  return {};
}

CurvePresentation presentation(const DualGraph& graph, const BaseDatum& base, int q) {
  if (q < 2) throw std::invalid_argument("presentation: truncation must be at least 2");
  check_structure(graph);
  check_base(graph, base);
  const DualGraph g = canonical(graph);
  const auto branches = branch_lists(g);

  // Blocks: 2g surface generators, then one loop generator per special point
  // except the last (branches first, marked points after).
  CurvePresentation p;
  p.graph = g;
  p.q = q;
  Index total = 0;
  std::vector<Index> offset;
  for (const auto& v : g.vertices) {
    GenBlock b;
    b.vertex = v.id;
    b.genus = v.genus;
    b.marked = v.marked;
    b.branches = static_cast<int>(branches.at(v.id).size());
    const long specials = v.marked + b.branches;
    const Index rank = 2 * v.genus + std::max<long>(specials - 1, 0);
    for (Index j = 0; j < rank; ++j)
      b.labels.push_back("v" + std::to_string(v.id) + "_" + std::to_string(j + 1));
    b.survive.assign(static_cast<size_t>(rank), -1);
    offset.push_back(total);
    total += rank;
    p.blocks.push_back(std::move(b));
  }
  if (total > 26)
    throw std::invalid_argument("presentation: more than 26 generators are not supported");

  const Index nblocks = static_cast<Index>(p.blocks.size());
  const auto vpos = vertex_positions(g);

  // natural(v, j): log of the tangential eta at the j-th special point of v
  // (1-based), written in v's block. The last special point carries the
  // symplectic sum minus the other loop generators, so that the degree-1
  // residues of one component sum to zero.
  auto natural = [&](int vid, long j) {
    const int bi = vpos.at(vid);
    const GenBlock& b = p.blocks[static_cast<size_t>(bi)];
    const long specials = b.marked + b.branches;
    Formal f = formal_zero(total, nblocks);
    if (j < specials) {
      f.deg1(offset[static_cast<size_t>(bi)] + 2 * b.genus + (j - 1)) = 1;
    } else {
      f.symp(bi) = 1;
      for (long t = 0; t + 1 < specials; ++t)
        f.deg1(offset[static_cast<size_t>(bi)] + 2 * b.genus + t) = -1;
    }
    return f;
  };

  // Edge relators natural(side 0) + natural(side 1), plus the symplectic
  // relator of any isolated unmarked component. Degree-1 parts eliminate
  // generators (highest index wins, so earlier blocks persist).
  std::vector<Formal> pending;
  std::map<Index, Formal> expr;  // eliminated generator -> reduced expression
  auto reduce_formal = [&](Formal& f) {
    for (const auto& [gen, ex] : expr) {
      const Rational c = f.deg1(gen);
      if (c == 0) continue;
      f.deg1(gen) = 0;
      axpy(f, c, ex);
    }
  };
  auto process = [&](Formal f) {
    reduce_formal(f);
    Index pivot = -1;
    for (Index i = 0; i < total; ++i)
      if (f.deg1(i) != 0) pivot = i;
    if (pivot < 0) {
      pending.push_back(std::move(f));
      return;
    }
    const Rational c = f.deg1(pivot);
    f.deg1(pivot) = 0;
    Formal ex = formal_zero(total, nblocks);
    axpy(ex, Rational(-1) / c, f);
    for (auto& [gen, old] : expr) {
      const Rational d = old.deg1(pivot);
      if (d == 0) continue;
      old.deg1(pivot) = 0;
      axpy(old, d, ex);
    }
    expr.emplace(pivot, std::move(ex));
  };

  for (const auto& e : g.edges) {
    Formal r = natural(e.ends[0], [&] {
      const auto& list = branches.at(e.ends[0]);
      return static_cast<long>(std::find(list.begin(), list.end(), std::make_pair(e.id, 0)) -
                               list.begin()) +
             1;
    }());
    axpy(r, 1, natural(e.ends[1], [&] {
           const auto& list = branches.at(e.ends[1]);
           return static_cast<long>(
                      std::find(list.begin(), list.end(), std::make_pair(e.id, 1)) - list.begin()) +
                  1;
         }()));
    process(std::move(r));
  }
  for (Index bi = 0; bi < nblocks; ++bi) {
    const GenBlock& b = p.blocks[static_cast<size_t>(bi)];
    if (b.marked + b.branches == 0 && b.genus >= 1) {
      Formal r = formal_zero(total, nblocks);
      r.symp(bi) = 1;
      pending.push_back(std::move(r));
    }
  }

  // Assemble the quotient on the surviving generators.
  std::vector<Index> final_index(static_cast<size_t>(total), -1);
  std::vector<std::string> labels;
  for (Index bi = 0; bi < nblocks; ++bi) {
    GenBlock& b = p.blocks[static_cast<size_t>(bi)];
    for (size_t j = 0; j < b.labels.size(); ++j) {
      const Index gi = offset[static_cast<size_t>(bi)] + static_cast<Index>(j);
      if (expr.count(gi)) continue;
      final_index[static_cast<size_t>(gi)] = static_cast<Index>(labels.size());
      b.survive[j] = final_index[static_cast<size_t>(gi)];
      labels.push_back(b.labels[j]);
    }
  }
  lie::NilpotentLie free = lie::free_nilpotent(labels, q);

  auto to_free = [&](const Formal& f) {
    lie::LieElement x;
    Vec d1 = Vec::Zero(free.dim(1));
    for (Index i = 0; i < total; ++i)
      if (f.deg1(i) != 0) d1(final_index[static_cast<size_t>(i)]) += f.deg1(i);
    if (!d1.isZero()) x.comp[1] = d1;
    for (Index bi = 0; bi < nblocks; ++bi) {
      if (f.symp(bi) == 0) continue;
      const GenBlock& b = p.blocks[static_cast<size_t>(bi)];
      for (int i = 0; i < b.genus; ++i) {
        const Index a = final_index[static_cast<size_t>(offset[static_cast<size_t>(bi)] + 2 * i)];
        const Index c =
            final_index[static_cast<size_t>(offset[static_cast<size_t>(bi)] + 2 * i + 1)];
        x = free.add(x, free.scale(f.symp(bi), free.bracket(free.gen(a), free.gen(c))));
      }
    }
    return x;
  };

  std::vector<lie::LieElement> relators;
  for (const auto& f : pending) {
    lie::LieElement r = to_free(f);
    if (!free.is_zero(r)) relators.push_back(std::move(r));
  }
  p.algebra = lie::quotient(free, relators);

  auto to_algebra = [&](const Formal& f) {
    lie::LieElement x = to_free(f);
    for (auto& [n, v] : x.comp) v = (p.algebra.projection(n) * v).eval();
    lie::LieElement y;
    for (auto& [n, v] : x.comp)
      if (!v.isZero()) y.comp[n] = v;
    return y;
  };
  for (const auto& e : g.edges)
    for (int s = 0; s < 2; ++s) {
      const auto& list = branches.at(e.ends[static_cast<size_t>(s)]);
      const long j =
          std::find(list.begin(), list.end(), std::make_pair(e.id, s)) - list.begin() + 1;
      Formal f = natural(e.ends[static_cast<size_t>(s)], j);
      reduce_formal(f);
      p.e.emplace(std::make_pair(e.id, s), to_algebra(f));
    }
  return p;
}

const lie::LieElement& e_image(const CurvePresentation& p, int edge, int side) {
  const auto it = p.e.find({edge, side});
  if (it == p.e.end())
    throw std::invalid_argument("e_image: no side " + std::to_string(side) + " of edge " +
                                std::to_string(edge));
  return it->second;
}

Reduction reduce(const DualGraph& graph) {
  check_structure(graph);
  if (has_cycle(graph))
    throw std::invalid_argument("reduce: graph has a loop; run loop_check");
  const DualGraph g = canonical(graph);
  Reduction red;
  if (g.edges.empty()) {
    red.trace.push_back("smooth: no double points, nothing to reduce");
    return red;
  }

  std::vector<int> terminals;
  for (const auto& v : g.vertices)
    if (degree(g, v.id) == 1) terminals.push_back(v.id);
  // A tree with an edge has at least two leaves; ids are ascending already.
  const int a = terminals[0], b = terminals[1];

  // Unique a-b path in the tree.
  const auto vpos = vertex_positions(g);
  std::map<int, std::pair<int, int>> parent;  // vertex -> (parent vertex, edge)
  std::vector<int> queue{a};
  parent[a] = {a, -1};
  for (size_t h = 0; h < queue.size(); ++h) {
    const int v = queue[h];
    for (const auto& e : g.edges)
      for (int s = 0; s < 2; ++s) {
        if (e.ends[static_cast<size_t>(s)] != v) continue;
        const int w = e.ends[static_cast<size_t>(1 - s)];
        if (parent.count(w)) continue;
        parent[w] = {v, e.id};
        queue.push_back(w);
      }
  }
  std::vector<int> path;        // vertex ids, a..b
  std::vector<int> path_edges;  // edge ids along it
  for (int v = b; v != a; v = parent.at(v).first) {
    path.push_back(v);
    path_edges.push_back(parent.at(v).second);
  }
  path.push_back(a);
  std::reverse(path.begin(), path.end());
  std::reverse(path_edges.begin(), path_edges.end());

  std::ostringstream line;
  line << "line";
  for (const int v : path) line << " v" << v;
  red.trace.push_back(line.str());

  const std::set<int> on_path(path.begin(), path.end());
  for (const auto& e : g.edges) {
    if (std::find(path_edges.begin(), path_edges.end(), e.id) != path_edges.end()) continue;
    if (on_path.count(e.ends[0]) || on_path.count(e.ends[1])) {
      const int at = on_path.count(e.ends[0]) ? e.ends[0] : e.ends[1];
      red.trace.push_back("discarded branch at v" + std::to_string(at) + " (edge " +
                          std::to_string(e.id) + "), attachment smoothed");
    }
  }

  std::vector<Vertex> pv;
  for (const int v : path) pv.push_back(g.vertices[static_cast<size_t>(vpos.at(v))]);
  for (size_t i = 1; i + 1 < pv.size(); ++i)
    if (pv[i].marked > 0) {
      red.trace.push_back("erased " + std::to_string(pv[i].marked) + " marked point(s) at v" +
                          std::to_string(pv[i].id));
      pv[i].marked = 0;
    }

  std::vector<size_t> cuts{0};
  for (size_t i = 1; i + 1 < pv.size(); ++i)
    if (pv[i].genus > 0) {
      red.trace.push_back("split at non-rational interior v" + std::to_string(pv[i].id));
      cuts.push_back(i);
    }
  cuts.push_back(pv.size() - 1);

  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    ReducedInstance inst;
    std::ostringstream prov;
    prov << "instance";
    for (size_t i = cuts[c]; i <= cuts[c + 1]; ++i) {
      inst.line.vertices.push_back(pv[i]);
      prov << " v" << pv[i].id;
      if (i > cuts[c]) {
        // Copy the original edge so its side indices stay meaningful.
        const int eid = path_edges[i - 1];
        inst.line.edges.push_back(*std::find_if(
            g.edges.begin(), g.edges.end(), [&](const Edge& e) { return e.id == eid; }));
      }
    }
    inst.y_terminal = pv[cuts[c]].id;
    inst.provenance = prov.str();
    red.instances.push_back(std::move(inst));
  }
  return red;
}

lie::LieAutomorphism monodromy_automorphism(const CurvePresentation& p, const BaseDatum& base) {
  const DualGraph& g = p.graph;
  check_base(g, base);
  lie::LieAutomorphism phi;
  const Index k = static_cast<Index>(p.algebra.generators().size());

  if (g.edges.empty()) {
    if (base.kind == BaseDatum::Kind::tangential)
      throw std::invalid_argument("monodromy_automorphism: tangential base needs an edge");
    for (Index i = 0; i < k; ++i) phi.images.push_back(p.algebra.gen(i));
    return phi;
  }

  // Line shape: two leaves, interior of degree 2, no self-loop, and every
  // interior generator eliminated by the amalgamation.
  std::vector<int> terminals;
  for (const auto& v : g.vertices) {
    const long d = degree(g, v.id);
    if (d == 1)
      terminals.push_back(v.id);
    else if (d != 2)
      throw std::invalid_argument("monodromy_automorphism: dual graph is not a line");
  }
  for (const auto& e : g.edges)
    if (e.ends[0] == e.ends[1])
      throw std::invalid_argument("monodromy_automorphism: dual graph is not a line");
  if (terminals.size() != 2 || g.edges.size() + 1 != g.vertices.size())
    throw std::invalid_argument("monodromy_automorphism: dual graph is not a line");

  int y = -1;
  switch (base.kind) {
    case BaseDatum::Kind::good:
    case BaseDatum::Kind::marked:
      y = base.vertex;
      break;
    case BaseDatum::Kind::tangential: {
      const auto it = std::find_if(g.edges.begin(), g.edges.end(),
                                   [&](const Edge& e) { return e.id == base.edge; });
      y = it->ends[static_cast<size_t>(base.side)];
      break;
    }
  }
  if (y != terminals[0] && y != terminals[1])
    throw std::invalid_argument("monodromy_automorphism: base is not at a terminal component");
  const int z = y == terminals[0] ? terminals[1] : terminals[0];

  for (const auto& b : p.blocks) {
    if (b.vertex == y || b.vertex == z) continue;
    for (const Index fi : b.survive)
      if (fi >= 0)
        throw std::invalid_argument(
            "monodromy_automorphism: interior component contributes generators");
  }

  int e0 = -1, side = -1;
  for (const auto& e : g.edges)
    for (int s = 0; s < 2; ++s)
      if (e.ends[static_cast<size_t>(s)] == y) {
        e0 = e.id;
        side = s;
      }
  const lie::LieElement& eta = e_image(p, e0, side);
  const long n = static_cast<long>(g.edges.size());

  std::vector<int> owner(static_cast<size_t>(k), -1);
  for (const auto& b : p.blocks)
    for (const Index fi : b.survive)
      if (fi >= 0) owner[static_cast<size_t>(fi)] = b.vertex;
  for (Index i = 0; i < k; ++i)
    phi.images.push_back(owner[static_cast<size_t>(i)] == z
                             ? p.algebra.ad_exp(eta, n, p.algebra.gen(i))
                             : p.algebra.gen(i));

  const auto rep = p.algebra.validate_automorphism(phi);
  if (!rep.ok)
    throw std::logic_error("monodromy_automorphism: bracket preservation failed: " +
                           rep.first_violation);
  return phi;
}

long loop_check(const DualGraph& graph) {
  check_structure(graph);
  const DualGraph g = canonical(graph);
  const auto vpos = vertex_positions(g);

  // First cycle: scan edges in id order, keeping a forest; the first edge that
  // closes up, together with the forest path between its ends, is the loop.
  std::vector<int> up(g.vertices.size());
  for (size_t i = 0; i < up.size(); ++i) up[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int v) {
    return up[static_cast<size_t>(v)] == v ? v : up[static_cast<size_t>(v)] = find(up[static_cast<size_t>(v)]);
  };
  std::map<int, std::vector<std::pair<int, int>>> tree;  // vertex pos -> (nbr pos, edge id)
  long n = -1;
  for (const auto& e : g.edges) {
    const int a = vpos.at(e.ends[0]), b = vpos.at(e.ends[1]);
    if (find(a) == find(b)) {
      // Forest path a..b by depth-first search.
      std::map<int, int> par;
      std::vector<int> stack{a};
      par[a] = a;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (const auto& [w, eid] : tree[v])
          if (!par.count(w)) {
            par[w] = v;
            stack.push_back(w);
          }
      }
      n = 1;
      for (int v = b; v != a; v = par.at(v)) ++n;
      break;
    }
    up[static_cast<size_t>(find(a))] = find(b);
    tree[a].emplace_back(b, e.id);
    tree[b].emplace_back(a, e.id);
  }
  if (n < 0) throw std::invalid_argument("loop_check: no loop");

  // Residues +1/-1 at the two branches of each loop edge: eta acts by
  // exp(n1 - n2) on the witness pair, and the upper corners accumulate.
  Mat acc = Mat::Identity(2, 2);
  for (long i = 0; i < n; ++i) {
    NilpotentPair pr;
    pr.n1 = Mat::Zero(2, 2);
    pr.n1(0, 1) = 1;
    pr.n2 = -pr.n1;
    if (!validate(pr).ok) throw std::logic_error("loop_check: witness pair invalid");
    const Mat diff = pr.n1 - pr.n2;
    acc = acc * (Mat::Identity(2, 2) + diff);  // exp of a square-zero matrix
  }
  return acc(0, 1).convert_to<long>();
}

MonodromyReport analyze(const DualGraph& graph, const BaseDatum& base, int q) {
  const auto rep = validate_graph(graph, GraphKind::minimal_semistable);
  if (!rep.ok) throw std::invalid_argument("analyze: " + rep.first_violation);
  check_base(graph, base);
  const DualGraph g = canonical(graph);

  MonodromyReport r;
  r.q = q;
  r.smooth = g.edges.empty();

  if (r.smooth) {
    r.trace.push_back("smooth: no double points");
    if (base.kind == BaseDatum::Kind::good) {
      r.verdict = "trivial in Aut";
      return r;
    }
    // Not-good section through a marked point: the monodromy is conjugation
    // by delta = exp(b e), e the class of the first marked point.
    const CurvePresentation p = presentation(g, base, q);
    const auto vpos = vertex_positions(g);
    const GenBlock& b = p.blocks[static_cast<size_t>(vpos.at(base.vertex))];
    lie::LieElement e;
    if (b.marked >= 2) {
      e = p.algebra.gen(b.survive[static_cast<size_t>(2 * b.genus)]);
    } else {
      for (int i = 0; i < b.genus; ++i)
        e = p.algebra.add(e, p.algebra.bracket(p.algebra.gen(b.survive[static_cast<size_t>(2 * i)]),
                                               p.algebra.gen(b.survive[static_cast<size_t>(2 * i + 1)])));
    }
    r.delta_log = p.algebra.scale(base.slope, e);
    r.verdict = "inner, hence trivial in Out";
    r.trace.push_back("witness delta = exp(" + std::to_string(base.slope) +
                      " e) at the marked point");
    return r;
  }

  if (has_cycle(g)) {
    r.loop_pairing = loop_check(g);
    r.nontrivial_in_out = true;
    r.verdict = "nontrivial in Out";
    r.trace.push_back("loop: abelianized monodromy defect pairs to " +
                      std::to_string(r.loop_pairing));
    return r;
  }

  Reduction red = reduce(g);
  r.trace = std::move(red.trace);
  for (const auto& inst : red.instances) {
    InstanceVerdict iv;
    iv.line = inst.line;
    iv.n_edges = static_cast<int>(inst.line.edges.size());
    iv.y_vertex = inst.y_terminal;
    // Keep the caller's tangential side when it survived into this instance.
    if (base.kind == BaseDatum::Kind::tangential)
      for (const auto& e : inst.line.edges)
        if (e.id == base.edge) {
          const int v = e.ends[static_cast<size_t>(base.side)];
          if (degree(inst.line, v) == 1) iv.y_vertex = v;
        }
    int e0 = -1, side = -1;
    for (const auto& e : inst.line.edges)
      for (int s = 0; s < 2; ++s)
        if (e.ends[static_cast<size_t>(s)] == iv.y_vertex) {
          e0 = e.id;
          side = s;
        }
    const BaseDatum tb = tangential_side(e0, side);
    const CurvePresentation p = presentation(inst.line, tb, q);
    const lie::LieAutomorphism phi = monodromy_automorphism(p, tb);
    iv.inner = p.algebra.is_inner(phi);
    iv.non_inner = !iv.inner.inner;
    if (iv.non_inner) r.nontrivial_in_out = true;
    r.trace.push_back(inst.provenance + (iv.non_inner
                                             ? ": non-inner, obstruction in gr^" +
                                                   std::to_string(iv.inner.obstruction_degree)
                                             : ": inner at this truncation"));
    r.instances.push_back(std::move(iv));
  }
  r.verdict = r.nontrivial_in_out ? "nontrivial in Out"
                                  : "trivial up to Fil^" + std::to_string(q + 1);
  return r;
}

nlohmann::json graph_to_json(const DualGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : g.vertices)
    j["vertices"].push_back({{"id", v.id}, {"genus", v.genus}, {"marked", v.marked}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"id", e.id}, {"ends", {e.ends[0], e.ends[1]}}});
  return j;
}

DualGraph graph_from_json(const nlohmann::json& j) {
  DualGraph g;
  for (const auto& v : j.at("vertices")) {
    Vertex vert;
    vert.id = v.at("id").get<int>();
    vert.genus = v.at("genus").get<int>();
    vert.marked = v.value("marked", 0);
    g.vertices.push_back(vert);
  }
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    Edge edge;
    edge.id = e.at("id").get<int>();
    edge.ends = {e.at("ends").at(0).get<int>(), e.at("ends").at(1).get<int>()};
    g.edges.push_back(edge);
  }
  return g;
}

nlohmann::json base_to_json(const BaseDatum& b) {
  switch (b.kind) {
    case BaseDatum::Kind::good:
      return {{"kind", "good"}, {"vertex", b.vertex}};
    case BaseDatum::Kind::marked:
      return {{"kind", "marked"}, {"vertex", b.vertex}, {"slope", b.slope}};
    case BaseDatum::Kind::tangential:
      return {{"kind", "tangential"}, {"edge", b.edge}, {"side", b.side}};
  }
  throw std::logic_error("base_to_json: unreachable");
}

BaseDatum base_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "good") return good_point(j.at("vertex").get<int>());
  if (kind == "marked") return marked_point(j.at("vertex").get<int>(), j.value("slope", 1L));
  if (kind == "tangential")
    return tangential_side(j.at("edge").get<int>(), j.value("side", 0));
  throw std::invalid_argument("base: unknown kind '" + kind + "'");
}

nlohmann::json report_to_json(const MonodromyReport& r) {
  nlohmann::json j;
  j["verdict"] = r.verdict;
  j["nontrivial_in_out"] = r.nontrivial_in_out;
  j["smooth"] = r.smooth;
  j["q"] = r.q;
  j["trace"] = r.trace;
  if (r.smooth) j["delta_log"] = lie::element_to_json(r.delta_log);
  if (r.loop_pairing != 0) j["loop_pairing"] = r.loop_pairing;
  j["instances"] = nlohmann::json::array();
  for (const auto& iv : r.instances) {
    nlohmann::json k;
    k["graph"] = graph_to_json(iv.line);
    k["y_vertex"] = iv.y_vertex;
    k["edges"] = iv.n_edges;
    k["non_inner"] = iv.non_inner;
    if (iv.non_inner)
      k["obstruction_degree"] = iv.inner.obstruction_degree;
    else
      k["witness_log"] = lie::element_to_json(iv.inner.witness);
    j["instances"].push_back(std::move(k));
  }
  return j;
}

}  // namespace logpi1::curve
