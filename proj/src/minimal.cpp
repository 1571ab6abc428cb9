#include "logpi1/minimal.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace logpi1::minimal {

namespace exl = exactlin;

namespace {

// ---------------------------------------------------------------------------
// Scaffold: the degree <= 2 part of /\(E_1 (+) ... (+) E_k) with the
// differential induced by the attaching maps, plus rho in degrees 1 and 2.
// Pairs (u,v), u < v, are enumerated lexicographically; a stage's attaching
// matrix uses the same order restricted to the earlier generators, which form
// a prefix, so local pair rows embed by index lookup.
// ---------------------------------------------------------------------------

struct Scaffold {
  std::vector<int> stage;                      // per generator, 1-based
  std::vector<std::pair<Index, Index>> pairs;  // u < v, lex order
  std::map<std::pair<Index, Index>, Index> pair_index;
  Mat d1;    // pairs x gens
  Mat rho1;  // A^1 x gens (when built with an algebra)
  Mat rho2;  // A^2 x pairs

  Index gens() const { return static_cast<Index>(stage.size()); }
  Index npairs() const { return static_cast<Index>(pairs.size()); }
};

Scaffold make_scaffold(const std::vector<HirschStage>& stages, size_t upto, const Cdga* a) {
  Scaffold s;
  upto = std::min(upto, stages.size());
  for (size_t q = 0; q < upto; ++q)
    for (Index i = 0; i < stages[q].dim; ++i) s.stage.push_back(static_cast<int>(q) + 1);
  const Index m = s.gens();
  for (Index u = 0; u < m; ++u)
    for (Index v = u + 1; v < m; ++v) {
      s.pair_index.emplace(std::make_pair(u, v), s.npairs());
      s.pairs.emplace_back(u, v);
    }
  s.d1 = Mat::Zero(s.npairs(), m);
  Index col = 0, prev = 0;
  for (size_t q = 0; q < upto; ++q) {
    const auto& st = stages[q];
    if (st.attach.rows() != prev * (prev - 1) / 2 || st.attach.cols() != st.dim)
      throw std::invalid_argument("minimal: stage " + std::to_string(q + 1) +
                                  " attaching matrix has wrong shape");
    for (Index j = 0; j < st.dim; ++j, ++col) {
      Index r = 0;
      for (Index u = 0; u < prev; ++u)
        for (Index v = u + 1; v < prev; ++v, ++r)
          if (st.attach(r, j) != 0) s.d1(s.pair_index.at({u, v}), col) = st.attach(r, j);
    }
    prev += st.dim;
  }
  if (a != nullptr) {
    s.rho1 = Mat::Zero(a->dim(1), m);
    Index c = 0;
    for (size_t q = 0; q < upto; ++q) {
      const auto& st = stages[q];
      if (st.rho1.rows() != a->dim(1) || st.rho1.cols() != st.dim)
        throw std::invalid_argument("minimal: stage " + std::to_string(q + 1) +
                                    " rho matrix has wrong shape");
      for (Index j = 0; j < st.dim; ++j, ++c) s.rho1.col(c) = st.rho1.col(j);
    }
    s.rho2 = Mat::Zero(a->dim(2), s.npairs());
    for (Index r = 0; r < s.npairs(); ++r)
      s.rho2.col(r) =
          a->multiply(1, s.rho1.col(s.pairs[r].first), 1, s.rho1.col(s.pairs[r].second));
  }
  return s;
}

std::vector<std::string> gen_labels(const std::vector<HirschStage>& stages, size_t upto) {
  std::vector<std::string> out;
  upto = std::min(upto, stages.size());
  for (size_t q = 0; q < upto; ++q)
    for (Index i = 0; i < stages[q].dim; ++i)
      out.push_back("e" + std::to_string(q + 1) + "_" + std::to_string(i + 1));
  return out;
}

// Exterior cube basis, u < v < w lexicographic.
struct Cube {
  std::vector<std::array<Index, 3>> triples;
  std::map<std::array<Index, 3>, Index> index;
};

Cube make_cube(Index m) {
  Cube c;
  for (Index u = 0; u < m; ++u)
    for (Index v = u + 1; v < m; ++v)
      for (Index w = v + 1; w < m; ++w) {
        c.index.emplace(std::array<Index, 3>{u, v, w}, static_cast<Index>(c.triples.size()));
        c.triples.push_back({u, v, w});
      }
  return c;
}

// e_x ^ e_a ^ e_b with a < b, as (sorted triple index, sign); index -1 when
// degenerate.
std::pair<Index, Rational> wedge_triple(const Cube& c, Index x, Index a, Index b) {
  if (x == a || x == b) return {static_cast<Index>(-1), Rational(0)};
  std::array<Index, 3> t;
  Rational sg = 1;
  if (x < a) {
    t = {x, a, b};
  } else if (x < b) {
    t = {a, x, b};
    sg = -1;
  } else {
    t = {a, b, x};
  }
  return {c.index.at(t), sg};
}

// d: /\^2 -> /\^3 as sparse columns over the cube basis.
// d(e_u ^ e_v) = (d e_u) ^ e_v - e_u ^ (d e_v); a two-form e_a ^ e_b commutes
// past a one-form, so (e_a ^ e_b) ^ e_v = e_v ^ e_a ^ e_b.
std::vector<exl::SpVec<Rational>> d2_columns(const Scaffold& s, const Cube& cube) {
  std::vector<exl::SpVec<Rational>> cols(s.pairs.size());
  for (Index p = 0; p < s.npairs(); ++p) {
    const auto [u, v] = s.pairs[p];
    std::map<Index, Rational> acc;
    for (Index r = 0; r < s.npairs(); ++r) {
      const auto [a, b] = s.pairs[r];
      if (s.d1(r, u) != 0) {
        const auto [t, sg] = wedge_triple(cube, v, a, b);
        if (t >= 0) acc[t] += s.d1(r, u) * sg;
      }
      if (s.d1(r, v) != 0) {
        const auto [t, sg] = wedge_triple(cube, u, a, b);
        if (t >= 0) acc[t] -= s.d1(r, v) * sg;
      }
    }
    for (const auto& [t, val] : acc)
      if (val != 0) cols[p].emplace_back(static_cast<std::int64_t>(t), val);
  }
  return cols;
}

Mat dense_from_sparse(const std::vector<exl::SpVec<Rational>>& cols, Index rows) {
  Mat m = Mat::Zero(rows, static_cast<Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j)
    for (const auto& [i, val] : cols[j])
      m(static_cast<Index>(i), static_cast<Index>(j)) = val;
  return m;
}

// Cochain complex of the scaffold in degrees 0..2, and 0..3 when a cube is
// supplied (needed whenever degree-2 cohomology is taken).
exl::Complex<Rational> scaffold_complex(const Scaffold& s, const std::vector<std::string>& glabels,
                                        const Cube* cube,
                                        const std::vector<exl::SpVec<Rational>>* d2cols) {
  exl::Complex<Rational> c;
  c.space.labels[0] = {"1"};
  if (!glabels.empty()) c.space.labels[1] = glabels;
  std::vector<std::string> plabels;
  for (const auto& [u, v] : s.pairs) plabels.push_back(glabels[u] + "^" + glabels[v]);
  if (!plabels.empty()) c.space.labels[2] = std::move(plabels);
  c.d[0] = Mat::Zero(s.gens(), 1);
  c.d[1] = s.d1;
  if (cube != nullptr) {
    std::vector<std::string> tlabels;
    for (const auto& t : cube->triples)
      tlabels.push_back(glabels[t[0]] + "^" + glabels[t[1]] + "^" + glabels[t[2]]);
    if (!tlabels.empty()) c.space.labels[3] = std::move(tlabels);
    c.d[2] = dense_from_sparse(*d2cols, static_cast<Index>(cube->triples.size()));
  }
  return c;
}

exl::GradedMap<Rational> rho_map(const Scaffold& s, const Cube* cube, const Cdga& a) {
  exl::GradedMap<Rational> f;
  f.f[0] = Mat::Zero(a.dim(0), 1);
  f.f[0](a.unitIndex(), 0) = 1;
  f.f[1] = s.rho1;
  f.f[2] = s.rho2;
  if (cube != nullptr) {
    Mat r3 = Mat::Zero(a.dim(3), static_cast<Index>(cube->triples.size()));
    if (a.dim(3) > 0)
      for (size_t t = 0; t < cube->triples.size(); ++t) {
        const auto& tr = cube->triples[t];
        r3.col(static_cast<Index>(t)) =
            a.multiply(2, s.rho2.col(s.pair_index.at({tr[0], tr[1]})), 1, s.rho1.col(tr[2]));
      }
    f.f[3] = std::move(r3);
  }
  return f;
}

// Kernel basis computed with the column scan reversed: spans the same space
// but picks different canonical vectors, exercising section independence.
Mat kernel_basis_alt(const Mat& m) {
  const Mat k = exl::kernel_basis<Rational>(Mat(m.rowwise().reverse()));
  return k.colwise().reverse();
}

exl::CohomologyPiece<Rational> h2_piece(const Scaffold& s,
                                        const std::vector<exl::SpVec<Rational>>& d2cols,
                                        bool alt) {
  const auto combos = exl::sparse_kernel(d2cols);
  Mat z = Mat::Zero(s.npairs(), static_cast<Index>(combos.size()));
  for (size_t j = 0; j < combos.size(); ++j)
    for (const auto& [i, val] : combos[j])
      z(static_cast<Index>(i), static_cast<Index>(j)) = val;
  if (alt) z = z.rowwise().reverse().eval();
  return exl::CohomologyPiece<Rational>(z, exl::image_basis<Rational>(s.d1));
}

// /\^2 of a degree-1 map, in the pair bases of the two scaffolds.
Mat wedge_square(const Scaffold& src, const Scaffold& dst, const Mat& phi1) {
  Mat w = Mat::Zero(dst.npairs(), src.npairs());
  for (Index p = 0; p < src.npairs(); ++p) {
    const auto [u, v] = src.pairs[p];
    for (Index i = 0; i < dst.gens(); ++i) {
      if (phi1(i, u) == 0 && phi1(i, v) == 0) continue;
      for (Index j = i + 1; j < dst.gens(); ++j) {
        const Rational c = phi1(i, u) * phi1(j, v) - phi1(j, u) * phi1(i, v);
        if (c != 0) w(dst.pair_index.at({i, j}), p) = c;
      }
    }
  }
  return w;
}

// /\^3 of a degree-1 map: 3x3 minors.
Mat wedge_cube(const Cube& src, const Cube& dst, const Mat& phi1) {
  Mat w = Mat::Zero(static_cast<Index>(dst.triples.size()), static_cast<Index>(src.triples.size()));
  for (size_t tc = 0; tc < src.triples.size(); ++tc) {
    const auto& c = src.triples[tc];
    for (size_t tr = 0; tr < dst.triples.size(); ++tr) {
      const auto& r = dst.triples[tr];
      const Rational det =
          phi1(r[0], c[0]) * (phi1(r[1], c[1]) * phi1(r[2], c[2]) - phi1(r[2], c[1]) * phi1(r[1], c[2])) -
          phi1(r[0], c[1]) * (phi1(r[1], c[0]) * phi1(r[2], c[2]) - phi1(r[2], c[0]) * phi1(r[1], c[2])) +
          phi1(r[0], c[2]) * (phi1(r[1], c[0]) * phi1(r[2], c[1]) - phi1(r[2], c[0]) * phi1(r[1], c[1]));
      if (det != 0) w(static_cast<Index>(tr), static_cast<Index>(tc)) = det;
    }
  }
  return w;
}

// Assemble the truncated exterior algebra and the morphism to A from the
// stage data. Degree-0 product tables are left to the unit fallback; the
// exterior cube is materialized only at model_cap 3.
void assemble(MinimalModel& m, const Cdga& a) {
  const Scaffold s = make_scaffold(m.stages, m.stages.size(), &a);
  const auto glabels = gen_labels(m.stages, m.stages.size());
  const Index n = s.gens(), np = s.npairs();
  const bool cubic = m.model_cap >= 3;

  Cdga md;
  md.cap = cubic ? 3 : 2;
  md.space.labels[0] = {"1"};
  if (n > 0) md.space.labels[1] = glabels;
  std::vector<std::string> plabels;
  for (const auto& [u, v] : s.pairs) plabels.push_back(glabels[u] + "^" + glabels[v]);
  if (np > 0) md.space.labels[2] = std::move(plabels);

  Cube cube;
  std::vector<exl::SpVec<Rational>> d2cols;
  if (cubic) {
    cube = make_cube(n);
    d2cols = d2_columns(s, cube);
    std::vector<std::string> tlabels;
    for (const auto& t : cube.triples)
      tlabels.push_back(glabels[t[0]] + "^" + glabels[t[1]] + "^" + glabels[t[2]]);
    if (!tlabels.empty()) md.space.labels[3] = std::move(tlabels);
  }
  const Index nt = static_cast<Index>(cube.triples.size());

  md.diff[0] = Mat::Zero(n, 1);
  if (n > 0) md.diff[1] = s.d1;
  if (cubic && np > 0) md.diff[2] = dense_from_sparse(d2cols, nt);

  md.mult[{0, 0}] = Mat::Identity(1, 1);
  if (np > 0) {
    Mat t11 = Mat::Zero(np, n * n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i < j)
          t11(s.pair_index.at({i, j}), i * n + j) = 1;
        else if (i > j)
          t11(s.pair_index.at({j, i}), i * n + j) = -1;
      }
    md.mult[{1, 1}] = std::move(t11);
  }
  if (cubic && nt > 0) {
    Mat t12 = Mat::Zero(nt, n * np);
    for (Index x = 0; x < n; ++x)
      for (Index p = 0; p < np; ++p) {
        const auto [t, sg] = wedge_triple(cube, x, s.pairs[p].first, s.pairs[p].second);
        if (t >= 0) t12(t, x * np + p) = sg;
      }
    md.mult[{1, 2}] = std::move(t12);
  }
  md.augmentation = Vec::Ones(1);
  md.unit = 0;
  m.model = std::move(md);
  m.rho.f = rho_map(s, cubic ? &cube : nullptr, a);
}

bool try_homotopy(const Cdga& a, const Cdga& a2, const Mat& f1, const MinimalModel& ma,
                  const MinimalModel& ma2, const Mat& phi1, int cap_d) {
  const auto T = cdga::tensor_with_interval(a2, cap_d);
  const Index t1 = T.algebra.dim(1), t2 = T.algebra.dim(2);
  const Index a0 = a2.dim(0), a1 = a2.dim(1);
  const Index d = cap_d;

  // Unknown h(g) in T^1 per generator, subject to: chain d h(g) = h(d g),
  // endpoints p0 h = f rho, p1 h = rho' phi, and the augmented-diagram
  // condition (id (x) aug) h = 0 on the dt part.
  Mat sys = Mat::Zero(t2 + a1 + a1 + d, t1);
  sys.topRows(t2) = T.algebra.d(1);
  sys.middleRows(t2, a1) = T.p0.at(T.algebra, a2, 1);
  sys.middleRows(t2 + a1, a1) = T.p1.at(T.algebra, a2, 1);
  for (Index k = 0; k < d; ++k)
    for (Index i = 0; i < a0; ++i)
      sys(t2 + 2 * a1 + k, (d + 1) * a1 + k * a0 + i) = a2.augmentation(i);

  const Scaffold s1 = make_scaffold(ma.stages, ma.stages.size(), &a);
  const Scaffold s2 = make_scaffold(ma2.stages, ma2.stages.size(), &a2);
  const Mat src = f1 * s1.rho1;
  const Mat tgt = s2.rho1 * phi1;

  Mat h = Mat::Zero(t1, s1.gens());
  for (Index g = 0; g < s1.gens(); ++g) {
    Vec rhs = Vec::Zero(sys.rows());
    for (Index r = 0; r < s1.npairs(); ++r) {
      if (s1.d1(r, g) == 0) continue;
      const auto [u, v] = s1.pairs[r];
      rhs.head(t2) += s1.d1(r, g) * T.algebra.multiply(1, h.col(u), 1, h.col(v));
    }
    rhs.segment(t2, a1) = src.col(g);
    rhs.segment(t2 + a1, a1) = tgt.col(g);
    const auto sol = exl::solve<Rational>(sys, rhs);
    if (!sol) return false;
    h.col(g) = *sol;
  }
  return true;
}

}  // namespace

std::vector<Index> MinimalModel::stage_dims() const {
  std::vector<Index> out;
  out.reserve(stages.size());
  for (const auto& st : stages) out.push_back(st.dim);
  return out;
}

Index MinimalModel::total_gens() const {
  Index n = 0;
  for (const auto& st : stages) n += st.dim;
  return n;
}

MinimalModel build(const Cdga& a, int stage_count, const BuildOptions& opt) {
  if (stage_count < 1) throw std::invalid_argument("build: stage count must be at least 1");
  if (opt.model_cap != 2 && opt.model_cap != 3)
    throw std::invalid_argument("build: model_cap must be 2 or 3");
  if (const auto rep = cdga::validate(a); !rep.ok)
    throw std::invalid_argument("build: invalid input algebra: " + rep.first_violation);
  const auto ca = a.complex();
  if (exl::cohomology(ca, 0).dim() != 1)
    throw std::invalid_argument("build: input is not connected (H^0 != Q)");

  MinimalModel m;
  m.model_cap = opt.model_cap;

  // Stage 1: a section of H^1(A) -> Z^1(A).
  Mat z1 = exl::kernel_basis<Rational>(ca.diff(1));
  if (opt.alt_sections) z1 = z1.rowwise().reverse().eval();
  const exl::CohomologyPiece<Rational> h1a(z1, exl::image_basis<Rational>(ca.diff(0)));
  {
    HirschStage st;
    st.dim = h1a.dim();
    st.attach = Mat::Zero(0, st.dim);
    st.rho1 = h1a.reps();
    m.stages.push_back(std::move(st));
  }
  const auto h2a = exl::cohomology(ca, 2);

  for (int q = 2; q <= stage_count; ++q) {
    const Scaffold s = make_scaffold(m.stages, m.stages.size(), &a);
    const auto glabels = gen_labels(m.stages, m.stages.size());
    const Cube cube = make_cube(s.gens());
    const auto d2cols = d2_columns(s, cube);
    const auto cm = scaffold_complex(s, glabels, &cube, &d2cols);
    const auto rho = rho_map(s, &cube, a);

    // Using Ker(H^2(M(q-1)) -> H^2(A)) in place of the relative group needs
    // H^1(M(q-1)) -> H^1(A) to be an isomorphism; the construction maintains
    // it, so demand it.
    const auto h1m = exl::cohomology(cm, 1);
    if (h1m.dim() != h1a.dim() ||
        exl::rank<Rational>(exl::induced_map(rho, cm, ca, h1m, h1a, 1)) != h1a.dim())
      throw std::logic_error("build: H^1 comparison degenerated at stage " + std::to_string(q));

    const auto h2m = h2_piece(s, d2cols, opt.alt_sections);
    const Mat ind2 = exl::induced_map(rho, cm, ca, h2m, h2a, 2);
    const Mat ker = opt.alt_sections ? kernel_basis_alt(ind2) : exl::kernel_basis<Rational>(ind2);

    HirschStage st;
    st.dim = ker.cols();
    st.attach = h2m.reps() * ker;
    st.rho1 = Mat::Zero(a.dim(1), st.dim);
    for (Index j = 0; j < st.dim; ++j) {
      const auto sol = exl::solve<Rational>(ca.diff(1), Vec(s.rho2 * st.attach.col(j)));
      if (!sol)
        throw std::logic_error("build: attaching cocycle not exact in A at stage " +
                               std::to_string(q));
      st.rho1.col(j) = *sol;
    }
    m.stages.push_back(std::move(st));
  }
  assemble(m, a);
  return m;
}

lie::NilpotentLie dual_lie(const MinimalModel& m) {
  const int cls = std::max<int>(1, static_cast<int>(m.stages.size()));
  const Scaffold s = make_scaffold(m.stages, m.stages.size(), nullptr);
  const Index n = s.gens();
  const Index n1 = m.stages.empty() ? 0 : m.stages.front().dim;
  if (n1 > 26) throw std::invalid_argument("dual_lie: more than 26 degree-1 generators");

  std::vector<std::string> xlabels;
  for (Index i = 1; i <= n1; ++i) xlabels.push_back("x" + std::to_string(i));
  const lie::NilpotentLie fr = lie::free_nilpotent(xlabels, cls);

  // Bracket dual to -d on the dual basis {x_w} of the generators:
  // <[x, y], e_w> = -(x (x) y - y (x) x)(d e_w).
  std::vector<std::vector<std::pair<Index, Rational>>> row_nz(s.npairs());
  for (Index r = 0; r < s.npairs(); ++r)
    for (Index w = 0; w < n; ++w)
      if (s.d1(r, w) != 0) row_nz[r].emplace_back(w, s.d1(r, w));
  const auto bracket_vec = [&](const Vec& x, const Vec& y) {
    Vec out = Vec::Zero(n);
    for (Index r = 0; r < s.npairs(); ++r) {
      const auto [u, v] = s.pairs[r];
      const Rational c = x(u) * y(v) - x(v) * y(u);
      if (c == 0) continue;
      for (const auto& [w, coef] : row_nz[r]) out(w) -= c * coef;
    }
    return out;
  };

  // When every attaching coefficient is stage-homogeneous the dual is graded
  // with gr_q read off stage by stage; otherwise take the honest lower
  // central series.
  bool homogeneous = true;
  for (Index r = 0; r < s.npairs() && homogeneous; ++r) {
    const auto [u, v] = s.pairs[r];
    for (const auto& [w, coef] : row_nz[r])
      if (s.stage[u] + s.stage[v] != s.stage[w]) {
        homogeneous = false;
        break;
      }
  }

  std::vector<Index> grdim(cls + 1, 0);
  std::vector<Mat> grrep(cls + 1);
  std::vector<Mat> fil(cls + 2);  // slow path: fil[k] spans Fil^k
  std::function<Vec(int, const Vec&)> to_gr;

  if (homogeneous) {
    std::vector<Index> offset(cls + 2, 0);
    for (int k = 1; k <= cls; ++k) {
      grdim[k] = k <= static_cast<int>(m.stages.size()) ? m.stages[k - 1].dim : 0;
      offset[k + 1] = offset[k] + grdim[k];
    }
    for (int k = 1; k <= cls; ++k) {
      grrep[k] = Mat::Zero(n, grdim[k]);
      for (Index j = 0; j < grdim[k]; ++j) grrep[k](offset[k] + j, j) = 1;
    }
    to_gr = [n, offset, &grdim](int k, const Vec& v) {
      for (Index i = 0; i < n; ++i)
        if (v(i) != 0 && (i < offset[k] || i >= offset[k] + grdim[k]))
          throw std::logic_error("dual_lie: graded bracket left its stage");
      return Vec(v.segment(offset[k], grdim[k]));
    };
  } else {
    fil[1] = Mat::Identity(n, n);
    for (int k = 2; k <= cls + 1; ++k) {
      exl::ColumnReducer<Rational> red;
      std::vector<Vec> keep;
      for (Index g = 0; g < n; ++g)
        for (Index j = 0; j < fil[k - 1].cols(); ++j) {
          Vec v = bracket_vec(Vec(Vec::Unit(n, g)), Vec(fil[k - 1].col(j)));
          if (red.add(v)) keep.push_back(std::move(v));
        }
      fil[k] = Mat::Zero(n, static_cast<Index>(keep.size()));
      for (size_t j = 0; j < keep.size(); ++j) fil[k].col(static_cast<Index>(j)) = keep[j];
    }
    if (fil[cls + 1].cols() != 0)
      throw std::logic_error("dual_lie: dual algebra exceeds nilpotence class");
    for (int k = 1; k <= cls; ++k) {
      exl::ColumnReducer<Rational> red;
      for (Index j = 0; j < fil[k + 1].cols(); ++j) red.add(Vec(fil[k + 1].col(j)));
      std::vector<Index> pick;
      for (Index j = 0; j < fil[k].cols(); ++j)
        if (red.add(Vec(fil[k].col(j)))) pick.push_back(j);
      grdim[k] = static_cast<Index>(pick.size());
      grrep[k] = Mat::Zero(n, grdim[k]);
      for (size_t i = 0; i < pick.size(); ++i)
        grrep[k].col(static_cast<Index>(i)) = fil[k].col(pick[i]);
    }
    to_gr = [n, &grdim, &grrep, &fil](int k, const Vec& v) {
      const Index extra = fil[k + 1].cols();
      Mat sys = Mat::Zero(n, grdim[k] + extra);
      sys.leftCols(grdim[k]) = grrep[k];
      if (extra > 0) sys.rightCols(extra) = fil[k + 1];
      const auto sol = exl::solve<Rational>(sys, v);
      if (!sol) throw std::logic_error("dual_lie: vector escapes its filtration step");
      return Vec(sol->head(grdim[k]));
    };
  }
  if (grdim[1] != n1)
    throw std::logic_error("dual_lie: dual algebra is not generated in degree 1");

  const auto br_gr = [&](int p, const Vec& xp, int q, const Vec& xq) {
    return to_gr(p + q, bracket_vec(Vec(grrep[p] * xp), Vec(grrep[q] * xq)));
  };
  std::map<lie::Word, Vec> memo;
  const std::function<Vec(const lie::Word&)> ev = [&](const lie::Word& w) -> Vec {
    if (const auto it = memo.find(w); it != memo.end()) return it->second;
    Vec val;
    if (w.size() == 1) {
      val = Vec::Unit(grdim[1], static_cast<Index>(w[0] - 'a'));
    } else {
      const auto [l, r] = lie::standard_factorization(w);
      val = br_gr(static_cast<int>(l.size()), ev(l), static_cast<int>(r.size()), ev(r));
    }
    memo.emplace(w, val);
    return val;
  };

  // Present: relators = kernels of the evaluation free_k -> gr_k.
  std::vector<lie::LieElement> relators;
  for (int deg = 2; deg <= cls; ++deg) {
    const auto& ws = fr.words(deg);
    Mat evm = Mat::Zero(grdim[deg], static_cast<Index>(ws.size()));
    for (size_t j = 0; j < ws.size(); ++j) evm.col(static_cast<Index>(j)) = ev(ws[j]);
    if (exl::rank<Rational>(evm) != grdim[deg])
      throw std::logic_error("dual_lie: dual algebra is not generated in degree 1");
    const Mat ker = exl::kernel_basis<Rational>(evm);
    for (Index j = 0; j < ker.cols(); ++j) {
      lie::LieElement rel;
      rel.comp[deg] = ker.col(j);
      relators.push_back(std::move(rel));
    }
  }
  auto out = lie::quotient(fr, relators);
  for (int deg = 1; deg <= cls; ++deg)
    if (out.dim(deg) != grdim[deg])
      throw std::logic_error("dual_lie: presentation misses the graded dimensions");
  return out;
}

MinimalityReport check_minimality(const MinimalModel& m, const Cdga& a) {
  MinimalityReport rep;
  const auto fail = [&rep](int stage, const std::string& msg) {
    if (rep.ok) {
      rep.ok = false;
      rep.first_failing_stage = stage;
      rep.message = msg;
    }
  };
  const auto ca = a.complex();
  const auto h0a = exl::cohomology(ca, 0);
  const auto h1a = exl::cohomology(ca, 1);
  const int nstages = static_cast<int>(m.stages.size());

  // The HirschStage invariants: d(tau e) = 0 and rho(tau e) = d rho(e).
  for (int q = 2; q <= nstages && rep.ok; ++q) {
    const Scaffold s = make_scaffold(m.stages, static_cast<size_t>(q) - 1, &a);
    const Cube cube = make_cube(s.gens());
    const Mat d2 = dense_from_sparse(d2_columns(s, cube), static_cast<Index>(cube.triples.size()));
    const auto& st = m.stages[q - 1];
    if (!Mat(d2 * st.attach).isZero(Rational(0)))
      fail(q, "attaching map is not valued in cocycles at stage " + std::to_string(q));
    else if (!Mat(s.rho2 * st.attach - ca.diff(1) * st.rho1).isZero(Rational(0)))
      fail(q, "rho(tau e) != d rho(e) at stage " + std::to_string(q));
  }

  std::vector<Scaffold> scs(nstages + 1);
  std::vector<Cube> cubes(nstages + 1);
  std::vector<exl::Complex<Rational>> cxs(nstages + 1);
  std::vector<exl::GradedMap<Rational>> rhos(nstages + 1);
  for (int k = 0; k <= nstages && rep.ok; ++k) {
    scs[k] = make_scaffold(m.stages, static_cast<size_t>(k), &a);
    cubes[k] = make_cube(scs[k].gens());
    const auto cols = d2_columns(scs[k], cubes[k]);
    cxs[k] = scaffold_complex(scs[k], gen_labels(m.stages, static_cast<size_t>(k)), &cubes[k], &cols);
    rhos[k] = rho_map(scs[k], &cubes[k], a);
  }

  // H^0 and H^1 of each truncation map isomorphically to A's.
  for (int k = 1; k <= nstages && rep.ok; ++k) {
    const auto h0m = exl::cohomology(cxs[k], 0);
    if (h0m.dim() != h0a.dim() ||
        exl::rank<Rational>(exl::induced_map(rhos[k], cxs[k], ca, h0m, h0a, 0)) != h0a.dim()) {
      fail(k, "H^0 comparison fails at stage " + std::to_string(k));
      break;
    }
    const auto h1m = exl::cohomology(cxs[k], 1);
    if (h1m.dim() != h1a.dim() ||
        exl::rank<Rational>(exl::induced_map(rhos[k], cxs[k], ca, h1m, h1a, 1)) != h1a.dim()) {
      fail(k, "H^1 comparison fails at stage " + std::to_string(k));
      break;
    }
  }

  // Relative H^2 dies stage to stage: H^2(cone rho_{k-1}) -> H^2(cone rho_k)
  // is zero, with the cones computed directly.
  for (int k = 1; k <= nstages && rep.ok; ++k) {
    const auto cprev = exl::cone(cxs[k - 1], ca, rhos[k - 1]);
    const auto ccur = exl::cone(cxs[k], ca, rhos[k]);
    exl::GradedMap<Rational> incl;
    for (int nn = 0; nn <= 3; ++nn) {
      const Index mp = cxs[k - 1].space.dim(nn), mc = cxs[k].space.dim(nn);
      const Index an = nn >= 1 ? ca.space.dim(nn - 1) : 0;
      Mat f = Mat::Zero(mc + an, mp + an);
      if (nn == 0) {
        f(0, 0) = 1;
      } else if (nn == 1) {
        for (Index i = 0; i < mp; ++i) f(i, i) = 1;
      } else if (nn == 2) {
        for (Index p = 0; p < mp; ++p) f(scs[k].pair_index.at(scs[k - 1].pairs[p]), p) = 1;
      } else {
        for (Index t = 0; t < mp; ++t) f(cubes[k].index.at(cubes[k - 1].triples[t]), t) = 1;
      }
      for (Index i = 0; i < an; ++i) f(mc + i, mp + i) = 1;
      incl.f[nn] = std::move(f);
    }
    const auto h2p = exl::cohomology(cprev, 2);
    const auto h2c = exl::cohomology(ccur, 2);
    if (!exl::induced_map(incl, cprev, ccur, h2p, h2c, 2).isZero(Rational(0)))
      fail(k, "relative H^2 does not vanish from stage " + std::to_string(k - 1) + " to " +
                  std::to_string(k));
  }
  return rep;
}

Mat induced_comparison(const Cdga& a, const Cdga& a2, const CdgaMorphism& f,
                       const MinimalModel& ma, const MinimalModel& ma2) {
  if (const auto r = cdga::validate_morphism(a, a2, f); !r.ok)
    throw std::invalid_argument("induced_comparison: f is not a cdga morphism: " +
                                r.first_violation);
  const auto ca = a.complex(), ca2 = a2.complex();
  for (int nn = 0; nn <= 2; ++nn) {
    const auto ha = exl::cohomology(ca, nn), hb = exl::cohomology(ca2, nn);
    if (ha.dim() != hb.dim() ||
        exl::rank<Rational>(exl::induced_map(f.f, ca, ca2, ha, hb, nn)) != ha.dim())
      throw std::invalid_argument("induced_comparison: f is not a quasi-isomorphism in degree " +
                                  std::to_string(nn));
  }
  if (ma.stages.size() != ma2.stages.size())
    throw std::invalid_argument("induced_comparison: models have different stage counts");
  for (size_t q = 0; q < ma.stages.size(); ++q)
    if (ma.stages[q].dim != ma2.stages[q].dim)
      throw std::logic_error("induced_comparison: stage dimensions disagree");

  Mat phi = Mat::Zero(ma2.total_gens(), ma.total_gens());
  if (ma.stages.empty()) return phi;
  const Index n1 = ma.stages.front().dim;

  // Stage 1: [rho'(g')] is a basis of H^1(A'); express [f rho(g)] in it.
  {
    const auto h1a2 = exl::cohomology(ca2, 1);
    const Mat f1 = f.at(a, a2, 1);
    Mat basis = Mat::Zero(h1a2.dim(), n1);
    for (Index j = 0; j < n1; ++j)
      basis.col(j) = h1a2.project(Vec(ma2.stages.front().rho1.col(j)));
    for (Index g = 0; g < n1; ++g) {
      const auto y =
          exl::solve<Rational>(basis, h1a2.project(Vec(f1 * ma.stages.front().rho1.col(g))));
      if (!y) throw std::logic_error("induced_comparison: stage-1 class matching failed");
      phi.block(0, g, n1, 1) = *y;
    }
  }

  // Stage q: phi(g) = z + y with tau'-combination y matching the class of
  // /\^2(phi)(tau g) in Ker(H^2(M'(q-1)) -> H^2(A')) and z in the previous
  // stages strictifying the remainder.
  Index off = n1;
  for (size_t q = 2; q <= ma.stages.size(); ++q) {
    const Scaffold s1 = make_scaffold(ma.stages, q - 1, nullptr);
    const Scaffold s2 = make_scaffold(ma2.stages, q - 1, nullptr);
    const Cube cube2 = make_cube(s2.gens());
    const auto h2m2 = h2_piece(s2, d2_columns(s2, cube2), false);
    const Mat& tau1 = ma.stages[q - 1].attach;
    const Mat& tau2 = ma2.stages[q - 1].attach;
    const Index eq = ma.stages[q - 1].dim;
    Mat tau_classes = Mat::Zero(h2m2.dim(), eq);
    for (Index j = 0; j < eq; ++j) tau_classes.col(j) = h2m2.project(Vec(tau2.col(j)));
    const Index pg = s1.gens();
    const Mat w2 = wedge_square(s1, s2, Mat(phi.topLeftCorner(pg, pg)));
    for (Index g = 0; g < eq; ++g) {
      const Vec w = w2 * tau1.col(g);
      const auto y = exl::solve<Rational>(tau_classes, h2m2.project(w));
      if (!y)
        throw std::logic_error("induced_comparison: class matching failed at stage " +
                               std::to_string(q));
      const auto z = exl::solve<Rational>(s2.d1, Vec(w - tau2 * *y));
      if (!z)
        throw std::logic_error("induced_comparison: strictification failed at stage " +
                               std::to_string(q));
      phi.block(0, off + g, pg, 1) = *z;
      phi.block(pg, off + g, eq, 1) = *y;
    }
    off += eq;
  }
  return phi;
}

bool homotopy_lift_check(const Cdga& a, const Cdga& a2, const CdgaMorphism& f,
                         const MinimalModel& ma, const MinimalModel& ma2, const Mat& phi1) {
  if (const auto r = cdga::validate_morphism(a, a2, f); !r.ok)
    throw std::invalid_argument("homotopy_lift_check: f is not a cdga morphism: " +
                                r.first_violation);
  if (phi1.rows() != ma2.total_gens() || phi1.cols() != ma.total_gens())
    throw std::invalid_argument("homotopy_lift_check: candidate has wrong shape");

  // Extend the candidate multiplicatively and insist it is a morphism of the
  // assembled models before hunting for a homotopy.
  const Scaffold s1 = make_scaffold(ma.stages, ma.stages.size(), nullptr);
  const Scaffold s2 = make_scaffold(ma2.stages, ma2.stages.size(), nullptr);
  cdga::CdgaMorphism cand;
  cand.f.f[0] = Mat::Identity(1, 1);
  cand.f.f[1] = phi1;
  cand.f.f[2] = wedge_square(s1, s2, phi1);
  if (ma.model.cap >= 3 && ma2.model.cap >= 3)
    cand.f.f[3] = wedge_cube(make_cube(s1.gens()), make_cube(s2.gens()), phi1);
  if (const auto r = cdga::validate_morphism(ma.model, ma2.model, cand); !r.ok)
    throw std::invalid_argument("homotopy_lift_check: candidate is not a morphism: " +
                                r.first_violation);

  const Mat f1 = f.at(a, a2, 1);
  const int cap_d = static_cast<int>(ma.stages.size()) + 1;
  if (try_homotopy(a, a2, f1, ma, ma2, phi1, cap_d)) return true;
  return try_homotopy(a, a2, f1, ma, ma2, phi1, 2 * cap_d);
}

nlohmann::json to_json(const MinimalModel& m) {
  nlohmann::json j = cdga::to_json(m.model);
  j["model_cap"] = m.model_cap;
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : m.stages)
    st.push_back({{"dim", s.dim},
                  {"attach", cdga::matrix_to_json(s.attach)},
                  {"rho1", cdga::matrix_to_json(s.rho1)}});
  j["stages"] = std::move(st);
  return j;
}

MinimalModel minimal_from_json(const nlohmann::json& j, const Cdga& a) {
  MinimalModel m;
  m.model_cap = j.at("model_cap").get<int>();
  if (m.model_cap != 2 && m.model_cap != 3)
    throw std::invalid_argument("minimal_from_json: model_cap must be 2 or 3");
  Index prev = 0;
  for (const auto& sj : j.at("stages")) {
    HirschStage st;
    st.dim = sj.at("dim").get<Index>();
    if (st.dim < 0) throw std::invalid_argument("minimal_from_json: negative stage dimension");
    st.attach = cdga::matrix_from_json(sj.at("attach"), prev * (prev - 1) / 2, st.dim);
    st.rho1 = cdga::matrix_from_json(sj.at("rho1"), a.dim(1), st.dim);
    prev += st.dim;
    m.stages.push_back(std::move(st));
  }
  if (m.stages.empty()) throw std::invalid_argument("minimal_from_json: no stages");
  assemble(m, a);
  const Cdga stored = cdga::cdga_from_json(j);
  for (int nn = 0; nn <= m.model.cap; ++nn)
    if (stored.dim(nn) != m.model.dim(nn))
      throw std::invalid_argument("minimal_from_json: stored model disagrees with stage data");
  return m;
}

}  // namespace logpi1::minimal
