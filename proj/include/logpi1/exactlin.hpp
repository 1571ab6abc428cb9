#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logpi1::exactlin {

template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Deterministic reduced row echelon form. Pivot rule: columns scanned left to
// right, pivot is the first not-yet-used row (in basis order) with a nonzero
// entry. No magnitude pivoting: the scalar is exact.
// ---------------------------------------------------------------------------

template <class S>
struct Echelon {
  MatT<S> r;                      // reduced row echelon form of the input
  MatT<S> ops;                    // row operations: r = ops * input
  std::vector<Index> pivot_cols;  // pivot of row i sits in column pivot_cols[i]
  Index rank = 0;
};

template <class S>
Echelon<S> rref(const MatT<S>& m) {
  Echelon<S> e;
  e.r = m;
  e.ops = MatT<S>::Identity(m.rows(), m.rows());
  Index row = 0;
  for (Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Index piv = -1;
    for (Index i = row; i < m.rows(); ++i)
      if (e.r(i, col) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != row) {
      e.r.row(piv).swap(e.r.row(row));
      e.ops.row(piv).swap(e.ops.row(row));
    }
    const S inv = S(1) / e.r(row, col);
    e.r.row(row) *= inv;
    e.ops.row(row) *= inv;
    for (Index i = 0; i < m.rows(); ++i) {
      if (i == row || e.r(i, col) == 0) continue;
      const S f = e.r(i, col);
      e.r.row(i) -= f * e.r.row(row);
      e.ops.row(i) -= f * e.ops.row(row);
    }
    e.pivot_cols.push_back(col);
    ++row;
  }
  e.rank = row;
  return e;
}

template <class S>
Index rank(const MatT<S>& m) {
  return rref(m).rank;
}

// Kernel basis in echelon-canonical form: one column per free column f, with
// entry 1 at f and -r(i, f) at each pivot column.
template <class S>
MatT<S> kernel_basis(const MatT<S>& m) {
  const Echelon<S> e = rref(m);
  std::vector<char> is_pivot(m.cols(), 0);
  for (Index c : e.pivot_cols) is_pivot[c] = 1;
  MatT<S> k = MatT<S>::Zero(m.cols(), m.cols() - e.rank);
  Index out = 0;
  for (Index f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    k(f, out) = 1;
    for (Index i = 0; i < e.rank; ++i) k(e.pivot_cols[i], out) = -e.r(i, f);
    ++out;
  }
  return k;
}

// Columns of m (original coordinates, in basis order) spanning the image.
template <class S>
MatT<S> image_basis(const MatT<S>& m) {
  const Echelon<S> e = rref(m);
  MatT<S> b(m.rows(), e.rank);
  for (Index i = 0; i < e.rank; ++i) b.col(i) = m.col(e.pivot_cols[i]);
  return b;
}

// Particular solution of m x = y with all free variables set to zero.
template <class S>
std::optional<VecT<S>> solve(const MatT<S>& m, const VecT<S>& y) {
  const Echelon<S> e = rref(m);
  VecT<S> z = e.ops * y;
  for (Index i = e.rank; i < m.rows(); ++i)
    if (z(i) != 0) return std::nullopt;
  VecT<S> x = VecT<S>::Zero(m.cols());
  for (Index i = 0; i < e.rank; ++i) x(e.pivot_cols[i]) = z(i);
  return x;
}

// Section of a surjection: s with m * s = id, built from the row echelon form
// by taking pivot-column preimages in basis order. Throws if m is not onto.
template <class S>
MatT<S> choose_section(const MatT<S>& m) {
  const Echelon<S> e = rref(m);
  if (e.rank != m.rows()) throw std::invalid_argument("choose_section: map is not surjective");
  MatT<S> s = MatT<S>::Zero(m.cols(), m.rows());
  for (Index i = 0; i < e.rank; ++i) s.row(e.pivot_cols[i]) = e.ops.row(i);
  return s;
}

// ---------------------------------------------------------------------------
// Incremental column reducer: used for quotient-space representatives, ideal
// spans, and anywhere a deterministic "reduce against what came before" pass
// is needed. Pivot of a column is its first nonzero coordinate.
// ---------------------------------------------------------------------------

template <class S>
class ColumnReducer {
 public:
  // Reduces v against the accepted columns; returns the residual.
  VecT<S> residual(VecT<S> v) const {
    for (const auto& [piv, col] : cols_)
      if (v(piv) != 0) v -= v(piv) * col;
    return v;
  }

  // Reduces v and, if independent, accepts it (normalized). Returns true if
  // the column increased the span.
  bool add(const VecT<S>& v) {
    VecT<S> r = residual(v);
    Index piv = first_nonzero(r);
    if (piv < 0) return false;
    r /= r(piv);
    cols_.emplace_back(piv, std::move(r));
    return true;
  }

  Index rank() const { return static_cast<Index>(cols_.size()); }

  static Index first_nonzero(const VecT<S>& v) {
    for (Index i = 0; i < v.size(); ++i)
      if (v(i) != 0) return i;
    return -1;
  }

 private:
  std::vector<std::pair<Index, VecT<S>>> cols_;
};

// ---------------------------------------------------------------------------
// Graded spaces and cochain complexes (differential of degree +1).
// ---------------------------------------------------------------------------

struct GradedSpace {
  std::map<int, std::vector<std::string>> labels;

  Index dim(int n) const {
    auto it = labels.find(n);
    return it == labels.end() ? 0 : static_cast<Index>(it->second.size());
  }
  std::vector<int> degrees() const {
    std::vector<int> d;
    for (const auto& [n, v] : labels)
      if (!v.empty()) d.push_back(n);
    return d;
  }
};

template <class S>
struct Complex {
  GradedSpace space;
  std::map<int, MatT<S>> d;  // d[n]: space.dim(n+1) x space.dim(n)

  MatT<S> diff(int n) const {
    auto it = d.find(n);
    if (it != d.end()) return it->second;
    return MatT<S>::Zero(space.dim(n + 1), space.dim(n));
  }
};

template <class S>
void check_complex(const Complex<S>& c) {
  for (const auto& [n, dn] : c.d) {
    if (dn.rows() != c.space.dim(n + 1) || dn.cols() != c.space.dim(n))
      throw std::invalid_argument("complex: differential shape mismatch at degree " + std::to_string(n));
    const MatT<S> sq = c.diff(n + 1) * dn;
    if (!sq.isZero(S(0))) throw std::invalid_argument("complex: d*d != 0 at degree " + std::to_string(n));
  }
}

// Degree-preserving map of complexes.
template <class S>
struct GradedMap {
  std::map<int, MatT<S>> f;  // f[n]: dim_target(n) x dim_source(n)

  MatT<S> at(int n, Index rows, Index cols) const {
    auto it = f.find(n);
    if (it != f.end()) return it->second;
    return MatT<S>::Zero(rows, cols);
  }
};

// ---------------------------------------------------------------------------
// Cohomology with deterministically chosen representatives and a projection
// routine (cocycle coordinates -> class coordinates).
// ---------------------------------------------------------------------------

template <class S>
class CohomologyPiece {
 public:
  CohomologyPiece() = default;

  // z: columns span the cocycles; b: columns span the coboundaries.
  CohomologyPiece(const MatT<S>& z, const MatT<S>& b) : cocycles_(z) {
    for (Index j = 0; j < b.cols(); ++j) add_col(b.col(j), /*is_rep=*/false);
    for (Index j = 0; j < z.cols(); ++j)
      if (add_col(z.col(j), /*is_rep=*/true)) reps_cols_.push_back(j);
  }

  Index dim() const { return static_cast<Index>(reps_cols_.size()); }

  // Chosen representatives, as columns in ambient coordinates.
  MatT<S> reps() const {
    MatT<S> r(cocycles_.rows(), dim());
    for (Index i = 0; i < dim(); ++i) r.col(i) = cocycles_.col(reps_cols_[i]);
    return r;
  }

  // Class coordinates of a cocycle. Throws if v is not in Z + B's span.
  VecT<S> project(VecT<S> v) const {
    VecT<S> coords = VecT<S>::Zero(dim());
    for (const auto& e : elim_) {
      const S c = v(e.piv);
      if (c == 0) continue;
      v -= c * e.col;
      if (e.rep_index >= 0) coords(e.rep_index) += c;
    }
    if (!v.isZero(S(0))) throw std::invalid_argument("project: vector is not a cocycle of this piece");
    return coords;
  }

 private:
  struct Elim {
    Index piv;
    VecT<S> col;
    Index rep_index;  // -1 for coboundary columns
  };

  bool add_col(VecT<S> v, bool is_rep) {
    for (const auto& e : elim_)
      if (v(e.piv) != 0) v -= v(e.piv) * e.col;
    Index piv = ColumnReducer<S>::first_nonzero(v);
    if (piv < 0) return false;
    v /= v(piv);
    elim_.push_back({piv, std::move(v), is_rep ? static_cast<Index>(reps_cols_.size()) : -1});
    return true;
  }

  MatT<S> cocycles_;
  std::vector<Index> reps_cols_;
  std::vector<Elim> elim_;
};

template <class S>
CohomologyPiece<S> cohomology(const Complex<S>& c, int n) {
  const MatT<S> z = kernel_basis<S>(c.diff(n));
  const MatT<S> dprev = c.diff(n - 1);
  // Coboundaries in kernel coordinates are just their ambient coordinates,
  // since B subset Z; keep everything ambient.
  MatT<S> zc(c.space.dim(n), z.cols());
  zc = z;
  return CohomologyPiece<S>(zc, image_basis<S>(dprev));
}

// Matrix of the map induced on cohomology by a chain map f: A -> B.
template <class S>
MatT<S> induced_map(const GradedMap<S>& f, const Complex<S>& a, const Complex<S>& b,
                    const CohomologyPiece<S>& ha, const CohomologyPiece<S>& hb, int n) {
  const MatT<S> fn = f.at(n, b.space.dim(n), a.space.dim(n));
  const MatT<S> reps = ha.reps();
  MatT<S> out(hb.dim(), ha.dim());
  for (Index j = 0; j < ha.dim(); ++j) out.col(j) = hb.project(fn * reps.col(j));
  return out;
}

// ---------------------------------------------------------------------------
// Mapping cone of a chain map phi: A -> B. cone^n = A^n (+) B^{n-1},
// d(a, b) = (d_A a, phi(a) - d_B b).
// ---------------------------------------------------------------------------

template <class S>
Complex<S> cone(const Complex<S>& a, const Complex<S>& b, const GradedMap<S>& phi) {
  Complex<S> c;
  std::map<int, Index> adim, bdim;
  for (const auto& [n, v] : a.space.labels) adim[n] = static_cast<Index>(v.size());
  for (const auto& [n, v] : b.space.labels) bdim[n + 1] = static_cast<Index>(v.size());
  std::map<int, std::pair<Index, Index>> dims;  // n -> (dim A^n, dim B^{n-1})
  for (const auto& [n, d] : adim) dims[n].first = d;
  for (const auto& [n, d] : bdim) dims[n].second = d;
  for (const auto& [n, pr] : dims) {
    std::vector<std::string> lab;
    const auto ita = a.space.labels.find(n);
    if (ita != a.space.labels.end())
      for (const auto& s : ita->second) lab.push_back("a:" + s);
    const auto itb = b.space.labels.find(n - 1);
    if (itb != b.space.labels.end())
      for (const auto& s : itb->second) lab.push_back("b:" + s);
    c.space.labels[n] = std::move(lab);
  }
  for (const auto& [n, pr] : dims) {
    const Index an = pr.first, bn = pr.second;  // A^n, B^{n-1}
    const Index an1 = a.space.dim(n + 1), bn1 = b.space.dim(n);
    MatT<S> d = MatT<S>::Zero(an1 + bn1, an + bn);
    d.topLeftCorner(an1, an) = a.diff(n);
    d.bottomLeftCorner(bn1, an) = phi.at(n, b.space.dim(n), a.space.dim(n));
    d.bottomRightCorner(bn1, bn) = -b.diff(n - 1);
    c.d[n] = std::move(d);
  }
  return c;
}

// Cohomology of the cone at degree n, together with the identification with
// Ker(H^n(A) -> H^n(B)) when it applies (H^{n-1}(A) -> H^{n-1}(B) onto).
template <class S>
struct ConeCohomology {
  CohomologyPiece<S> cone_h;
  bool identified = false;         // true when the hypothesis holds
  MatT<S> kernel_classes;          // columns: coordinates in H^n(A) of a basis
                                   // of Ker(H^n(A) -> H^n(B))
};

template <class S>
ConeCohomology<S> cone_cohomology(const Complex<S>& a, const Complex<S>& b,
                                  const GradedMap<S>& phi, int n) {
  ConeCohomology<S> out;
  const Complex<S> c = cone(a, b, phi);
  out.cone_h = cohomology(c, n);
  const auto ha = cohomology(a, n), hb = cohomology(b, n);
  const auto ha1 = cohomology(a, n - 1), hb1 = cohomology(b, n - 1);
  const MatT<S> prev = induced_map(phi, a, b, ha1, hb1, n - 1);
  if (rank<S>(prev) == hb1.dim()) {
    out.identified = true;
    out.kernel_classes = kernel_basis<S>(induced_map(phi, a, b, ha, hb, n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse columns (large graded pieces: bar words, exterior cubes).
// ---------------------------------------------------------------------------

template <class S>
using SpVec = std::vector<std::pair<int64_t, S>>;  // sorted by index, no zeros

template <class S>
void sp_add(SpVec<S>& a, const SpVec<S>& b, const S& coeff) {
  if (coeff == 0 || b.empty()) return;
  SpVec<S> out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, coeff * b[j].second);
      ++j;
    } else {
      S v = a[i].second + coeff * b[j].second;
      if (v != 0) out.emplace_back(a[i].first, std::move(v));
      ++i, ++j;
    }
  }
  a = std::move(out);
}

template <class S>
void sp_scale(SpVec<S>& a, const S& c) {
  if (c == 0) { a.clear(); return; }
  for (auto& e : a) e.second *= c;
}

// Kernel of a sparse-column matrix; deterministic (columns in order, pivot =
// smallest row index of the residual). Returns kernel vectors as sparse
// combinations of the original columns.
template <class S>
std::vector<SpVec<S>> sparse_kernel(const std::vector<SpVec<S>>& cols) {
  struct PivCol { SpVec<S> col; SpVec<S> combo; };
  std::map<int64_t, PivCol> pivots;  // pivot row -> eliminated column
  std::vector<SpVec<S>> kernel;
  for (size_t j = 0; j < cols.size(); ++j) {
    SpVec<S> col = cols[j];
    SpVec<S> combo{{static_cast<int64_t>(j), S(1)}};
    while (!col.empty()) {
      auto it = pivots.find(col.front().first);
      if (it == pivots.end()) break;
      const S f = -col.front().second;
      sp_add(col, it->second.col, f);
      sp_add(combo, it->second.combo, f);
    }
    if (col.empty()) {
      kernel.push_back(std::move(combo));
    } else {
      const S inv = S(1) / col.front().second;
      sp_scale(col, inv);
      sp_scale(combo, inv);
      const int64_t piv = col.front().first;
      pivots.emplace(piv, PivCol{std::move(col), std::move(combo)});
    }
  }
  return kernel;
}

}  // namespace logpi1::exactlin
