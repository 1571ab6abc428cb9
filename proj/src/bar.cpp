#include "logpi1/bar.hpp"

#include "logpi1/exactlin.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace logpi1::bar {

namespace exl = exactlin;
using exl::SpVec;

namespace {

// Compositions of t into s letter degrees, each in [1, cap] with a nonempty
// basis, lexicographic.
void compositions_rec(const Cdga& m, int t, int s, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (s == 0) {
    if (t == 0) out.push_back(cur);
    return;
  }
  for (int d = 1; d <= m.cap && d <= t - (s - 1); ++d) {
    if (m.dim(d) == 0) continue;
    cur.push_back(d);
    compositions_rec(m, t - d, s - 1, cur, out);
    cur.pop_back();
  }
}

SpVec<Rational> to_spvec(const std::map<int64_t, Rational>& acc) {
  SpVec<Rational> out;
  out.reserve(acc.size());
  for (const auto& [i, c] : acc)
    if (c != 0) out.emplace_back(i, c);
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Left inverse of a matrix with independent columns.
Mat left_inverse(const Mat& basis) {
  return Mat(exl::choose_section(Mat(basis.transpose())).transpose());
}

std::vector<Index> digits(Index w, Index base, int len) {
  std::vector<Index> dg(len);
  for (int i = len - 1; i >= 0; --i) {
    dg[i] = w % base;
    w /= base;
  }
  return dg;
}

// Size-p subsets of {0..total-1}, lexicographic.
std::vector<std::vector<int>> choose_masks(int total, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.push_back(idx);
    int i = p - 1;
    while (i >= 0 && idx[i] == total - p + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Unsigned shuffle of two tensors over a k-letter alphabet (the 0-line
// letters have shifted degree 0, so every shuffle sign is +1).
Vec shuffle_product(const Vec& va, int p, const Vec& vb, int q, Index k) {
  const auto masks = choose_masks(p + q, p);
  Index kout = 1;
  for (int i = 0; i < p + q; ++i) kout *= k;
  Vec out = Vec::Zero(kout);
  for (Index wa = 0; wa < va.size(); ++wa) {
    if (va(wa) == 0) continue;
    const auto da = digits(wa, k, p);
    for (Index wb = 0; wb < vb.size(); ++wb) {
      if (vb(wb) == 0) continue;
      const auto db = digits(wb, k, q);
      const Rational c = va(wa) * vb(wb);
      for (const auto& mask : masks) {
        std::vector<Index> dg(p + q, -1);
        for (int i = 0; i < p; ++i) dg[mask[i]] = da[i];
        int bi = 0;
        for (int i = 0; i < p + q; ++i)
          if (dg[i] < 0) dg[i] = db[bi++];
        Index idx = 0;
        for (int i = 0; i < p + q; ++i) idx = idx * k + dg[i];
        out(idx) += c;
      }
    }
  }
  return out;
}

// Echelon cached once, many right-hand sides.
struct EchelonSolver {
  exl::Echelon<Rational> e;
  Index cols = 0;
  Index rows = 0;

  explicit EchelonSolver(const Mat& m) : e(exl::rref(m)), cols(m.cols()), rows(m.rows()) {}

  std::optional<Vec> solve(const Vec& y) const {
    Vec z = e.ops * y;
    for (Index i = e.rank; i < rows; ++i)
      if (z(i) != 0) return std::nullopt;
    Vec x = Vec::Zero(cols);
    for (Index i = 0; i < e.rank; ++i) x(e.pivot_cols[i]) = z(i);
    return x;
  }
};

void accumulate(std::map<int64_t, Rational>& acc, const SpVec<Rational>& v,
                const Rational& c) {
  for (const auto& [i, x] : v) {
    auto& slot = acc[i];
    slot += c * x;
    if (slot == 0) acc.erase(i);
  }
}

// Build-time verification of the three differential identities on every
// materialized piece where the composite stays in range.
void verify_differentials(const BarState& b) {
  const int S = b.cap_s;
  for (int s = 1; s <= S; ++s) {
    for (int t = s; t <= S + 1; ++t) {
      const Index n = b.dim(s, t);
      for (Index w = 0; w < n; ++w) {
        if (t + 2 <= S + 1) {
          std::map<int64_t, Rational> acc;
          for (const auto& [u, c] : b.d_i_col(s, t, w))
            accumulate(acc, b.d_i_col(s, t + 1, u), c);
          if (!acc.empty()) throw std::logic_error("build_bar: d_I^2 != 0");
        }
        if (s >= 2) {
          std::map<int64_t, Rational> acc;
          for (const auto& [u, c] : b.d_c_col(s, t, w))
            accumulate(acc, b.d_c_col(s - 1, t, u), c);
          if (!acc.empty()) throw std::logic_error("build_bar: d_C^2 != 0");
        }
        if (s >= 2 && t + 1 <= S + 1) {
          std::map<int64_t, Rational> acc;
          for (const auto& [u, c] : b.d_i_col(s, t, w))
            accumulate(acc, b.d_c_col(s, t + 1, u), c);
          for (const auto& [u, c] : b.d_c_col(s, t, w))
            accumulate(acc, b.d_i_col(s - 1, t, u), c);
          if (!acc.empty())
            throw std::logic_error("build_bar: d_C d_I + d_I d_C != 0");
        }
      }
    }
  }
}

}  // namespace

Index BarState::dim(int s, int t) const {
  if (s < 0 || t < 0 || s > cap_s || t > cap_s + 1)
    throw std::out_of_range("bar: piece outside the materialized range");
  const auto it = pieces_.find({s, t});
  return it == pieces_.end() ? 0 : it->second.total;
}

std::vector<std::pair<int, Index>> BarState::word(int s, int t, Index w) const {
  const auto it = pieces_.find({s, t});
  if (it == pieces_.end() || w < 0 || w >= it->second.total)
    throw std::out_of_range("bar: word index out of range");
  const Piece& pc = it->second;
  const size_t blk =
      std::upper_bound(pc.offsets.begin(), pc.offsets.end(), w) - pc.offsets.begin() - 1;
  Index rem = w - pc.offsets[blk];
  const auto& comp = pc.comps[blk];
  std::vector<std::pair<int, Index>> letters(comp.size());
  for (int i = static_cast<int>(comp.size()) - 1; i >= 0; --i) {
    const Index dn = m.dim(comp[i]);
    letters[i] = {comp[i], rem % dn};
    rem /= dn;
  }
  return letters;
}

Index BarState::index_of(const std::vector<std::pair<int, Index>>& letters) const {
  int t = 0;
  std::vector<int> comp;
  comp.reserve(letters.size());
  for (const auto& [dg, ix] : letters) {
    t += dg;
    comp.push_back(dg);
  }
  const int s = static_cast<int>(letters.size());
  const auto it = pieces_.find({s, t});
  if (it == pieces_.end())
    throw std::out_of_range("bar: word outside the materialized range");
  const Piece& pc = it->second;
  const auto ci = pc.comp_index.find(comp);
  if (ci == pc.comp_index.end())
    throw std::out_of_range("bar: word uses an empty composition block");
  Index idx = 0;
  for (const auto& [dg, ix] : letters) idx = idx * m.dim(dg) + ix;
  return pc.offsets[ci->second] + idx;
}

SpVec<Rational> BarState::d_i_col(int s, int t, Index w) const {
  if (t + 1 > cap_s + 1)
    throw std::out_of_range("bar: d_I target not materialized");
  const auto letters = word(s, t, w);
  std::map<int64_t, Rational> acc;
  int shifted = 0;  // eps_{i-1}
  for (int i = 0; i < s; ++i) {
    const auto [dg, ix] = letters[i];
    const Rational sgn = (shifted % 2 == 0) ? Rational(-1) : Rational(1);
    const auto dit = sp_d_.find(dg);
    if (dit != sp_d_.end()) {
      for (const auto& [tix, c] : dit->second[ix]) {
        auto tl = letters;
        tl[i] = {dg + 1, static_cast<Index>(tix)};
        acc[index_of(tl)] += sgn * c;
      }
    }
    shifted += dg - 1;
  }
  return to_spvec(acc);
}

SpVec<Rational> BarState::d_c_col(int s, int t, Index w) const {
  const auto letters = word(s, t, w);
  std::map<int64_t, Rational> acc;
  int shifted = 0;
  for (int i = 0; i + 1 < s; ++i) {
    const auto [p, pi] = letters[i];
    const auto [q, qi] = letters[i + 1];
    shifted += p - 1;  // eps_i
    const Rational sgn = (shifted % 2 == 0) ? Rational(-1) : Rational(1);
    const auto mit = sp_mult_.find({p, q});
    if (mit != sp_mult_.end()) {
      for (const auto& [tix, c] : mit->second[pi * m.dim(q) + qi]) {
        std::vector<std::pair<int, Index>> tl;
        tl.reserve(letters.size() - 1);
        for (int j = 0; j < i; ++j) tl.push_back(letters[j]);
        tl.emplace_back(p + q, static_cast<Index>(tix));
        for (int j = i + 2; j < s; ++j) tl.push_back(letters[j]);
        acc[index_of(tl)] += sgn * c;
      }
    }
  }
  return to_spvec(acc);
}

BarState build_bar(const Cdga& m, int cap_s) {
  if (cap_s < 1)
    throw std::invalid_argument("build_bar: filtration cap must be at least 1");
  if (m.dim(0) != 1)
    throw std::invalid_argument("build_bar: algebra must be connected");
  BarState b;
  b.m = m;
  b.cap_s = cap_s;

  for (int n = 1; n <= m.cap; ++n) {
    if (m.dim(n) == 0 || m.dim(n + 1) == 0) continue;
    const Mat dn = m.d(n);
    auto& cols = b.sp_d_[n];
    cols.resize(m.dim(n));
    for (Index j = 0; j < dn.cols(); ++j)
      for (Index i = 0; i < dn.rows(); ++i)
        if (dn(i, j) != 0) cols[j].emplace_back(i, dn(i, j));
  }
  for (int p = 1; p < m.cap; ++p) {
    for (int q = 1; p + q <= m.cap; ++q) {
      if (m.dim(p) == 0 || m.dim(q) == 0 || m.dim(p + q) == 0) continue;
      auto& cols = b.sp_mult_[{p, q}];
      cols.resize(m.dim(p) * m.dim(q));
      for (Index i = 0; i < m.dim(p); ++i) {
        for (Index j = 0; j < m.dim(q); ++j) {
          const Vec v = m.product(p, i, q, j);
          auto& col = cols[i * m.dim(q) + j];
          for (Index r = 0; r < v.size(); ++r)
            if (v(r) != 0) col.emplace_back(r, v(r));
        }
      }
    }
  }

  for (int s = 0; s <= cap_s; ++s) {
    for (int t = s; t <= cap_s + 1; ++t) {
      BarState::Piece pc;
      if (s == 0) {
        if (t == 0) {
          pc.comps = {{}};
          pc.offsets = {0};
          pc.comp_index[{}] = 0;
          pc.total = 1;
        }
      } else {
        std::vector<int> cur;
        compositions_rec(m, t, s, cur, pc.comps);
        Index off = 0;
        for (size_t bi = 0; bi < pc.comps.size(); ++bi) {
          pc.offsets.push_back(off);
          pc.comp_index[pc.comps[bi]] = bi;
          Index blk = 1;
          for (int dg : pc.comps[bi]) blk *= m.dim(dg);
          off += blk;
        }
        pc.total = off;
      }
      b.pieces_[{s, t}] = std::move(pc);
    }
  }

  verify_differentials(b);
  return b;
}

namespace {

// One filtration level of H^0: achievable top terms in K^{(x)d} together with
// the length-1 component of the chosen cocycle representatives. The system
// solves d_I(x_u) + d_C(x_{u+1}) = 0 for u = d-1..1 with the top x_d running
// over K^{(x)d} (on which d_I vanishes identically).
struct LevelClasses {
  Mat top;  // k^d x dim
  Mat x1;   // dim M^1 x dim
};

LevelClasses solve_level(const BarState& b, const Mat& K, int d) {
  const Cdga& m = b.m;
  const Index n1 = m.dim(1);
  const Index k = K.cols();
  Index kd = 1;
  for (int i = 0; i < d; ++i) kd *= k;
  LevelClasses out;
  if (k == 0) {
    out.top = Mat::Zero(0, 0);
    out.x1 = Mat::Zero(n1, 0);
    return out;
  }
  if (d == 1) {
    out.top = Mat::Identity(k, k);
    out.x1 = K;
    return out;
  }

  std::vector<SpVec<Rational>> ksp(k);
  for (Index j = 0; j < k; ++j)
    for (Index i = 0; i < n1; ++i)
      if (K(i, j) != 0) ksp[j].emplace_back(i, K(i, j));

  std::vector<int64_t> eoff(d, 0);
  int64_t rows = 0;
  for (int u = d - 1; u >= 1; --u) {
    eoff[u] = rows;
    rows += b.dim(u, u + 1);
  }

  std::vector<SpVec<Rational>> cols;
  cols.reserve(kd);
  for (Index J = 0; J < kd; ++J) {
    const auto dj = digits(J, k, d);
    std::map<int64_t, Rational> sys;
    bool empty = false;
    for (int i = 0; i < d; ++i)
      if (ksp[dj[i]].empty()) empty = true;
    if (!empty) {
      std::vector<size_t> it(d, 0);
      while (true) {
        Rational c(1);
        Index widx = 0;
        for (int i = 0; i < d; ++i) {
          const auto& e = ksp[dj[i]][it[i]];
          c *= e.second;
          widx = widx * n1 + static_cast<Index>(e.first);
        }
        for (const auto& [ti, tc] : b.d_c_col(d, d, widx)) {
          auto& slot = sys[eoff[d - 1] + ti];
          slot += c * tc;
        }
        int i = d - 1;
        while (i >= 0 && ++it[i] == ksp[dj[i]].size()) {
          it[i] = 0;
          --i;
        }
        if (i < 0) break;
      }
    }
    cols.push_back(to_spvec(sys));
  }
  for (int u = d - 1; u >= 1; --u) {
    const Index nu = b.dim(u, u);
    for (Index w = 0; w < nu; ++w) {
      std::map<int64_t, Rational> sys;
      for (const auto& [ti, tc] : b.d_i_col(u, u, w)) sys[eoff[u] + ti] += tc;
      if (u >= 2)
        for (const auto& [ti, tc] : b.d_c_col(u, u, w)) sys[eoff[u - 1] + ti] += tc;
      cols.push_back(to_spvec(sys));
    }
  }

  const auto kernel = exl::sparse_kernel(cols);
  const int64_t x1_start = static_cast<int64_t>(cols.size()) - n1;
  exl::ColumnReducer<Rational> red;
  std::vector<Vec> tops, firsts;
  for (const auto& kv : kernel) {
    Vec y = Vec::Zero(kd);
    Vec x1 = Vec::Zero(n1);
    for (const auto& [ci, c] : kv) {
      if (ci < kd)
        y(ci) = c;
      else if (ci >= x1_start)
        x1(ci - x1_start) = c;
    }
    if (red.add(y)) {
      tops.push_back(std::move(y));
      firsts.push_back(std::move(x1));
    }
  }
  out.top = Mat::Zero(kd, static_cast<Index>(tops.size()));
  out.x1 = Mat::Zero(n1, static_cast<Index>(tops.size()));
  for (size_t i = 0; i < tops.size(); ++i) {
    out.top.col(static_cast<Index>(i)) = tops[i];
    out.x1.col(static_cast<Index>(i)) = firsts[i];
  }
  return out;
}

}  // namespace

HopfH0 h0(const BarState& b) {
  const Cdga& m = b.m;
  const int S = b.cap_s;
  const Index n1 = m.dim(1);

  HopfH0 h;
  h.levels = S;
  h.letters = exl::kernel_basis(Mat(m.d(1)));
  h.letter_dim = h.letters.cols();
  const Index k = h.letter_dim;
  h.gr_dim.assign(S + 1, 0);
  h.gr_dim[0] = 1;
  h.top.assign(S + 1, Mat());
  h.x1.assign(S + 1, Mat());
  h.top[0] = Mat::Ones(1, 1);
  h.x1[0] = Mat::Zero(n1, 1);

  for (int d = 1; d <= S; ++d) {
    const LevelClasses lc = solve_level(b, h.letters, d);
    h.gr_dim[d] = lc.top.cols();
    h.top[d] = lc.top;
    h.x1[d] = lc.x1;
  }

  std::vector<Mat> linv(S + 1);
  for (int d = 0; d <= S; ++d) linv[d] = left_inverse(h.top[d]);

  for (int p = 0; p <= S; ++p) {
    for (int q = 0; p + q <= S; ++q) {
      const Index gp = h.gr_dim[p], gq = h.gr_dim[q];
      if (p == 0) {
        h.product[{p, q}] = Mat::Identity(gq, gq);
        continue;
      }
      if (q == 0) {
        h.product[{p, q}] = Mat::Identity(gp, gp);
        continue;
      }
      Mat pr = Mat::Zero(h.gr_dim[p + q], gp * gq);
      for (Index i = 0; i < gp; ++i) {
        for (Index j = 0; j < gq; ++j) {
          const Vec sh = shuffle_product(h.top[p].col(i), p, h.top[q].col(j), q, k);
          const Vec coords = linv[p + q] * sh;
          if (!(h.top[p + q] * coords - sh).isZero(Rational(0)))
            throw std::logic_error("h0: shuffle product left the computed H^0");
          pr.col(i * gq + j) = coords;
        }
      }
      h.product[{p, q}] = std::move(pr);
    }
  }

  for (int d = 0; d <= S; ++d) {
    for (int p = 0; p <= d; ++p) {
      const int q = d - p;
      const Index gd = h.gr_dim[d];
      if (p == 0 || q == 0) {
        h.coproduct[{p, q}] = Mat::Identity(gd, gd);
        continue;
      }
      const Mat lt = kron(linv[p], linv[q]);
      const Mat bt = kron(h.top[p], h.top[q]);
      Mat cp = Mat::Zero(h.gr_dim[p] * h.gr_dim[q], gd);
      for (Index c = 0; c < gd; ++c) {
        const Vec y = h.top[d].col(c);
        const Vec coords = lt * y;
        if (!(bt * coords - y).isZero(Rational(0)))
          throw std::logic_error("h0: deconcatenation left the computed H^0 filtration");
        cp.col(c) = coords;
      }
      h.coproduct[{p, q}] = std::move(cp);
    }
  }
  return h;
}

Indecomposables indecomposables(const HopfH0& h) {
  const int S = h.levels;
  Indecomposables q;
  q.gr_dim.assign(S + 1, 0);
  q.reps.assign(S + 1, Mat());
  q.proj.assign(S + 1, Mat());
  q.reps[0] = Mat::Zero(h.gr_dim[0], 0);
  q.proj[0] = Mat::Zero(0, h.gr_dim[0]);

  for (int d = 1; d <= S; ++d) {
    const Index gd = h.gr_dim[d];
    exl::ColumnReducer<Rational> red;
    std::vector<Vec> dec;
    for (int p = 1; p < d; ++p) {
      const Mat& pr = h.product.at({p, d - p});
      for (Index c = 0; c < pr.cols(); ++c)
        if (red.add(pr.col(c))) dec.push_back(pr.col(c));
    }
    std::vector<Index> picks;
    for (Index i = 0; i < gd; ++i)
      if (red.add(Vec::Unit(gd, i))) picks.push_back(i);
    q.gr_dim[d] = static_cast<Index>(picks.size());
    Mat reps = Mat::Zero(gd, q.gr_dim[d]);
    for (size_t i = 0; i < picks.size(); ++i) reps(picks[i], static_cast<Index>(i)) = 1;
    Mat basis(gd, q.gr_dim[d] + static_cast<Index>(dec.size()));
    basis.leftCols(q.gr_dim[d]) = reps;
    for (size_t i = 0; i < dec.size(); ++i)
      basis.col(q.gr_dim[d] + static_cast<Index>(i)) = dec[i];
    const EchelonSolver es(basis);
    Mat proj = Mat::Zero(q.gr_dim[d], gd);
    for (Index i = 0; i < gd; ++i) {
      const auto sol = es.solve(Vec::Unit(gd, i));
      if (!sol) throw std::logic_error("indecomposables: quotient basis is not spanning");
      proj.col(i) = sol->head(q.gr_dim[d]);
    }
    q.reps[d] = std::move(reps);
    q.proj[d] = std::move(proj);
  }

  for (int d = 2; d <= S; ++d) {
    for (int p = 1; p < d; ++p) {
      const int r = d - p;
      const Index gp = h.gr_dim[p], gr = h.gr_dim[r];
      Mat flip = Mat::Zero(gp * gr, gr * gp);  // gr_r (x) gr_p -> gr_p (x) gr_r
      for (Index a = 0; a < gr; ++a)
        for (Index c = 0; c < gp; ++c) flip(c * gr + a, a * gp + c) = 1;
      const Mat delta = h.coproduct.at({p, r}) - flip * h.coproduct.at({r, p});
      q.cobracket[{p, r}] = kron(q.proj[p], q.proj[r]) * delta * q.reps[d];
    }
  }
  return q;
}

M1Comparison compare_to_M1(const BarState& b) {
  const Cdga& m = b.m;
  const int S = b.cap_s;
  const Index n1 = m.dim(1);
  const Index n2 = m.dim(2);
  const Mat d1 = m.d(1);

  M1Comparison r;
  const HopfH0 h = h0(b);
  const Indecomposables q = indecomposables(h);

  // Intrinsic stage filtration of M^1: F_1 = Ker d, F_d = d^{-1}(/\^2 F_{d-1}).
  std::vector<Mat> F(S + 1);
  F[0] = Mat::Zero(n1, 0);
  F[1] = h.letters;
  for (int d = 2; d <= S; ++d) {
    exl::ColumnReducer<Rational> red;
    const Mat& prev = F[d - 1];
    for (Index i = 0; i < prev.cols(); ++i)
      for (Index j = i + 1; j < prev.cols(); ++j)
        red.add(m.multiply(1, prev.col(i), 1, prev.col(j)));
    Mat rd(n2, n1);
    for (Index i = 0; i < n1; ++i) rd.col(i) = red.residual(d1.col(i));
    F[d] = exl::kernel_basis(rd);
  }

  std::vector<Mat> G(S + 1);
  r.m1_gr_dim.assign(S + 1, 0);
  {
    exl::ColumnReducer<Rational> red;
    for (int d = 1; d <= S; ++d) {
      std::vector<Index> picks;
      for (Index i = 0; i < F[d].cols(); ++i)
        if (red.add(F[d].col(i))) picks.push_back(i);
      G[d] = Mat::Zero(n1, static_cast<Index>(picks.size()));
      for (size_t i = 0; i < picks.size(); ++i)
        G[d].col(static_cast<Index>(i)) = F[d].col(picks[i]);
      r.m1_gr_dim[d] = G[d].cols();
    }
  }

  Index nb = 0;
  for (int d = 1; d <= S; ++d) nb += r.m1_gr_dim[d];
  Mat bstar(n1, nb);
  std::vector<int> stage(nb);
  std::vector<Index> grpos(nb);
  {
    Index c = 0;
    for (int d = 1; d <= S; ++d)
      for (Index i = 0; i < G[d].cols(); ++i, ++c) {
        bstar.col(c) = G[d].col(i);
        stage[c] = d;
        grpos[c] = i;
      }
  }

  std::string msg;
  auto note = [&msg](const std::string& s) {
    if (msg.empty()) msg = s;
  };

  Index qtotal = 0;
  for (int d = 1; d <= S; ++d) qtotal += q.gr_dim[d];
  r.map = Mat::Zero(n1, qtotal);
  r.iso_level.assign(S + 1, 0);
  r.iso_level[0] = 1;
  std::vector<Mat> grpsi(S + 1);
  bool iso_all = true;
  {
    Index colp = 0;
    Index pre = 0;
    for (int d = 1; d <= S; ++d) {
      const Mat x1d = h.x1[d] * q.reps[d];
      bool ok_level = (q.gr_dim[d] == r.m1_gr_dim[d]);
      if (!ok_level)
        note("level " + std::to_string(d) + ": dimension mismatch");
      const Index gd = r.m1_gr_dim[d];
      grpsi[d] = Mat::Zero(gd, q.gr_dim[d]);
      Mat basis(n1, pre + gd);
      basis.leftCols(pre) = bstar.leftCols(pre);
      basis.rightCols(gd) = G[d];
      const EchelonSolver es(basis);
      for (Index c = 0; c < x1d.cols(); ++c) {
        const auto sol = es.solve(x1d.col(c));
        if (!sol) {
          ok_level = false;
          note("level " + std::to_string(d) + ": length-1 part leaves the filtration step");
          continue;
        }
        grpsi[d].col(c) = sol->tail(gd);
      }
      if (ok_level && exl::rank(grpsi[d]) != gd) {
        ok_level = false;
        note("level " + std::to_string(d) + ": induced graded map is not invertible");
      }
      r.iso_level[d] = ok_level ? 1 : 0;
      iso_all = iso_all && ok_level;
      r.map.block(0, colp, n1, x1d.cols()) = x1d;
      colp += x1d.cols();
      pre += gd;
    }
  }
  r.graded_iso = iso_all;

  // Cobracket intertwining on graded pieces: delta_M from nu = -d against the
  // deconcatenation cobracket pushed through the graded comparison map.
  bool inter = true;
  {
    std::vector<std::pair<Index, Index>> wpairs;
    Mat wedge(n2, nb * (nb - 1) / 2);
    {
      Index c = 0;
      for (Index i = 0; i < nb; ++i)
        for (Index j = i + 1; j < nb; ++j, ++c) {
          wedge.col(c) = m.multiply(1, bstar.col(i), 1, bstar.col(j));
          wpairs.emplace_back(i, j);
        }
    }
    const EchelonSolver ws(wedge);
    for (int d = 2; d <= S && inter; ++d) {
      std::map<std::pair<int, int>, Mat> dm;
      for (int p = 1; p < d; ++p)
        dm[{p, d - p}] =
            Mat::Zero(r.m1_gr_dim[p] * r.m1_gr_dim[d - p], r.m1_gr_dim[d]);
      for (Index c = 0; c < G[d].cols() && inter; ++c) {
        const Vec dv = d1 * G[d].col(c);
        const auto sol = ws.solve(dv);
        if (!sol) {
          inter = false;
          note("level " + std::to_string(d) + ": differential leaves the wedge of the filtration");
          break;
        }
        for (size_t pi = 0; pi < wpairs.size(); ++pi) {
          const Rational cc = (*sol)(static_cast<Index>(pi));
          if (cc == 0) continue;
          const auto [i, j] = wpairs[pi];
          const int si = stage[i], sj = stage[j];
          if (si + sj > d) {
            inter = false;
            note("level " + std::to_string(d) + ": differential violates the filtration");
            break;
          }
          if (si + sj < d) continue;  // lower order in the associated graded
          dm[{si, sj}](grpos[i] * r.m1_gr_dim[sj] + grpos[j], c) -= cc;
          dm[{sj, si}](grpos[j] * r.m1_gr_dim[si] + grpos[i], c) += cc;
        }
      }
      for (int p = 1; p < d && inter; ++p) {
        const Mat lhs = dm.at({p, d - p}) * grpsi[d];
        const Mat rhs = kron(grpsi[p], grpsi[d - p]) * q.cobracket.at({p, d - p});
        if (!(lhs - rhs).isZero(Rational(0))) {
          inter = false;
          note("level " + std::to_string(d) + ": cobrackets do not intertwine");
        }
      }
    }
  }
  r.intertwines = inter;
  r.ok = r.graded_iso && r.intertwines;
  r.message = r.ok ? std::string() : msg;
  return r;
}

E1Table eilenberg_moore_E1(const BarState& b) {
  const Cdga& m = b.m;
  const int S = b.cap_s;
  E1Table r;

  std::vector<Index> hd(m.cap + 2, 0);
  for (int n = 1; n <= m.cap; ++n) {
    if (m.dim(n) == 0) continue;
    const Index ker = exl::kernel_basis(Mat(m.d(n))).cols();
    const Index bnd = (n >= 2) ? exl::rank(Mat(m.d(n - 1))) : 0;
    hd[n] = ker - bnd;
  }

  std::vector<std::vector<Index>> kt(S + 1, std::vector<Index>(S + 1, 0));
  kt[0][0] = 1;
  for (int s = 1; s <= S; ++s)
    for (int t = 0; t <= S; ++t)
      for (int n = 1; n <= m.cap && n <= t; ++n)
        kt[s][t] += hd[n] * kt[s - 1][t - n];

  std::map<std::pair<int, int>, Index> nullity;
  auto nl = [&](int s, int t) -> Index {
    const Index n = b.dim(s, t);
    if (n == 0) return 0;
    const auto it = nullity.find({s, t});
    if (it != nullity.end()) return it->second;
    std::vector<SpVec<Rational>> cols(n);
    for (Index w = 0; w < n; ++w) cols[w] = b.d_i_col(s, t, w);
    const Index res = static_cast<Index>(exl::sparse_kernel(cols).size());
    nullity[{s, t}] = res;
    return res;
  };

  bool agree = true;
  for (int s = 0; s <= S; ++s) {
    for (int t = s; t <= S; ++t) {
      Index direct;
      if (s == 0) {
        direct = (t == 0) ? 1 : 0;
      } else {
        const Index rank_prev = (t - 1 >= s) ? b.dim(s, t - 1) - nl(s, t - 1) : 0;
        direct = nl(s, t) - rank_prev;
      }
      r.dims[{s, t}] = {direct, kt[s][t]};
      if (direct != kt[s][t]) agree = false;
    }
  }
  r.agree = agree;
  return r;
}

DualHopf dual_filtered_hopf(const HopfH0& h) {
  DualHopf d;
  d.dims.assign(h.levels + 1, 0);
  Index run = 0;
  for (int n = 0; n <= h.levels; ++n) {
    run += h.gr_dim[n];
    d.dims[n] = run;
  }
  for (const auto& [pq, mat] : h.coproduct) d.product[pq] = mat.transpose();
  return d;
}

}  // namespace logpi1::bar
