#include "logpi1/cdga.hpp"

#include <stdexcept>

namespace logpi1::cdga {

namespace {

Rational koszul(int p, int q) { return (p % 2 != 0 && q % 2 != 0) ? Rational(-1) : Rational(1); }

}  // namespace

Mat Cdga::d(int n) const {
  auto it = diff.find(n);
  if (it != diff.end()) return it->second;
  return Mat::Zero(dim(n + 1), dim(n));
}

Vec Cdga::product(int p, Index i, int q, Index j) const {
  const Index out_dim = dim(p + q);
  if (p + q > cap || out_dim == 0) return Vec::Zero(out_dim);
  if (auto it = mult.find({p, q}); it != mult.end()) return it->second.col(i * dim(q) + j);
  if (auto it = mult.find({q, p}); it != mult.end())
    return koszul(p, q) * it->second.col(j * dim(p) + i);
  // Unit fallback for connected algebras without explicit degree-0 tables.
  if (p == 0 && dim(0) == 1 && i == unitIndex()) return Vec::Unit(out_dim, j);
  if (q == 0 && dim(0) == 1 && j == unitIndex()) return Vec::Unit(out_dim, i);
  return Vec::Zero(out_dim);
}

Vec Cdga::multiply(int p, const Vec& x, int q, const Vec& y) const {
  Vec out = Vec::Zero(dim(p + q));
  if (p + q > cap) return out;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0) continue;
    for (Index j = 0; j < y.size(); ++j) {
      if (y(j) == 0) continue;
      out += x(i) * y(j) * product(p, i, q, j);
    }
  }
  return out;
}

exactlin::Complex<Rational> Cdga::complex() const {
  exactlin::Complex<Rational> c;
  c.space = space;
  for (int n = 0; n <= cap; ++n)
    if (dim(n) > 0 || dim(n + 1) > 0) c.d[n] = d(n);
  return c;
}

ValidationReport validate(const Cdga& a) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    if (rep.ok) { rep.ok = false; rep.first_violation = std::move(msg); }
  };

  for (const auto& [n, v] : a.space.labels) {
    if (n < 0 || n > a.cap) { fail("basis outside degrees 0..cap at degree " + std::to_string(n)); return rep; }
    (void)v;
  }
  for (const auto& [n, m] : a.diff)
    if (m.rows() != a.dim(n + 1) || m.cols() != a.dim(n)) {
      fail("differential shape mismatch at degree " + std::to_string(n));
      return rep;
    }
  for (const auto& [pq, m] : a.mult) {
    if (m.rows() != a.dim(pq.first + pq.second) || m.cols() != a.dim(pq.first) * a.dim(pq.second)) {
      fail("multiplication table shape mismatch at (" + std::to_string(pq.first) + "," +
           std::to_string(pq.second) + ")");
      return rep;
    }
  }
  if (a.augmentation.size() != a.dim(0)) { fail("augmentation size mismatch"); return rep; }

  // d*d = 0, reported at the offending basis element
  for (int n = 0; n + 2 <= a.cap; ++n) {
    const Mat sq = a.d(n + 1) * a.d(n);
    for (Index j = 0; j < sq.cols(); ++j)
      if (!sq.col(j).isZero(Rational(0)))
        fail("d*d != 0 at degree " + std::to_string(n) + ", basis element '" +
             a.space.labels.at(n)[static_cast<size_t>(j)] + "'");
    if (!rep.ok) return rep;
  }

  // unit and augmentation
  if (a.dim(0) == 0) { fail("no degree-0 part"); return rep; }
  if (a.augmentation(a.unitIndex()) != 1) fail("augmentation(unit) != 1");
  for (int q = 0; q <= a.cap && rep.ok; ++q)
    for (Index j = 0; j < a.dim(q) && rep.ok; ++j) {
      if (a.product(0, a.unitIndex(), q, j) != Vec::Unit(a.dim(q), j))
        fail("left unit law fails in degree " + std::to_string(q));
      if (a.product(q, j, 0, a.unitIndex()) != Vec::Unit(a.dim(q), j))
        fail("right unit law fails in degree " + std::to_string(q));
    }
  if (!rep.ok) return rep;

  // graded commutativity
  for (int p = 0; p <= a.cap; ++p)
    for (int q = p; p + q <= a.cap; ++q)
      for (Index i = 0; i < a.dim(p); ++i)
        for (Index j = 0; j < a.dim(q); ++j)
          if (a.product(p, i, q, j) != Vec(koszul(p, q) * a.product(q, j, p, i))) {
            fail("graded commutativity fails at degrees (" + std::to_string(p) + "," +
                 std::to_string(q) + ")");
            return rep;
          }

  // Leibniz: d(xy) = (dx)y + (-1)^p x(dy), checked where every term fits the cap
  for (int p = 0; p <= a.cap; ++p)
    for (int q = 0; p + q + 1 <= a.cap; ++q)
      for (Index i = 0; i < a.dim(p); ++i)
        for (Index j = 0; j < a.dim(q); ++j) {
          const Vec lhs = a.d(p + q) * a.product(p, i, q, j);
          Vec rhs = a.multiply(p + 1, a.d(p).col(i), q, Vec::Unit(a.dim(q), j));
          const Rational sg = (p % 2 != 0) ? Rational(-1) : Rational(1);
          rhs += sg * a.multiply(p, Vec::Unit(a.dim(p), i), q + 1, a.d(q).col(j));
          if (lhs != rhs) {
            fail("Leibniz fails on pair of degrees (" + std::to_string(p) + "," +
                 std::to_string(q) + ")");
            return rep;
          }
        }

  // associativity on basis triples within cap
  for (int p = 0; p <= a.cap; ++p)
    for (int q = 0; p + q <= a.cap; ++q)
      for (int r = 0; p + q + r <= a.cap; ++r)
        for (Index i = 0; i < a.dim(p); ++i)
          for (Index j = 0; j < a.dim(q); ++j)
            for (Index k = 0; k < a.dim(r); ++k) {
              const Vec xy_z = a.multiply(p + q, a.product(p, i, q, j), r, Vec::Unit(a.dim(r), k));
              const Vec x_yz = a.multiply(p, Vec::Unit(a.dim(p), i), q + r, a.product(q, j, r, k));
              if (xy_z != x_yz) {
                fail("associativity fails on degrees (" + std::to_string(p) + "," +
                     std::to_string(q) + "," + std::to_string(r) + ")");
                return rep;
              }
            }

  // augmentation multiplicative on the degree-0 part
  for (Index i = 0; i < a.dim(0); ++i)
    for (Index j = 0; j < a.dim(0); ++j) {
      const Vec pr = a.product(0, i, 0, j);
      Rational lhs = 0;
      for (Index k = 0; k < a.dim(0); ++k) lhs += a.augmentation(k) * pr(k);
      if (lhs != a.augmentation(i) * a.augmentation(j)) {
        fail("augmentation not multiplicative on degree 0");
        return rep;
      }
    }
  return rep;
}

ValidationReport validate_morphism(const Cdga& src, const Cdga& tgt, const CdgaMorphism& m) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    if (rep.ok) { rep.ok = false; rep.first_violation = std::move(msg); }
  };
  // chain map
  for (int n = 0; n < src.cap && rep.ok; ++n) {
    const Mat lhs = m.at(src, tgt, n + 1) * src.d(n);
    const Mat rhs = tgt.d(n) * m.at(src, tgt, n);
    if (lhs != rhs) fail("morphism does not commute with d at degree " + std::to_string(n));
  }
  // unit
  if (rep.ok && src.dim(0) > 0) {
    const Vec u = m.at(src, tgt, 0) * Vec::Unit(src.dim(0), src.unitIndex());
    if (u != Vec::Unit(tgt.dim(0), tgt.unitIndex())) fail("morphism does not preserve the unit");
  }
  // multiplicative on basis pairs (both sides within both caps)
  for (int p = 0; p <= src.cap && rep.ok; ++p)
    for (int q = 0; p + q <= std::min(src.cap, tgt.cap) && rep.ok; ++q)
      for (Index i = 0; i < src.dim(p) && rep.ok; ++i)
        for (Index j = 0; j < src.dim(q) && rep.ok; ++j) {
          const Vec lhs = m.at(src, tgt, p + q) * src.product(p, i, q, j);
          const Vec rhs = tgt.multiply(p, m.at(src, tgt, p).col(i), q, m.at(src, tgt, q).col(j));
          if (lhs != rhs)
            fail("morphism not multiplicative at degrees (" + std::to_string(p) + "," +
                 std::to_string(q) + ")");
        }
  // augmentation
  if (rep.ok && src.dim(0) > 0) {
    for (Index i = 0; i < src.dim(0); ++i) {
      const Vec im = m.at(src, tgt, 0) * Vec::Unit(src.dim(0), i);
      Rational aug_t = 0;
      for (Index k = 0; k < tgt.dim(0); ++k) aug_t += tgt.augmentation(k) * im(k);
      if (aug_t != src.augmentation(i)) {
        fail("morphism does not preserve the augmentation");
        break;
      }
    }
  }
  return rep;
}

Cdga marked_curve_model(int g, int r) {
  if (g < 0) throw std::invalid_argument("marked_curve_model: g must be >= 0");
  if (r < 1) throw std::invalid_argument("marked_curve_model: r must be >= 1 (use unmarked_curve_model)");
  Cdga a;
  a.cap = 3;
  a.space.labels[0] = {"1"};
  const int n1 = 2 * g + r - 1;
  std::vector<std::string> deg1;
  for (int i = 1; i <= n1; ++i) deg1.push_back("v" + std::to_string(i));
  a.space.labels[1] = std::move(deg1);
  a.diff[0] = Mat::Zero(n1, 1);
  a.mult[{0, 0}] = Mat::Identity(1, 1);
  a.mult[{0, 1}] = Mat::Identity(n1, n1);
  a.mult[{1, 1}] = Mat::Zero(0, n1 * n1);
  a.augmentation = Vec::Ones(1);
  return a;
}

Cdga unmarked_curve_model(int g) {
  if (g < 1) throw std::invalid_argument("unmarked_curve_model: g must be >= 1");
  Cdga a;
  a.cap = 3;
  a.space.labels[0] = {"1"};
  const int n1 = 2 * g;
  std::vector<std::string> deg1;
  for (int i = 1; i <= n1; ++i) deg1.push_back("v" + std::to_string(i));
  a.space.labels[1] = std::move(deg1);
  a.space.labels[2] = {"w"};
  a.diff[0] = Mat::Zero(n1, 1);
  a.diff[1] = Mat::Zero(1, n1);
  a.diff[2] = Mat::Zero(0, 1);
  a.mult[{0, 0}] = Mat::Identity(1, 1);
  a.mult[{0, 1}] = Mat::Identity(n1, n1);
  a.mult[{0, 2}] = Mat::Identity(1, 1);
  Mat cup = Mat::Zero(1, n1 * n1);
  for (int i = 0; i < g; ++i) {
    cup(0, (2 * i) * n1 + (2 * i + 1)) = 1;   // v_{2i-1} v_{2i} = w
    cup(0, (2 * i + 1) * n1 + (2 * i)) = -1;  // v_{2i} v_{2i-1} = -w
  }
  a.mult[{1, 1}] = std::move(cup);
  a.mult[{1, 2}] = Mat::Zero(0, n1 * 1);
  a.augmentation = Vec::Ones(1);
  return a;
}

IntervalTensor tensor_with_interval(const Cdga& a, int cap_d) {
  if (cap_d < 1) throw std::invalid_argument("tensor_with_interval: D must be >= 1");
  IntervalTensor t;
  Cdga& b = t.algebra;
  b.cap = a.cap + 1;
  const int dd = cap_d;

  // degree n basis: t^k (x) A^n for k = 0..D, then t^k dt (x) A^{n-1} for
  // k = 0..D-1 (the dt-part is truncated one lower so that d and the product
  // respect the truncation exactly).
  auto poly_dim = [&](int n) { return (dd + 1) * a.dim(n); };
  auto poly_idx = [&](int n, int k, Index i) { return k * a.dim(n) + i; };
  auto dt_idx = [&](int n, int k, Index i) { return poly_dim(n) + k * a.dim(n - 1) + i; };
  auto total_dim = [&](int n) { return poly_dim(n) + dd * a.dim(n - 1); };

  for (int n = 0; n <= b.cap; ++n) {
    if (total_dim(n) == 0) continue;
    std::vector<std::string> lab;
    for (int k = 0; k <= dd; ++k)
      for (Index i = 0; i < a.dim(n); ++i)
        lab.push_back("t^" + std::to_string(k) + "*" + a.space.labels.at(n)[static_cast<size_t>(i)]);
    for (int k = 0; k < dd; ++k)
      for (Index i = 0; i < a.dim(n - 1); ++i)
        lab.push_back("t^" + std::to_string(k) + "dt*" + a.space.labels.at(n - 1)[static_cast<size_t>(i)]);
    b.space.labels[n] = std::move(lab);
  }

  for (int n = 0; n <= b.cap; ++n) {
    if (total_dim(n) == 0 && total_dim(n + 1) == 0) continue;
    Mat d = Mat::Zero(total_dim(n + 1), total_dim(n));
    const Mat da = a.d(n), da1 = a.d(n - 1);
    for (int k = 0; k <= dd; ++k) {
      for (Index i = 0; i < a.dim(n); ++i) {
        const Index col = poly_idx(n, k, i);
        for (Index r = 0; r < a.dim(n + 1); ++r)
          if (da(r, i) != 0) d(poly_idx(n + 1, k, r), col) += da(r, i);
        if (k >= 1) d(dt_idx(n + 1, k - 1, i), col) += Rational(k);
      }
      if (k >= dd) continue;
      for (Index i = 0; i < a.dim(n - 1); ++i) {
        const Index col = dt_idx(n, k, i);
        for (Index r = 0; r < a.dim(n); ++r)
          if (da1(r, i) != 0) d(dt_idx(n + 1, k, r), col) -= da1(r, i);
      }
    }
    b.diff[n] = std::move(d);
  }

  for (int p = 0; p <= b.cap; ++p)
    for (int q = p; p + q <= b.cap; ++q) {
      if (total_dim(p) == 0 || total_dim(q) == 0 || total_dim(p + q) == 0) continue;
      Mat table = Mat::Zero(total_dim(p + q), total_dim(p) * total_dim(q));
      for (int ka = 0; ka <= dd; ++ka)
        for (int kb = 0; kb <= dd; ++kb) {
          // poly (x) poly
          for (Index i = 0; i < a.dim(p); ++i)
            for (Index j = 0; j < a.dim(q); ++j) {
              if (ka + kb > dd) continue;
              const Vec pr = a.product(p, i, q, j);
              const Index col = poly_idx(p, ka, i) * total_dim(q) + poly_idx(q, kb, j);
              for (Index r = 0; r < pr.size(); ++r)
                if (pr(r) != 0) table(poly_idx(p + q, ka + kb, r), col) += pr(r);
            }
          // poly (x) dt
          for (Index i = 0; i < a.dim(p); ++i)
            for (Index j = 0; j < a.dim(q - 1); ++j) {
              if (kb >= dd || ka + kb > dd - 1) continue;
              const Vec pr = a.product(p, i, q - 1, j);
              const Rational sg = (p % 2 != 0) ? Rational(-1) : Rational(1);
              const Index col = poly_idx(p, ka, i) * total_dim(q) + dt_idx(q, kb, j);
              for (Index r = 0; r < pr.size(); ++r)
                if (pr(r) != 0) table(dt_idx(p + q, ka + kb, r), col) += sg * pr(r);
            }
          // dt (x) poly
          for (Index i = 0; i < a.dim(p - 1); ++i)
            for (Index j = 0; j < a.dim(q); ++j) {
              if (ka >= dd || ka + kb > dd - 1) continue;
              const Vec pr = a.product(p - 1, i, q, j);
              const Index col = dt_idx(p, ka, i) * total_dim(q) + poly_idx(q, kb, j);
              for (Index r = 0; r < pr.size(); ++r)
                if (pr(r) != 0) table(dt_idx(p + q, ka + kb, r), col) += pr(r);
            }
          // dt (x) dt = 0
        }
      b.mult[{p, q}] = std::move(table);
    }

  b.augmentation = Vec::Zero(total_dim(0));
  for (Index i = 0; i < a.dim(0); ++i) b.augmentation(poly_idx(0, 0, i)) = a.augmentation(i);

  for (int n = 0; n <= a.cap; ++n) {
    if (a.dim(n) == 0) continue;
    Mat f0 = Mat::Zero(a.dim(n), total_dim(n));
    Mat f1 = Mat::Zero(a.dim(n), total_dim(n));
    for (int k = 0; k <= dd; ++k)
      for (Index i = 0; i < a.dim(n); ++i) {
        if (k == 0) f0(i, poly_idx(n, k, i)) = 1;
        f1(i, poly_idx(n, k, i)) = 1;
      }
    t.p0.f.f[n] = std::move(f0);
    t.p1.f.f[n] = std::move(f1);
  }
  return t;
}

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const nlohmann::json& j, Index rows, Index cols) {
  Mat m = Mat::Zero(rows, cols);
  if (static_cast<Index>(j.size()) != rows)
    throw std::invalid_argument("matrix row count mismatch");
  for (Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<size_t>(i));
    if (static_cast<Index>(row.size()) != cols)
      throw std::invalid_argument("matrix column count mismatch");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = parse_rational(row.at(static_cast<size_t>(c)).get<std::string>());
  }
  return m;
}

nlohmann::json to_json(const Cdga& a) {
  nlohmann::json j;
  j["cap"] = a.cap;
  nlohmann::json basis = nlohmann::json::object();
  for (const auto& [n, v] : a.space.labels)
    if (!v.empty()) basis[std::to_string(n)] = v;
  j["basis"] = std::move(basis);
  nlohmann::json diff = nlohmann::json::object();
  for (const auto& [n, m] : a.diff)
    if (m.size() > 0 && !m.isZero(Rational(0))) diff[std::to_string(n)] = matrix_to_json(m);
  j["diff"] = std::move(diff);
  nlohmann::json mult = nlohmann::json::array();
  for (const auto& [pq, m] : a.mult) {
    if (m.size() == 0) continue;
    nlohmann::json table = nlohmann::json::array();
    for (Index i = 0; i < a.dim(pq.first); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Index j2 = 0; j2 < a.dim(pq.second); ++j2) {
        nlohmann::json val = nlohmann::json::array();
        const Vec pr = m.col(i * a.dim(pq.second) + j2);
        for (Index r = 0; r < pr.size(); ++r) val.push_back(to_string(pr(r)));
        row.push_back(std::move(val));
      }
      table.push_back(std::move(row));
    }
    mult.push_back({{"p", pq.first}, {"q", pq.second}, {"table", std::move(table)}});
  }
  j["mult"] = std::move(mult);
  nlohmann::json aug = nlohmann::json::array();
  for (Index i = 0; i < a.augmentation.size(); ++i) aug.push_back(to_string(a.augmentation(i)));
  j["augmentation"] = std::move(aug);
  return j;
}

Cdga cdga_from_json(const nlohmann::json& j) {
  Cdga a;
  a.cap = j.at("cap").get<int>();
  for (const auto& [k, v] : j.at("basis").items()) {
    const int n = std::stoi(k);
    a.space.labels[n] = v.get<std::vector<std::string>>();
  }
  if (j.contains("diff"))
    for (const auto& [k, v] : j.at("diff").items()) {
      const int n = std::stoi(k);
      a.diff[n] = matrix_from_json(v, a.dim(n + 1), a.dim(n));
    }
  if (j.contains("mult"))
    for (const auto& entry : j.at("mult")) {
      const int p = entry.at("p").get<int>();
      const int q = entry.at("q").get<int>();
      Mat table = Mat::Zero(a.dim(p + q), a.dim(p) * a.dim(q));
      const auto& tj = entry.at("table");
      for (Index i = 0; i < a.dim(p); ++i)
        for (Index j2 = 0; j2 < a.dim(q); ++j2) {
          const auto& val = tj.at(static_cast<size_t>(i)).at(static_cast<size_t>(j2));
          for (Index r = 0; r < a.dim(p + q); ++r)
            table(r, i * a.dim(q) + j2) = parse_rational(val.at(static_cast<size_t>(r)).get<std::string>());
        }
      a.mult[{p, q}] = std::move(table);
    }
  if (j.contains("augmentation")) {
    const auto& aug = j.at("augmentation");
    a.augmentation = Vec::Zero(a.dim(0));
    for (Index i = 0; i < a.dim(0); ++i)
      a.augmentation(i) = parse_rational(aug.at(static_cast<size_t>(i)).get<std::string>());
  } else {
    a.augmentation = Vec::Zero(a.dim(0));
    if (a.dim(0) > 0) a.augmentation(0) = 1;
  }
  return a;
}

}  // namespace logpi1::cdga
