#include "logpi1/nilpotent_lie.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <queue>
#include <set>
#include <stdexcept>

namespace logpi1::lie {

namespace {

void drop_zeros(AssocPoly& p) {
  for (auto it = p.begin(); it != p.end();) {
    if (it->second == 0)
      it = p.erase(it);
    else
      ++it;
  }
}

Rational int_pow(long base, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= Rational(base);
  return r;
}

int mobius(int n) {
  int result = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    result = -result;
  }
  if (n > 1) result = -result;
  return result;
}

}  // namespace

AssocPoly assoc_mul(const AssocPoly& x, const AssocPoly& y, int q) {
  AssocPoly r;
  for (const auto& [wx, cx] : x)
    for (const auto& [wy, cy] : y) {
      if (static_cast<int>(wx.size() + wy.size()) > q) continue;
      r[wx + wy] += cx * cy;
    }
  drop_zeros(r);
  return r;
}

AssocPoly assoc_exp(const AssocPoly& x, int q) {
  if (x.count(""))
    throw std::invalid_argument("assoc_exp: constant term must vanish");
  AssocPoly r{{"", 1}};
  AssocPoly pw{{"", 1}};
  Rational fact = 1;
  for (int m = 1; m <= q; ++m) {
    pw = assoc_mul(pw, x, q);
    if (pw.empty()) break;
    fact *= m;
    for (const auto& [w, c] : pw) r[w] += c / fact;
  }
  drop_zeros(r);
  return r;
}

AssocPoly assoc_log(const AssocPoly& x, int q) {
  AssocPoly u = x;
  auto it = u.find("");
  if (it == u.end() || it->second != 1)
    throw std::invalid_argument("assoc_log: constant term must be 1");
  u.erase(it);
  AssocPoly r;
  AssocPoly pw{{"", 1}};
  for (int m = 1; m <= q; ++m) {
    pw = assoc_mul(pw, u, q);
    if (pw.empty()) break;
    const Rational coeff = Rational(m % 2 == 1 ? 1 : -1) / m;
    for (const auto& [w, c] : pw) r[w] += coeff * c;
  }
  drop_zeros(r);
  return r;
}

bool is_lyndon(const Word& w) {
  if (w.empty()) return false;
  for (size_t i = 1; i < w.size(); ++i)
    if (w.compare(w.substr(i)) >= 0) return false;
  return true;
}

std::vector<Word> lyndon_words(int k, int n) {
  std::vector<Word> out;
  if (k <= 0 || n <= 0) return out;
  Word w(static_cast<size_t>(n), 'a');
  while (true) {
    if (is_lyndon(w)) out.push_back(w);
    int pos = n - 1;
    while (pos >= 0 && w[static_cast<size_t>(pos)] == 'a' + k - 1) {
      w[static_cast<size_t>(pos)] = 'a';
      --pos;
    }
    if (pos < 0) break;
    ++w[static_cast<size_t>(pos)];
  }
  return out;
}

std::pair<Word, Word> standard_factorization(const Word& w) {
  if (w.size() < 2)
    throw std::invalid_argument("standard_factorization: word too short");
  for (size_t i = 1; i < w.size(); ++i) {
    Word v = w.substr(i);
    if (!is_lyndon(v)) continue;
    Word u = w.substr(0, i);
    if (!is_lyndon(u))
      throw std::logic_error("standard_factorization: prefix not Lyndon for " + w);
    return {u, v};
  }
  throw std::invalid_argument("standard_factorization: input is not Lyndon: " + w);
}

AssocPoly bracketing_expansion(const Word& w) {
  if (w.size() == 1) return {{w, 1}};
  auto [u, v] = standard_factorization(w);
  const int q = static_cast<int>(w.size());
  const AssocPoly eu = bracketing_expansion(u), ev = bracketing_expansion(v);
  AssocPoly r = assoc_mul(eu, ev, q);
  for (const auto& [word, c] : assoc_mul(ev, eu, q)) r[word] -= c;
  drop_zeros(r);
  return r;
}

// Express a Lie element of the associative algebra in Lyndon coordinates by
// peeling leading words (the standard bracketing of a Lyndon word is the word
// itself plus lexicographically larger ones).
std::map<Word, Rational> lyndon_coefficients(AssocPoly z) {
  std::map<Word, Rational> coeffs;
  drop_zeros(z);
  // Peel degree by degree: restrict to the smallest-length words first so the
  // triangular subtraction never mixes degrees.
  while (!z.empty()) {
    size_t deg = std::string::npos;
    for (const auto& [w, c] : z) deg = std::min(deg, w.size());
    Word best;
    for (const auto& [w, c] : z)
      if (w.size() == deg && (best.empty() || w < best)) best = w;
    if (!is_lyndon(best))
      throw std::logic_error("not a Lie element: leading word " + best);
    const Rational c = z.at(best);
    coeffs[best] = c;
    for (const auto& [word, coeff] : bracketing_expansion(best)) z[word] -= c * coeff;
    drop_zeros(z);
  }
  return coeffs;
}

std::map<Word, Rational> bch_universal(int q) {
  if (q < 1) throw std::invalid_argument("bch_universal: q must be >= 1");
  const AssocPoly a{{"a", 1}}, b{{"b", 1}};
  const AssocPoly z = assoc_log(assoc_mul(assoc_exp(a, q), assoc_exp(b, q), q), q);
  return lyndon_coefficients(z);
}

std::vector<Index> lyndon_dims(int k, int q) {
  std::vector<Index> out;
  for (int n = 1; n <= q; ++n) {
    long long sum = 0;
    for (int d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      long long pw = 1;
      for (int i = 0; i < n / d; ++i) pw *= k;
      sum += mobius(d) * pw;
    }
    out.push_back(static_cast<Index>(sum / n));
  }
  return out;
}

// ---------------------------------------------------------------------------
// NilpotentLie

Index NilpotentLie::dim(int n) const {
  auto it = surv_.find(n);
  return it == surv_.end() ? 0 : static_cast<Index>(it->second.size());
}

std::vector<Index> NilpotentLie::gr_dims() const {
  std::vector<Index> out;
  for (int n = 1; n <= q_; ++n) out.push_back(dim(n));
  return out;
}

Index NilpotentLie::free_dim(int n) const {
  auto it = words_.find(n);
  return it == words_.end() ? 0 : static_cast<Index>(it->second.size());
}

const std::vector<Word>& NilpotentLie::words(int n) const {
  static const std::vector<Word> empty;
  auto it = words_.find(n);
  return it == words_.end() ? empty : it->second;
}

const std::vector<Index>& NilpotentLie::surviving(int n) const {
  static const std::vector<Index> empty;
  auto it = surv_.find(n);
  return it == surv_.end() ? empty : it->second;
}

std::string NilpotentLie::basis_label(int n, Index i) const {
  const Word w = words(n).at(static_cast<size_t>(surviving(n).at(static_cast<size_t>(i))));
  std::function<std::string(const Word&)> lab = [&](const Word& u) -> std::string {
    if (u.size() == 1) return gens_.at(static_cast<size_t>(u[0] - 'a'));
    auto [l, r] = standard_factorization(u);
    return "[" + lab(l) + "," + lab(r) + "]";
  };
  return lab(w);
}

const Mat& NilpotentLie::projection(int n) const { return proj_.at(n); }

LieElement NilpotentLie::gen(Index i) const { return element(1, i); }

LieElement NilpotentLie::element(int n, Index i) const {
  if (n < 1 || n > q_ || i < 0 || i >= dim(n))
    throw std::invalid_argument("element: basis index out of range");
  LieElement x;
  x.comp[n] = Vec::Zero(dim(n));
  x.comp[n](i) = 1;
  return x;
}

void NilpotentLie::check_element(const LieElement& x) const {
  for (const auto& [n, v] : x.comp) {
    if (n < 1 || n > q_)
      throw std::invalid_argument("element degree " + std::to_string(n) +
                                  " outside 1.." + std::to_string(q_));
    if (v.size() != dim(n))
      throw std::invalid_argument("element does not match the algebra's dimensions at degree " +
                                  std::to_string(n));
  }
}

LieElement NilpotentLie::prune(LieElement x) const {
  for (auto it = x.comp.begin(); it != x.comp.end();) {
    if (it->second.size() == 0 || it->second.isZero())
      it = x.comp.erase(it);
    else
      ++it;
  }
  return x;
}

bool NilpotentLie::is_zero(const LieElement& x) const {
  check_element(x);
  for (const auto& [n, v] : x.comp)
    if (!v.isZero()) return false;
  return true;
}

bool NilpotentLie::equal(const LieElement& x, const LieElement& y) const {
  return is_zero(sub(x, y));
}

LieElement NilpotentLie::add(const LieElement& x, const LieElement& y) const {
  check_element(x);
  check_element(y);
  LieElement r = x;
  for (const auto& [n, v] : y.comp) {
    if (r.comp.count(n))
      r.comp[n] += v;
    else
      r.comp[n] = v;
  }
  return prune(std::move(r));
}

LieElement NilpotentLie::sub(const LieElement& x, const LieElement& y) const {
  return add(x, scale(-1, y));
}

LieElement NilpotentLie::scale(const Rational& c, const LieElement& x) const {
  check_element(x);
  if (c == 0) return {};
  LieElement r = x;
  for (auto& [n, v] : r.comp) v *= c;
  return prune(std::move(r));
}

Vec NilpotentLie::lift(int n, const Vec& x) const {
  Vec f = Vec::Zero(free_dim(n));
  const auto& s = surviving(n);
  for (Index i = 0; i < x.size(); ++i) f(s[static_cast<size_t>(i)]) = x(i);
  return f;
}

Vec NilpotentLie::free_bracket(int p, const Vec& x, int s, const Vec& y) const {
  if (p > s) return -free_bracket(s, y, p, x);
  const Mat& t = ftable_.at({p, s});
  Vec out = Vec::Zero(free_dim(p + s));
  const Index ds = free_dim(s);
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) == 0) continue;
    out += x(i) * (t.middleCols(i * ds, ds) * y);
  }
  return out;
}

LieElement NilpotentLie::bracket(const LieElement& x, const LieElement& y) const {
  check_element(x);
  check_element(y);
  LieElement r;
  for (const auto& [p, xv] : x.comp)
    for (const auto& [s, yv] : y.comp) {
      const int n = p + s;
      if (n > q_ || dim(n) == 0) continue;
      const Vec fb = free_bracket(p, lift(p, xv), s, lift(s, yv));
      if (r.comp.count(n))
        r.comp[n] += proj_.at(n) * fb;
      else
        r.comp[n] = proj_.at(n) * fb;
    }
  return prune(std::move(r));
}

LieElement NilpotentLie::eval_word(const Word& w, const LieElement& x,
                                   const LieElement& y) const {
  if (w.size() == 1) return w[0] == 'a' ? x : y;
  auto [u, v] = standard_factorization(w);
  return bracket(eval_word(u, x, y), eval_word(v, x, y));
}

LieElement NilpotentLie::bch(const LieElement& x, const LieElement& y) const {
  check_element(x);
  check_element(y);
  LieElement r;
  for (const auto& [w, c] : bchc_) r = add(r, scale(c, eval_word(w, x, y)));
  return r;
}

LieElement NilpotentLie::ad_exp(const LieElement& e, long n, const LieElement& x) const {
  check_element(e);
  check_element(x);
  LieElement r = x;
  LieElement cur = x;
  Rational fact = 1;
  for (int k = 1; k <= q_; ++k) {
    cur = bracket(e, cur);
    if (is_zero(cur)) break;
    fact *= k;
    r = add(r, scale(int_pow(-n, k) / fact, cur));
  }
  return r;
}

GroupElement NilpotentLie::mul(const GroupElement& g, const GroupElement& h) const {
  return {bch(g.log, h.log)};
}

GroupElement NilpotentLie::inverse(const GroupElement& g) const {
  return {scale(-1, g.log)};
}

GroupElement NilpotentLie::conjugate(const GroupElement& g, const GroupElement& h) const {
  return mul(mul(inverse(h), g), h);
}

LieAutomorphism NilpotentLie::inner_automorphism(const LieElement& c) const {
  check_element(c);
  LieAutomorphism phi;
  for (Index i = 0; i < static_cast<Index>(gens_.size()); ++i)
    phi.images.push_back(ad_exp(c, 1, gen(i)));
  return phi;
}

LieElement NilpotentLie::apply(const LieAutomorphism& phi, const LieElement& x) const {
  if (phi.images.size() != gens_.size())
    throw std::invalid_argument("automorphism has wrong generator image count");
  check_element(x);
  std::map<Word, LieElement> memo;
  std::function<const LieElement&(const Word&)> evalw = [&](const Word& w) -> const LieElement& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    LieElement val;
    if (w.size() == 1) {
      val = phi.images.at(static_cast<size_t>(w[0] - 'a'));
    } else {
      auto [u, v] = standard_factorization(w);
      val = bracket(evalw(u), evalw(v));
    }
    return memo.emplace(w, std::move(val)).first->second;
  };
  LieElement r;
  for (const auto& [n, v] : x.comp) {
    const auto& s = surviving(n);
    for (Index i = 0; i < v.size(); ++i) {
      if (v(i) == 0) continue;
      r = add(r, scale(v(i), evalw(words(n)[static_cast<size_t>(s[static_cast<size_t>(i)])])));
    }
  }
  return r;
}

Mat NilpotentLie::induced_matrix(const LieAutomorphism& phi, int n) const {
  Mat m = Mat::Zero(dim(n), dim(n));
  for (Index i = 0; i < dim(n); ++i) {
    const LieElement y = apply(phi, element(n, i));
    auto it = y.comp.find(n);
    if (it != y.comp.end()) m.col(i) = it->second;
  }
  return m;
}

ValidationReport NilpotentLie::validate_automorphism(const LieAutomorphism& phi) const {
  if (phi.images.size() != gens_.size())
    return {false, "generator image count mismatch"};
  try {
    for (const auto& img : phi.images) check_element(img);
  } catch (const std::invalid_argument& e) {
    return {false, e.what()};
  }
  // Relators must map into the ideal (to zero in the quotient).
  for (size_t r = 0; r < relfree_.size(); ++r) {
    std::map<Word, LieElement> memo;
    std::function<const LieElement&(const Word&)> evalw =
        [&](const Word& w) -> const LieElement& {
      auto it = memo.find(w);
      if (it != memo.end()) return it->second;
      LieElement val;
      if (w.size() == 1) {
        val = phi.images.at(static_cast<size_t>(w[0] - 'a'));
      } else {
        auto [u, v] = standard_factorization(w);
        val = bracket(evalw(u), evalw(v));
      }
      return memo.emplace(w, std::move(val)).first->second;
    };
    LieElement img;
    for (const auto& [n, v] : relfree_[r])
      for (Index j = 0; j < v.size(); ++j) {
        if (v(j) == 0) continue;
        img = add(img, scale(v(j), evalw(words(n)[static_cast<size_t>(j)])));
      }
    if (!is_zero(img))
      return {false, "relator " + std::to_string(r) + " is not sent to zero"};
  }
  // Invertibility per degree reduces to degree 1: the relator check above
  // makes phi a Lie morphism, gr is generated in degree 1, and a graded
  // morphism surjective on degree 1 is surjective (hence bijective)
  // everywhere.
  if (exactlin::rank<Rational>(induced_matrix(phi, 1)) != dim(1))
    return {false, "not invertible on degree 1"};
  return {};
}

Mat NilpotentLie::center(int n) const {
  if (n < 1 || n > q_) throw std::invalid_argument("center: degree out of range");
  if (n == q_) return Mat::Identity(dim(n), dim(n));
  const Index k = static_cast<Index>(gens_.size());
  Mat big = Mat::Zero(k * dim(n + 1), dim(n));
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < dim(n); ++j) {
      const LieElement b = bracket(gen(i), element(n, j));
      auto it = b.comp.find(n + 1);
      if (it != b.comp.end()) big.block(i * dim(n + 1), j, dim(n + 1), 1) = it->second;
    }
  return exactlin::kernel_basis<Rational>(big);
}

InnerVerdict NilpotentLie::is_inner(const LieAutomorphism& phi) const {
  const ValidationReport rep = validate_automorphism(phi);
  if (!rep.ok)
    throw std::invalid_argument("is_inner: not an automorphism: " + rep.first_violation);

  const Index k = static_cast<Index>(gens_.size());
  InnerVerdict verdict;

  // Conjugations act trivially on the associated graded; a nontrivial
  // degree-1 part already rules innerness out.
  if (induced_matrix(phi, 1) != Mat::Identity(dim(1), dim(1))) {
    verdict.obstruction_degree = 1;
    for (Index i = 0; i < k; ++i) {
      LieElement r = sub(phi.images[static_cast<size_t>(i)], gen(i));
      for (auto it = r.comp.begin(); it != r.comp.end();)
        it = it->first == 1 ? std::next(it) : r.comp.erase(it);
      verdict.residuals.push_back(r);
    }
    return verdict;
  }

  LieElement d;
  for (int n = 1; n < q_; ++n) {
    // Equation at degree n+1: [g_i, d_n] = r0_i, affine in the unknown d_n.
    std::vector<Vec> r0(static_cast<size_t>(k));
    std::vector<Mat> ad(static_cast<size_t>(k));
    for (Index i = 0; i < k; ++i) {
      const LieElement diff = sub(bch(d, phi.images[static_cast<size_t>(i)]), bch(gen(i), d));
      for (const auto& [m, v] : diff.comp)
        if (m <= n && !v.isZero())
          throw std::logic_error("is_inner: residual leaked into solved degree " +
                                 std::to_string(m));
      auto it = diff.comp.find(n + 1);
      r0[static_cast<size_t>(i)] = it == diff.comp.end() ? Vec::Zero(dim(n + 1)) : it->second;
      Mat b = Mat::Zero(dim(n + 1), dim(n));
      for (Index j = 0; j < dim(n); ++j) {
        const LieElement br = bracket(gen(i), element(n, j));
        auto jt = br.comp.find(n + 1);
        if (jt != br.comp.end()) b.col(j) = jt->second;
      }
      ad[static_cast<size_t>(i)] = std::move(b);
    }
    Vec x0 = Vec::Zero(dim(n));
    Mat kbasis = Mat::Identity(dim(n), dim(n));
    for (Index i = 0; i < k; ++i) {
      const Mat bk = ad[static_cast<size_t>(i)] * kbasis;
      const Vec rhs = r0[static_cast<size_t>(i)] - ad[static_cast<size_t>(i)] * x0;
      const auto sol = exactlin::solve<Rational>(bk, rhs);
      if (!sol) {
        verdict.obstruction_degree = n + 1;
        for (Index j = 0; j < k; ++j) {
          LieElement res;
          Vec v = r0[static_cast<size_t>(j)] - ad[static_cast<size_t>(j)] * x0;
          if (!v.isZero()) res.comp[n + 1] = v;
          verdict.residuals.push_back(res);
        }
        return verdict;
      }
      x0 += kbasis * *sol;
      kbasis = kbasis * exactlin::kernel_basis<Rational>(bk);
    }
    if (!x0.isZero()) d.comp[n] = x0;
  }

  for (Index i = 0; i < k; ++i)
    if (!equal(bch(d, phi.images[static_cast<size_t>(i)]), bch(gen(i), d)))
      throw std::logic_error("is_inner: witness failed final verification");
  verdict.inner = true;
  verdict.witness = d;
  return verdict;
}

Mat NilpotentLie::structure_table(int p, int s) const {
  Mat t = Mat::Zero(dim(p + s), dim(p) * dim(s));
  for (Index i = 0; i < dim(p); ++i)
    for (Index j = 0; j < dim(s); ++j) {
      const LieElement b = bracket(element(p, i), element(s, j));
      auto it = b.comp.find(p + s);
      if (it != b.comp.end()) t.col(i * dim(s) + j) = it->second;
    }
  return t;
}

Vec NilpotentLie::peel(int n, AssocPoly p) const {
  Vec out = Vec::Zero(free_dim(n));
  drop_zeros(p);
  const auto& idx = index_.at(n);
  while (!p.empty()) {
    const Word w = p.begin()->first;
    const Rational c = p.begin()->second;
    auto it = idx.find(w);
    if (it == idx.end())
      throw std::logic_error("peel: leading word is not Lyndon: " + w);
    out(it->second) += c;
    for (const auto& [word, coeff] : bracketing_expansion(w)) {
      p[word] -= c * coeff;
      if (p[word] == 0) p.erase(word);
    }
  }
  return out;
}

void NilpotentLie::build_free() {
  const int k = static_cast<int>(gens_.size());
  for (int n = 1; n <= q_; ++n) {
    words_[n] = lyndon_words(k, n);
    std::map<Word, Index> idx;
    for (Index i = 0; i < static_cast<Index>(words_[n].size()); ++i)
      idx[words_[n][static_cast<size_t>(i)]] = i;
    index_[n] = std::move(idx);
  }
  for (int p = 1; p <= q_; ++p)
    for (int s = p; p + s <= q_; ++s) {
      Mat t = Mat::Zero(free_dim(p + s), free_dim(p) * free_dim(s));
      for (Index i = 0; i < free_dim(p); ++i) {
        const AssocPoly eu = bracketing_expansion(words_[p][static_cast<size_t>(i)]);
        for (Index j = 0; j < free_dim(s); ++j) {
          const AssocPoly ev = bracketing_expansion(words_[s][static_cast<size_t>(j)]);
          AssocPoly comm = assoc_mul(eu, ev, p + s);
          for (const auto& [word, c] : assoc_mul(ev, eu, p + s)) comm[word] -= c;
          t.col(i * free_dim(s) + j) = peel(p + s, std::move(comm));
        }
      }
      ftable_[{p, s}] = std::move(t);
    }
  bchc_ = bch_universal(q_);
}

void NilpotentLie::apply_relators() {
  surv_.clear();
  proj_.clear();
  std::map<int, exactlin::ColumnReducer<Rational>> reducers;
  std::map<int, std::vector<Vec>> ideal;
  std::queue<std::pair<int, Vec>> work;
  auto push = [&](int n, const Vec& v) {
    if (n > q_ || v.isZero()) return;
    if (reducers[n].add(v)) {
      ideal[n].push_back(v);
      work.emplace(n, v);
    }
  };
  for (const auto& rel : relfree_)
    for (const auto& [n, v] : rel) push(n, v);
  const int k = static_cast<int>(gens_.size());
  while (!work.empty()) {
    auto [n, v] = work.front();
    work.pop();
    if (n + 1 > q_) continue;
    for (int i = 0; i < k; ++i) {
      Vec e = Vec::Zero(free_dim(1));
      e(i) = 1;
      push(n + 1, free_bracket(1, e, n, v));
    }
  }
  for (int n = 1; n <= q_; ++n) {
    const Index fd = free_dim(n);
    const auto it = ideal.find(n);
    if (it == ideal.end() || it->second.empty()) {
      std::vector<Index> all(static_cast<size_t>(fd));
      for (Index i = 0; i < fd; ++i) all[static_cast<size_t>(i)] = i;
      surv_[n] = std::move(all);
      proj_[n] = Mat::Identity(fd, fd);
      continue;
    }
    Mat m(static_cast<Index>(it->second.size()), fd);
    for (Index r = 0; r < m.rows(); ++r) m.row(r) = it->second[static_cast<size_t>(r)].transpose();
    const auto ech = exactlin::rref<Rational>(m);
    std::vector<char> is_pivot(static_cast<size_t>(fd), 0);
    for (Index c : ech.pivot_cols) is_pivot[static_cast<size_t>(c)] = 1;
    std::vector<Index> surv;
    for (Index c = 0; c < fd; ++c)
      if (!is_pivot[static_cast<size_t>(c)]) surv.push_back(c);
    Mat proj = Mat::Zero(static_cast<Index>(surv.size()), fd);
    for (Index row = 0; row < static_cast<Index>(surv.size()); ++row)
      proj(row, surv[static_cast<size_t>(row)]) = 1;
    for (Index t = 0; t < ech.rank; ++t) {
      const Index pc = ech.pivot_cols[static_cast<size_t>(t)];
      for (Index row = 0; row < static_cast<Index>(surv.size()); ++row)
        proj(row, pc) = -ech.r(t, surv[static_cast<size_t>(row)]);
    }
    surv_[n] = std::move(surv);
    proj_[n] = std::move(proj);
  }
}

NilpotentLie free_nilpotent(const std::vector<std::string>& gens, int q) {
  if (q < 1) throw std::invalid_argument("free_nilpotent: q must be >= 1");
  if (gens.size() > 26) throw std::invalid_argument("free_nilpotent: too many generators");
  std::set<std::string> uniq(gens.begin(), gens.end());
  if (uniq.size() != gens.size())
    throw std::invalid_argument("free_nilpotent: generator labels must be distinct");
  NilpotentLie l;
  l.q_ = q;
  l.gens_ = gens;
  l.build_free();
  l.apply_relators();
  return l;
}

NilpotentLie quotient(const NilpotentLie& l, const std::vector<LieElement>& relators) {
  NilpotentLie r = l;
  for (const auto& rel : relators) {
    l.check_element(rel);
    std::map<int, Vec> freecomp;
    for (const auto& [n, v] : rel.comp) {
      if (v.isZero()) continue;
      if (n < 2)
        throw std::invalid_argument("quotient: relator has a component of degree < 2");
      freecomp[n] = l.lift(n, v);
    }
    if (!freecomp.empty()) r.relfree_.push_back(std::move(freecomp));
  }
  r.apply_relators();
  return r;
}

ValidationReport validate(const NilpotentLie& l) {
  const int q = l.q();
  for (int p = 1; p <= q; ++p)
    for (int s = p; p + s <= q; ++s)
      for (Index i = 0; i < l.dim(p); ++i)
        for (Index j = 0; j < l.dim(s); ++j) {
          const auto lhs = l.bracket(l.element(p, i), l.element(s, j));
          const auto rhs = l.scale(-1, l.bracket(l.element(s, j), l.element(p, i)));
          if (!l.equal(lhs, rhs))
            return {false, "antisymmetry fails on (" + l.basis_label(p, i) + ", " +
                               l.basis_label(s, j) + ")"};
        }
  for (int p1 = 1; p1 <= q; ++p1)
    for (int p2 = p1; p1 + p2 <= q; ++p2)
      for (int p3 = p2; p1 + p2 + p3 <= q; ++p3)
        for (Index i = 0; i < l.dim(p1); ++i)
          for (Index j = 0; j < l.dim(p2); ++j)
            for (Index m = 0; m < l.dim(p3); ++m) {
              const auto x = l.element(p1, i), y = l.element(p2, j), z = l.element(p3, m);
              auto s = l.add(l.bracket(x, l.bracket(y, z)),
                             l.add(l.bracket(y, l.bracket(z, x)), l.bracket(z, l.bracket(x, y))));
              if (!l.is_zero(s))
                return {false, "Jacobi fails on (" + l.basis_label(p1, i) + ", " +
                                   l.basis_label(p2, j) + ", " + l.basis_label(p3, m) + ")"};
            }
  return {};
}

nlohmann::json to_json(const NilpotentLie& l) {
  nlohmann::json j;
  j["generators"] = l.generators();
  j["q"] = l.q();
  nlohmann::json rels = nlohmann::json::array();
  for (const auto& rel : l.relators_free()) {
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [n, v] : rel) {
      nlohmann::json arr = nlohmann::json::array();
      for (Index i = 0; i < v.size(); ++i) arr.push_back(to_string(v(i)));
      r[std::to_string(n)] = arr;
    }
    rels.push_back(r);
  }
  j["relators"] = rels;
  return j;
}

NilpotentLie lie_from_json(const nlohmann::json& j) {
  const std::vector<std::string> gens = j.at("generators").get<std::vector<std::string>>();
  const int q = j.at("q").get<int>();
  NilpotentLie base = free_nilpotent(gens, q);
  std::vector<LieElement> rels;
  for (const auto& r : j.at("relators")) {
    LieElement x;
    for (auto it = r.begin(); it != r.end(); ++it) {
      const int n = std::stoi(it.key());
      Vec v(static_cast<Index>(it.value().size()));
      for (Index i = 0; i < v.size(); ++i)
        v(i) = parse_rational(it.value()[static_cast<size_t>(i)].get<std::string>());
      x.comp[n] = v;
    }
    rels.push_back(std::move(x));
  }
  return rels.empty() ? base : quotient(base, rels);
}

nlohmann::json element_to_json(const LieElement& x) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [n, v] : x.comp) {
    nlohmann::json arr = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(to_string(v(i)));
    j[std::to_string(n)] = arr;
  }
  return j;
}

LieElement element_from_json(const nlohmann::json& j) {
  LieElement x;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const int n = std::stoi(it.key());
    Vec v(static_cast<Index>(it.value().size()));
    for (Index i = 0; i < v.size(); ++i)
      v(i) = parse_rational(it.value()[static_cast<size_t>(i)].get<std::string>());
    x.comp[n] = v;
  }
  return x;
}

}  // namespace logpi1::lie
