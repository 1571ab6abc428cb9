#pragma once

#include "logpi1/exactlin.hpp"
#include "logpi1/rational.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <utility>

namespace logpi1::cdga {

using exactlin::GradedSpace;
using exactlin::Index;

// Graded-commutative dga over Q with augmentation, degrees 0..cap, products
// above the cap truncated to zero. Connected: degree 0 is spanned by the unit.
struct Cdga {
  int cap = 3;
  GradedSpace space;
  std::map<int, Mat> diff;  // diff[n]: dim(n+1) x dim(n)
  // mult[{p,q}]: dim(p+q) x (dim(p)*dim(q)); column i*dim(q)+j is the product
  // of basis element i of degree p with basis element j of degree q.
  std::map<std::pair<int, int>, Mat> mult;
  Vec augmentation;  // functional on the degree-0 part
  Index unit = 0;    // index of the unit in the degree-0 basis

  Index unitIndex() const { return unit; }
  Index dim(int n) const { return space.dim(n); }
  Mat d(int n) const;
  // Product of basis elements, as coordinates in degree p+q. Handles the unit,
  // the cap, and graded commutativity for tables stored with p <= q.
  Vec product(int p, Index i, int q, Index j) const;
  // Bilinear extension.
  Vec multiply(int p, const Vec& x, int q, const Vec& y) const;

  exactlin::Complex<Rational> complex() const;
};

struct ValidationReport {
  bool ok = true;
  std::string first_violation;
};

ValidationReport validate(const Cdga& a);

// Degree-preserving algebra map; matrices indexed by degree.
struct CdgaMorphism {
  exactlin::GradedMap<Rational> f;
  Mat at(const Cdga& src, const Cdga& tgt, int n) const {
    return f.at(n, tgt.dim(n), src.dim(n));
  }
};

ValidationReport validate_morphism(const Cdga& src, const Cdga& tgt, const CdgaMorphism& m);

// Stock models: the cohomology algebras of the curve components.
Cdga marked_curve_model(int g, int r);  // requires r >= 1
Cdga unmarked_curve_model(int g);       // requires g >= 1

struct IntervalTensor {
  Cdga algebra;       // R(t,dt)_{<=D} (x) A
  CdgaMorphism p0;    // t -> 0, dt -> 0
  CdgaMorphism p1;    // t -> 1, dt -> 0
};

IntervalTensor tensor_with_interval(const Cdga& a, int cap_d);

nlohmann::json to_json(const Cdga& a);
Cdga cdga_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Mat& m);
Mat matrix_from_json(const nlohmann::json& j, Index rows, Index cols);

}  // namespace logpi1::cdga
