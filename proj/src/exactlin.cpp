#include "logpi1/exactlin.hpp"
#include "logpi1/rational.hpp"

// Explicit instantiations of the scalar-generic core at the exact rational type.
namespace logpi1::exactlin {
template Echelon<Rational> rref<Rational>(const MatT<Rational>&);
template MatT<Rational> kernel_basis<Rational>(const MatT<Rational>&);
template MatT<Rational> choose_section<Rational>(const MatT<Rational>&);
}  // namespace logpi1::exactlin
