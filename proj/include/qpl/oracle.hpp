#pragma once

#include "qpl/field.hpp"

namespace qpl {

// Independent check path for the bracket calculus. Everything here works in
// an exponential coordinate chart centered at the evaluation point, with
// dense (redundant) component arrays and plain finite differences of the
// chart transition matrices; none of it reuses the compressed-tensor wedge,
// the frame Cartan formula, or the exact derivative closures it is used to
// check against.
struct DenseTensor {
  int D = 0, k = 0;
  std::vector<double> a;  // size D^k, fully antisymmetric components

  double at(const int* idx) const;
  double at(std::initializer_list<int> idx) const;
};

DenseTensor oracle_schouten(const ModelSpace& S, const MultiVectorField& u,
                            const MultiVectorField& v, const Point& m0);
DenseTensor oracle_exterior_derivative(const ModelSpace& S, const DifferentialForm& w,
                                       const Point& m0);
// Lie bracket of two vector fields through the chart (degree-1 shortcut of
// oracle_schouten, kept separate for clarity in tests).
RVec oracle_vector_bracket(const ModelSpace& S, const MultiVectorField& x,
                           const MultiVectorField& y, const Point& m0);

// Max |oracle - production| over strictly increasing index tuples.
double oracle_max_diff(const DenseTensor& o, const AltTensor& prod);

}  // namespace qpl
