#pragma once

#include "qpl/field.hpp"

namespace qpl {

// Global nonzero structure constants of the frame algebra: every ordering of
// every nonzero f_{abc}, in global indices. Group factors contribute their
// model's constants; algebra factors use the flat coordinate frame and
// contribute nothing.
struct FrameAlgebra {
  struct Nz {
    int a, b, c;
    double v;
  };
  std::vector<Nz> nz;
};

FrameAlgebra frame_algebra(const ModelSpace& S);

// Schouten bracket of multivector fields, evaluated at a point. For degrees
// (p,q) the value has degree p+q-1 and satisfies
//   [u,v] = -(-1)^{(p-1)(q-1)} [v,u],
//   [u, v^w] = [u,v]^w + (-1)^{(p-1)q} v^[u,w],
// normalized so that on vector fields it is the Lie bracket, [X,f] = Xf, and
// on a bivector [P,f] = -(contraction of df into P).
AltTensor schouten(const ModelSpace& S, const FrameAlgebra& FA, const MultiVectorField& u,
                   const MultiVectorField& v, const Point& m);
AltTensor schouten(const ModelSpace& S, const MultiVectorField& u, const MultiVectorField& v,
                   const Point& m);

// Exterior derivative of a form in the left coframe: frame Cartan formula
// with the Maurer-Cartan correction on group factors.
AltTensor exterior_derivative(const ModelSpace& S, const FrameAlgebra& FA,
                              const DifferentialForm& w, const Point& m);
AltTensor exterior_derivative(const ModelSpace& S, const DifferentialForm& w, const Point& m);

// Field wrappers (derivatives by finite differences).
MultiVectorField schouten_field(const ModelSpace& S, const MultiVectorField& u,
                                const MultiVectorField& v);
DifferentialForm d_field(const ModelSpace& S, const DifferentialForm& w);

// Matrix of the sharp map of a bivector: column r is the coefficient vector
// of iota_{theta^r} P, i.e. sharp = (full matrix of P)^T.
RMat sharp_matrix(const AltTensor& P2);

}  // namespace qpl
