#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qpl/linalg.hpp"

namespace qpl {

// Binomial coefficients, cached.
long long binom(int n, int k);

// Antisymmetric degree-k tensor over an D-dimensional frame, stored
// compressed: one component per strictly increasing index tuple, colex
// ranked. A degree-k field u = (1/k!) u_{a1..ak} e_{a1}^..^e_{ak} stores
// u_{a1<..<ak}; e.g. the Cartan 3-tensor stores (1/2) f_{abc} at a<b<c.
struct AltTensor {
  int dim = 0;
  int deg = 0;
  RVec c;

  AltTensor() = default;
  AltTensor(int D, int k) : dim(D), deg(k), c(RVec::Zero(binom(D, k))) {}

  static AltTensor scalar(int D, double v) {
    AltTensor t(D, 0);
    t.c[0] = v;
    return t;
  }
  static AltTensor vector(const RVec& v) {
    AltTensor t(static_cast<int>(v.size()), 1);
    t.c = v;
    return t;
  }

  double norm() const { return c.norm(); }
  bool same_shape(const AltTensor& o) const { return dim == o.dim && deg == o.deg; }

  AltTensor& operator+=(const AltTensor& o) { c += o.c; return *this; }
  AltTensor& operator-=(const AltTensor& o) { c -= o.c; return *this; }
  AltTensor& operator*=(double s) { c *= s; return *this; }
  friend AltTensor operator+(AltTensor a, const AltTensor& b) { a += b; return a; }
  friend AltTensor operator-(AltTensor a, const AltTensor& b) { a -= b; return a; }
  friend AltTensor operator*(double s, AltTensor a) { a *= s; return a; }
};

// Colex rank of a strictly increasing tuple; unrank inverse.
int combo_rank(const int* idx, int k);
void combo_unrank(int r, int k, int* idx_out);

// Signed access with an arbitrary index tuple (returns 0 on repeats).
double alt_get(const AltTensor& t, const int* idx);
void alt_add(AltTensor& t, const int* idx, double v);

AltTensor wedge(const AltTensor& a, const AltTensor& b);

// Left Grassmann derivative d/d theta^a (front-slot interior product with
// the a-th dual frame element).
AltTensor interior_left(const AltTensor& t, int a);
// Right Grassmann derivative: (-1)^{deg-1} * interior_left on degree deg.
AltTensor interior_right(const AltTensor& t, int a);
// Front-slot contraction with a covector: iota_w u, (iota_w u)(..) = u(w,..).
AltTensor contract_covector(const AltTensor& t, const RVec& w);

// Pushforward through a linear map J (rows: target frame, cols: source
// frame): Lambda^k(J). J may be rectangular.
AltTensor pushforward(const AltTensor& t, const RMat& J);
// Derivative of pushforward: sum over slots with one J-column pass replaced
// by dJ (product rule through the minors).
AltTensor pushforward_derivative(const AltTensor& t, const RMat& J, const RMat& dJ);

// Hodge-type complement against the unit frame volume: for a sorted tuple A,
// star(e_A) = sign(A, A^c) e_{A^c} with sign the permutation sign of (A,A^c).
AltTensor star_complement(const AltTensor& t);
// Inverse of star_complement (star is an involution up to (-1)^{k(D-k)}).
AltTensor star_complement_inv(const AltTensor& t);

// Degree-2 helpers: full antisymmetric matrix with entries u_{ab}.
RMat deg2_matrix(const AltTensor& t);
AltTensor deg2_from_matrix(const RMat& m);

// Value of a degree-k tensor on k covectors (rows of W, k x dim).
double eval_on_covectors(const AltTensor& t, const RMat& W);

}  // namespace qpl
