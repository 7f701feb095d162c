#pragma once

#include "qpl/qp.hpp"

namespace qpl {

// Orthonormal basis of the geometric tangent space at m, as a D x Dt block
// matrix: identity blocks for plain factors, an orthonormal basis of the
// conjugation-orbit tangent im(Ad_{g^-1} - I) for class-tagged factors.
RMat tangent_basis(const ModelSpace& S, const Point& m);

// Pointwise solve for the invariant 2-form compatible with the bivector of
// a Hamiltonian space. In the tangent frame at m, with B the bivector
// matrix, G_s the slot generators, R_s the right-trivialized moment
// tangents and Ad_s = Ad_{Phi_s}, the antisymmetric unknown W satisfies
//   B W = I - (1/4) sum_s G_s (Ad_s^{-1} - I) R_s        (composition)
//   W^T G_s = (1/2) R_s^T (I + Ad_s)                     (contraction)
// jointly by least squares. The solution is unique at non-degenerate
// points; degenerate points raise std::domain_error naming the corank.
struct OmegaSolveReport {
  RMat W;                        // ambient D x D, padded back from the tangent frame
  double defining_residual = 0;  // composition condition
  double moment_residual = 0;    // contraction condition
  int solve_kernel = 0;          // null directions of the joint solve
};
OmegaSolveReport omega_matrix_at(const QuasiPoissonSpace& X, const Point& m);

// Residuals of the two conditions above for a candidate ambient W at m.
double defining_residual_at(const QuasiPoissonSpace& X, const RMat& W, const Point& m);
double moment_form_residual_at(const QuasiPoissonSpace& X, const RMat& W, const Point& m);

// Kernel dimension of W restricted to the tangent frame, and the dimension
// the contraction condition forces on it: the span of the generating fields
// of ker(1 + Ad_{Phi_s}) over all slots.
int omega_kernel_dim(const QuasiPoissonSpace& X, const RMat& W, const Point& m);
int expected_kernel_dim(const QuasiPoissonSpace& X, const Point& m);

// The 2-form field of a non-degenerate Hamiltonian space, with residuals
// certified over seeded samples.
struct TwoFormStructure {
  DifferentialForm omega;
  double defining_residual = 0;
  double moment_residual = 0;
};
TwoFormStructure omega_from_P(const QuasiPoissonSpace& X, std::mt19937_64& rng,
                              int npoints = 8);

// Inverse direction: rebuild the bivector from a compatible 2-form by the
// same joint solve read the other way. Action, moments and sampler carry
// over; the bivector is replaced.
QuasiPoissonSpace P_from_omega(const QuasiPoissonSpace& X, const DifferentialForm& omega);

// Closed-form invariant 2-form of the two-factor double:
// -(1/2)(theta_a^{1,L} ^ theta_a^{2,R} + theta_a^{1,R} ^ theta_a^{2,L}),
// i.e. blocks [[0, -M], [M^T, 0]] with M = (1/2)(Ad_{a2} + Ad_{a1^-1}).
DifferentialForm double_two_form(const QuasiPoissonSpace& X);

// Pullback through the moment maps of the bi-invariant 3-form
// (1/12) f_abc theta_a^R ^ theta_b^R ^ theta_c^R, summed over slots; the
// exterior derivative of the compatible 2-form must equal it.
AltTensor eta_pullback_at(const QuasiPoissonSpace& X, const Point& m);

// Fusion of a compatible 2-form along two slots of X:
// omega - (1/2) Phi_i^* theta_a^L ^ Phi_j^* theta_a^R. The result is
// compatible with the bivector of fuse(X, slot_i, slot_j).
DifferentialForm fusion_two_form(const QuasiPoissonSpace& X, const DifferentialForm& omega,
                                 int slot_i, int slot_j);

}  // namespace qpl
