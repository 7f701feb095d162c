#pragma once

#include "qpl/qp.hpp"

namespace qpl {

// Directional derivative of xi -> T(xi) along coordinate `dir`, through the
// shared finite-difference engine.
RMat dynamical_T_deriv_fd(const GroupModel& G, const RVec& xi, int dir,
                          const DerivativeEngine& eng = default_engine());
// Independent complex-step derivative: T extends holomorphically near real
// arguments, so Im T(xi + i h e_dir) / h differentiates without subtractive
// cancellation.  Accuracy is limited by the complex eigensolver backward
// error (~1e-9 at the default step), not by the step size.
RMat dynamical_T_deriv_cs(const GroupModel& G, const RVec& xi, int dir, double h = 1e-6);

// Max-entry residual of the classical dynamical Yang-Baxter identity
//   Cycl_{abc}( dT_{ab}/dxi_c + T_{ak} f_{kbl} T_{lc} ) - (1/4) f_{abc},
// with the derivative taken by finite differences or by complex step.
double cdybe_residual(const GroupModel& G, const RVec& xi, bool complex_step = false,
                      const DerivativeEngine& eng = default_engine());

// Max residual over basis directions of the frame identity tying T to the
// exponential chart: ad_xi T e_a = (1 - (1/2) nu(ad_xi)(1 + e^{-ad_xi})) e_a,
// i.e. T's contraction with the adjoint generators reproduces the defect
// between the coordinate frame and the averaged chart frames.
double tab_identity_residual(const GroupModel& G, const RVec& xi);

// Scalar companion identity (1/2)(nu(s) + nu(-s)) = 1 - s phi(s).
double nu_phi_scalar_residual(double s);

// Slice of the conjugation action at a base point: the centralizer subgroup
// H with algebra h = ker(Ad_base - I), the orthonormal h / h-perp splitting,
// and a certified radius within which Ad_h - I stays invertible on h-perp.
// (For non-abelian H the kernel of Ad_h - I at generic slice points is
// strictly smaller than h; invertibility transverse to h is the condition
// that matters, and it is what the radius search monitors.)
struct Slice {
  ModelPtr G;
  CMat base;                  // base point; central in H by construction
  GroupModel H;               // centralizer subgroup model
  RMat h_basis;               // d x k, orthonormal columns
  RMat hperp_basis;           // d x (d-k)
  std::vector<double> f_sub;  // structure constants of h in ambient indices
  double radius = 0;          // certified ball radius in H exp-coordinates
  double sigma_floor = 0;     // min singular value of (Ad_h - I)|perp over the ball

  int dim_h() const { return static_cast<int>(h_basis.cols()); }
  // base * exp_H(w); callers keep |w| <= radius.
  CMat point(const RVec& w) const;
};

Slice make_slice(ModelPtr G, const CMat& base, unsigned seed = 17);

// r(h) = -(1/2)(Ad_h + 1)(Ad_h - 1)^{-1} compressed to h-perp and zero on h,
// as an antisymmetric d x d matrix in ambient coordinates.  Throws
// std::domain_error when Ad_h - I degenerates on h-perp.
RMat slice_r(const Slice& S, const CMat& h);

// Max-entry residual of the mixed Yang-Baxter identity for r at h:
//   Cycl_{abc}( (1/2) D_a r_{bc} + r_{ak} f_{kbl} r_{lc} )
//     - (1/4)(f_{abc} - f^h_{abc}),
// where D_a differentiates along the h-projected sum of the two frame
// fields of direction a.
double ev2_residual(const Slice& S, const CMat& h,
                    const DerivativeEngine& eng = default_engine());

// Splitting checks for a single-slot Hamiltonian space whose moment value at
// m lies in the slice.  Covectors split into moment pullbacks of h-perp
// directions and annihilators of the embedded normal directions; the
// bivector must not pair the two families, and its normal-normal pairings
// must reproduce -Phi^* r.
double splitting_orthogonality_residual(const QuasiPoissonSpace& X, const Slice& S,
                                        const Point& m);
double perp_block_residual(const QuasiPoissonSpace& X, const Slice& S, const Point& m);

// Cross-section of the canonical space (G, P_G) over the slice: a
// quasi-Poisson space over the centralizer model whose bivector is the
// tangential restriction of P_G and whose moment is the inclusion.
QuasiPoissonSpace cross_section_space(const Slice& S);

// The same cross-section with the recentered moment h -> base^{-1} h fed
// through the log construction, yielding a Hamiltonian Poisson H-space.
QuasiPoissonSpace poisson_cross_section_space(const Slice& S);

}  // namespace qpl
