#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace qpl {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline double frob(const CMat& a) { return a.norm(); }

inline bool is_unitary(const CMat& u, double tol = 1e-10) {
  return (u.adjoint() * u - CMat::Identity(u.rows(), u.cols())).norm() <= tol;
}

inline bool is_skew_hermitian(const CMat& x, double tol = 1e-10) {
  return (x + x.adjoint()).norm() <= tol;
}

// Nearest unitary in Frobenius norm, via polar decomposition.
inline CMat unitarize(const CMat& a) {
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Unitary eigendecomposition of a skew-hermitian matrix: x = V diag(i*omega) V^dag
// with omega real. Returned via out-params; V is exactly unitary.
inline void skew_eig(const CMat& x, RVec& omega, CMat& V) {
  // i*x is hermitian; its (real) eigenvalues lambda give x-eigenvalues -i*lambda.
  Eigen::SelfAdjointEigenSolver<CMat> es(cxd(0, 1) * x);
  if (es.info() != Eigen::Success) throw std::runtime_error("skew_eig: eigensolver failed");
  omega = -es.eigenvalues(); // x = V diag(i*omega) V^dag
  V = es.eigenvectors();
}

// exp of a skew-hermitian matrix (exact up to roundoff, result unitary).
inline CMat exp_skew(const CMat& x) {
  RVec omega;
  CMat V;
  skew_eig(x, omega, V);
  CVec ph(omega.size());
  for (int k = 0; k < omega.size(); ++k) ph[k] = std::exp(cxd(0, omega[k]));
  return V * ph.asDiagonal() * V.adjoint();
}

// Eigenvalues of a unitary matrix together with a unitary diagonalizer,
// via the complex Schur form (diagonal for normal matrices).
inline void unitary_eig(const CMat& u, CVec& lam, CMat& Q) {
  Eigen::ComplexSchur<CMat> schur(u, true);
  if (schur.info() != Eigen::Success) throw std::runtime_error("unitary_eig: Schur failed");
  lam = schur.matrixT().diagonal();
  Q = schur.matrixU();
}

// Principal logarithm of a unitary matrix. Eigenvalue phases are taken in
// (-pi, pi); an eigenvalue within `branch_margin` of -1 is a branch-cut hit.
inline CMat log_unitary(const CMat& u, double branch_margin = 1e-8) {
  CVec lam;
  CMat Q;
  unitary_eig(u, lam, Q);
  CVec lg(lam.size());
  for (int k = 0; k < lam.size(); ++k) {
    const double th = std::arg(lam[k]);
    if (std::abs(std::abs(th) - M_PI) < branch_margin)
      throw std::domain_error("log_unitary: eigenvalue " + std::to_string(lam[k].real()) + "+" +
                              std::to_string(lam[k].imag()) + "i on the branch cut");
    lg[k] = cxd(0, th);
  }
  CMat out = Q * lg.asDiagonal() * Q.adjoint();
  return 0.5 * (out - out.adjoint()); // exact skew-hermitian projection
}

// Sorted principal eigenphases of a unitary matrix (conjugation invariant).
inline RVec eigenphases(const CMat& u) {
  CVec lam;
  CMat Q;
  unitary_eig(u, lam, Q);
  RVec th(lam.size());
  for (int k = 0; k < lam.size(); ++k) th[k] = std::arg(lam[k]);
  std::sort(th.data(), th.data() + th.size());
  return th;
}

// Apply an analytic function to a real antisymmetric matrix through its
// spectrum (i*ad is hermitian). fn must map conjugate pairs to conjugate
// values for the result to be real; the imaginary residue is returned.
inline RMat spectral_apply_antisym(const RMat& ad, const std::function<cxd(cxd)>& fn,
                                   double* imag_residue = nullptr) {
  const int n = static_cast<int>(ad.rows());
  CMat K = cxd(0, 1) * ad.cast<cxd>();
  Eigen::SelfAdjointEigenSolver<CMat> es(K);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_apply_antisym: eig failed");
  CVec vals(n);
  for (int k = 0; k < n; ++k) vals[k] = fn(cxd(0, -es.eigenvalues()[k])); // ad-eigenvalue
  CMat out = es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
  if (imag_residue) *imag_residue = out.imag().norm();
  return out.real();
}

// Eigenvalues of a real antisymmetric matrix are i*mu with mu real.
inline RVec antisym_spectrum(const RMat& ad) {
  CMat K = cxd(0, 1) * ad.cast<cxd>();
  Eigen::SelfAdjointEigenSolver<CMat> es(K);
  return -es.eigenvalues(); // mu sorted descending by construction of -lambda
}

}  // namespace qpl
