#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpl/linalg.hpp"

namespace qpl {

struct Tolerances {
  double closed_form = 1e-8;   // identities with closed-form derivative paths
  double fd_first = 1e-7;      // one finite-difference layer
  double fd_second = 1e-6;     // nested finite differences
  double rank_rel = 1e-8;      // relative singular-value threshold for rank/kernel
  double exp_drift = 1e-13;    // unitarity drift triggering polar projection
  double log_branch = 1e-8;    // phase margin to the branch cut at -1
  double natural_margin = 1e-2;  // ad-spectrum margin to 2*pi for the exp-regular domain
};

// A compact matrix group modeled concretely: orthonormal basis of the Lie
// algebra (skew-hermitian n x n matrices) under <X,Y> = -ip_scale*Re tr(XY),
// with dense structure constants f[a,b,c] = <e_a,[e_b,e_c]>.
struct GroupModel {
  std::string name;
  int n = 0;  // matrix size
  int d = 0;  // algebra dimension
  std::vector<CMat> basis;
  std::vector<double> f;  // flat d^3, index (a*d + b)*d + c
  double ip_scale = 1.0;
  bool det_one = true;    // determinant-1 constraint on group elements
  bool real_entries = false;
  Tolerances tol;

  double fc(int a, int b, int c) const { return f[(static_cast<size_t>(a) * d + b) * d + c]; }

  double inner(const CMat& x, const CMat& y) const { return -ip_scale * (x * y).trace().real(); }

  RVec coords_of(const CMat& x) const {
    RVec v(d);
    for (int a = 0; a < d; ++a) v[a] = inner(basis[a], x);
    return v;
  }

  CMat alg_of(const RVec& v) const {
    CMat x = CMat::Zero(n, n);
    for (int a = 0; a < d; ++a) x += v[a] * basis[a];
    return x;
  }

  CMat bracket(const CMat& x, const CMat& y) const { return x * y - y * x; }

  // (ad_xi)_{ab} = -f_{abc} xi_c, so that ad_xi e_b = [xi, e_b] expands with
  // the column convention A e_b = A_{ab} e_a.
  RMat ad(const RVec& xi) const {
    RMat m = RMat::Zero(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0;
        for (int c = 0; c < d; ++c) s -= fc(a, b, c) * xi[c];
        m(a, b) = s;
      }
    return m;
  }

  // (Ad_g)_{ab} = <e_a, g e_b g^{-1}>.
  RMat Ad(const CMat& g) const {
    RMat m(d, d);
    CMat gi = g.adjoint();  // unitary inverse
    for (int b = 0; b < d; ++b) {
      CMat gb = g * basis[b] * gi;
      for (int a = 0; a < d; ++a) m(a, b) = inner(basis[a], gb);
    }
    return m;
  }

  CMat exp_alg(const CMat& x) const {
    CMat g = exp_skew(x);
    if ((g.adjoint() * g - CMat::Identity(n, n)).norm() > tol.exp_drift) g = unitarize(g);
    return g;
  }
  CMat exp_coords(const RVec& v) const { return exp_alg(alg_of(v)); }

  CMat log_group(const CMat& g) const { return log_unitary(g, tol.log_branch); }
  RVec log_coords(const CMat& g) const { return coords_of(log_group(g)); }

  // Exp-regular domain: no ad-eigenvalue magnitude at or beyond 2*pi - margin.
  bool in_natural_domain(const RVec& xi) const {
    RVec mu = antisym_spectrum(ad(xi));
    for (int k = 0; k < mu.size(); ++k)
      if (std::abs(mu[k]) >= 2 * M_PI - tol.natural_margin) return false;
    return true;
  }
};

using ModelPtr = std::shared_ptr<const GroupModel>;

ModelPtr build_model(const std::string& kind);

// Analytic function of ad_xi with removable singularities handled by the
// caller-supplied fn (see nu_fn / phi_fn). Throws on poles at spectral points.
RMat analytic_of_ad(const GroupModel& G, const RVec& xi, const std::function<cxd(cxd)>& fn);

// nu(s) = s/(1-e^{-s}) and phi(s) = 1/s - (1/2)coth(s/2), with series
// evaluation for |s| < 1e-3 (degree <= 8) and spectral elsewhere.
cxd nu_fn(cxd s);
cxd phi_fn(cxd s);

struct CentralizerSplit {
  RMat h_basis;     // d x k, orthonormal coordinate columns spanning the centralizer algebra
  RMat perp_basis;  // d x (d-k)
  RMat proj_h;      // d x d orthogonal projector
  RMat proj_perp;
  int dim_h = 0;
};

// Kernel/complement of (Ad_g - I) with the relative singular-value threshold.
CentralizerSplit centralizer_split(const GroupModel& G, const CMat& g);

// Structure constants of the centralizer subalgebra embedded in ambient
// indices: f^h_{abc} = <P e_a, [P e_b, P e_c]> with P the projector onto h.
std::vector<double> embedded_subalgebra_f(const GroupModel& G, const RMat& proj_h);

// Model of the connected subgroup whose algebra is spanned by the orthonormal
// coordinate columns of h_basis. Inherits the ambient matrix size, inner
// product and tolerances; structure constants are recomputed intrinsically.
GroupModel subgroup_model(const GroupModel& G, const RMat& h_basis, const std::string& name);

// JSON model descriptor (bit-exact round trip).
std::string model_to_json(const GroupModel& G);
GroupModel model_from_json(const std::string& text);

// Seeded sampling. Algebra elements are Gaussian, rescaled to stay well
// inside the principal log branch; group elements are their exponentials.
RVec random_algebra(const GroupModel& G, std::mt19937_64& rng, double scale = 0.6);
CMat random_group(const GroupModel& G, std::mt19937_64& rng, double scale = 0.6);

}  // namespace qpl
