#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpl/check.hpp"
#include "qpl/field.hpp"
#include "qpl/schouten.hpp"
#include "qpl/word.hpp"

namespace qpl {

// A manifold with an action of a product of the model groups, a bivector
// field, and (optionally) one moment component per action slot.  When
// `poisson` is false the structure equation is [P,P] = phi_M and moments are
// group valued; when true it is [P,P] = 0 with algebra-valued moments.
struct QuasiPoissonSpace {
  std::string name;
  ModelSpace S;
  ActionSpec A;
  MultiVectorField P;
  std::vector<std::optional<MomentComponent>> moments;  // one per slot
  bool poisson = false;
  std::function<Point(std::mt19937_64&)> sample;

  bool hamiltonian() const {
    for (auto& m : moments)
      if (!m) return false;
    return !moments.empty();
  }
};

// Antisymmetric part of (A+1)(A-1)^{-1} for orthogonal A, taken on the
// spectral complement of the eigenvalue-1 cluster and zero on the cluster.
// Eigenvalues lambda with |lambda-1| <= delta count as the cluster.  Uses
// only symmetric eigenproblems, so clustered spectra stay stable.
RMat cayley_orthogonal(const RMat& A, double delta);

// phi(ad_xi) with phi(s) = 1/s - coth(s/2)/2, the classical dynamical
// r-matrix kernel.  Throws std::domain_error when ad_xi has an eigenvalue
// at a pole of coth(s/2), i.e. outside the exp-regular domain.
RMat dynamical_T(const GroupModel& G, const RVec& xi);

// One-factor space of the algebra with its flat coordinate frame.
ModelSpace algebra_space(ModelPtr G);

// --- constructors -------------------------------------------------------

// (G, P_G) with P_G = (1/2) e_a^R ^ e_a^L, conjugation action, moment = id.
QuasiPoissonSpace canonical_group_space(ModelPtr G);

// The dual g* identified with g: linear Poisson structure, adjoint action,
// moment = identity of g (algebra valued).
QuasiPoissonSpace linear_poisson_space(ModelPtr G);

// Conjugacy class through g0 with the standard non-degenerate structure;
// points stay on the class, the bivector extends the class formula by the
// orbit generators so ambient residuals certify the intrinsic ones.
QuasiPoissonSpace conjugacy_class_space(ModelPtr G, const CMat& g0);

// Internally fused double D(G) = G x G with the two-sided G x G action and
// moments (a1 a2, a1^-1 a2^-1).
QuasiPoissonSpace double_DG(ModelPtr G);

// The fused double D(G) with the single conjugation-type action and the
// group commutator moment, built from its closed-form blocks.
QuasiPoissonSpace double_bold_DG(ModelPtr G);

// G with P = 0 and the (Left, Right) two-slot action, no moments; fusing
// the two slots recovers the canonical structure exactly.
QuasiPoissonSpace group_as_bi_space(ModelPtr G);

// Disjoint product: factors, slots, bivectors and moments side by side.
QuasiPoissonSpace product(const QuasiPoissonSpace& X, const QuasiPoissonSpace& Y);

// Fusion of slots i and j (order matters for the moment product):
// P -> P - psi_M(i, j), moments multiply, the merged slot replaces
// position min(i,j).
QuasiPoissonSpace fuse(const QuasiPoissonSpace& X, int slot_i, int slot_j);

// The twist R(m) = (second slot acting by the first moment value) on a
// two-slot Hamiltonian space; exchanges the two fusion orders.
SmoothMap fusion_twist(const QuasiPoissonSpace& X, int slot_i, int slot_j);

// Exponentiate a Hamiltonian Poisson space along a slot: P -> P - T_M,
// moment -> exp(moment).  Inverse direction: logarithmize.
QuasiPoissonSpace exponentiate(const QuasiPoissonSpace& X, int slot);
QuasiPoissonSpace logarithmize(const QuasiPoissonSpace& X, int slot);

// Moment component as a smooth map into a one-factor model space.
SmoothMap moment_map(const ModelSpace& S, const ModelSpace& target,
                     const MomentComponent& mc);

// --- verification -------------------------------------------------------

// Residuals of the defining identities, max over `npoints` samples:
// the structure equation, invariance of P, the moment condition per slot,
// moment equivariance, and the moment-map pushforward identity.
std::vector<Residual> certify(const QuasiPoissonSpace& X, std::mt19937_64& rng,
                              int npoints);

struct NondegReport {
  int rank = 0;       // dim of im(P#) + kernel-type generators
  int expected = 0;   // tangent dimension of the ambient leaf through m
  bool nondegenerate = false;
};

// Pointwise non-degeneracy: the span of im(P#) together with the
// generators of ker(1 + Ad_Phi) against the leaf tangent space.
NondegReport nondegeneracy(const QuasiPoissonSpace& X, const Point& m);

struct LinearizationRow {
  double t = 0;
  double residual = 0;  // |exp^*P_G(t xi) - t P_0(xi)| in chart coordinates
  double ratio2 = 0;    // residual / t^2
  double ratio3 = 0;    // residual / t^3
};

// Scaling of the exponential chart pullback against the linear structure.
std::vector<LinearizationRow> linearization_check(const GroupModel& G,
                                                  const RVec& xi,
                                                  const std::vector<double>& ts);

}  // namespace qpl
