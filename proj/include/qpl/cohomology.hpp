#pragma once

#include <functional>
#include <random>

#include "qpl/qp.hpp"
#include "qpl/schouten.hpp"

namespace qpl {

// Volume structure on a model space: a positive density against the unit
// left-frame volume theta^1 ^ ... ^ theta^D.  Density 1 is the bi-invariant
// volume on group factors (the models are compact, hence unimodular) and the
// Lebesgue volume on algebra factors.  ddensity(m, dir) differentiates the
// density along the frame flow in global direction dir.
struct VolumeStructure {
  std::function<double(const Point&)> density;
  std::function<double(const Point&, int)> ddensity;
  bool exact = true;
};

VolumeStructure frame_volume(const ModelSpace& S);

// Multiply a volume by exp(logf) for a degree-0 field logf.  Keeping the
// logarithm as the input makes positivity automatic and the flow derivative
// exact when logf.dcoeff is exact.
VolumeStructure rescale_volume(const VolumeStructure& V, const MultiVectorField& logf);

// Degree-0 field ln f = Re tr(g_factor): a smooth conjugation-invariant
// function of one group factor, with closed-form frame derivatives.  Used as
// the stock gauge function for volume rescaling.
MultiVectorField log_trace_gauge(const ModelSpace& S, int factor);

// Lie algebra homology boundary on constant multivectors:
//   del(x_1 ^ ... ^ x_k) = sum_{i<j} (-1)^{i+j} [x_i, x_j] ^ x_1 ... ^x_i ... ^x_j ... x_k.
// Degrees 0 and 1 map to zero.  del o del = 0 by the Jacobi identity.
AltTensor algebra_boundary(const GroupModel& G, const AltTensor& beta);

// Generating operator of the volume: del_mu u = -(*_mu)^{-1} d (*_mu u) where
// *_mu u = iota_u mu.  Lowers degree by one, squares to zero, and generates
// the Schouten bracket:
//   [u, v] = (-1)^{|u|} (del_mu(u ^ v) - del_mu(u) ^ v - (-1)^{|u|} u ^ del_mu(v)).
// On a vector field it returns minus the mu-divergence.
AltTensor bv_apply(const ModelSpace& S, const FrameAlgebra& FA, const VolumeStructure& V,
                   const MultiVectorField& u, const Point& m);
AltTensor bv_apply(const ModelSpace& S, const VolumeStructure& V, const MultiVectorField& u,
                   const Point& m);

// Field wrapper around bv_apply; the derivative layer is finite-difference.
MultiVectorField bv_field(const ModelSpace& S, const VolumeStructure& V,
                          const MultiVectorField& u);

// Modular vector field X_mu = del_mu P.  For invariant mu it commutes with
// the generating vector fields and is closed for d_P = [P, .]; rescaling the
// volume by exp(logf) shifts it by [P, logf].
MultiVectorField modular_field(const QuasiPoissonSpace& X, const VolumeStructure& V);

struct ModularReport {
  double invariance = 0.0;  // max |[xi_M, X_mu]| over sampled xi and points
  double cocycle = 0.0;     // max |[P, X_mu]| over sampled points
};

ModularReport modular_residuals(const QuasiPoissonSpace& X, const VolumeStructure& V,
                                std::mt19937_64& rng, int npoints);

// Invariance certificate for a multivector field: max |[xi_M, u]| over
// sampled points, slots and directions xi.
double invariance_residual(const QuasiPoissonSpace& X, const MultiVectorField& u,
                           std::mt19937_64& rng, int npoints);

}  // namespace qpl
