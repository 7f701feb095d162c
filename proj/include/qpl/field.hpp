#pragma once

#include <functional>

#include "qpl/space.hpp"

namespace qpl {

// Finite-difference engine: 4th-order central stencil with one Richardson
// extrapolation level by default.
struct DerivativeEngine {
  double h = 1e-4;
  int order = 4;        // 2 or 4
  bool richardson = true;

  // d/dt at t=0 of a vector-valued curve.
  RVec deriv(const std::function<RVec(double)>& f) const;
  double deriv_scalar(const std::function<double(double)>& f) const;
};

inline const DerivativeEngine& default_engine() {
  static DerivativeEngine e;
  return e;
}

// A multivector field (or differential form; same storage, the degree-k
// coefficient array is read against the global left frame / coframe).
// coeff evaluates the array at a point; dcoeff gives its directional
// derivative along the frame flow of a global direction. Fields whose
// coefficients are polynomial in adjoint entries carry exact dcoeff
// (exact = true); others fall back to the FD engine.
struct MultiVectorField {
  int deg = 0;
  std::function<AltTensor(const Point&)> coeff;
  std::function<AltTensor(const Point&, int)> dcoeff;
  bool exact = false;
};

using DifferentialForm = MultiVectorField;

// Wrap an FD dcoeff around a coefficient evaluator.
MultiVectorField with_fd_derivative(const ModelSpace& S, int deg,
                                    std::function<AltTensor(const Point&)> coeff,
                                    const DerivativeEngine& eng = default_engine());

MultiVectorField mvf_constant(const ModelSpace& S, const AltTensor& value);
MultiVectorField mvf_add(const MultiVectorField& a, const MultiVectorField& b);
MultiVectorField mvf_sub(const MultiVectorField& a, const MultiVectorField& b);
MultiVectorField mvf_scale(double s, const MultiVectorField& a);
MultiVectorField mvf_wedge(const MultiVectorField& a, const MultiVectorField& b);
// Scalar-function multiple; pass dfn (directional derivatives) to keep exactness.
MultiVectorField mvf_scale_fn(std::function<double(const Point&)> fn,
                              std::function<double(const Point&, int)> dfn,
                              const MultiVectorField& a, const ModelSpace& S);

// Frame fields. Left frame fields are constant; right frame fields have
// Ad-polynomial coefficients (exact derivatives).
MultiVectorField left_frame_field(const ModelSpace& S, int global_dir);
MultiVectorField right_frame_field(const ModelSpace& S, int factor, int a);
// Left/right coframe pullbacks of a constant covector on one factor.
MultiVectorField left_coframe_field(const ModelSpace& S, int factor, int a);
MultiVectorField right_coframe_field(const ModelSpace& S, int factor, int a);

// Field generated by a constant element beta of Lambda^k(g_s) through one
// action slot, or of Lambda^k(sum of slot algebras) through all slots.
MultiVectorField generated_field(const ModelSpace& S, const ActionSpec& A, int slot,
                                 const AltTensor& beta);
MultiVectorField generated_field_all(const ModelSpace& S, const ActionSpec& A,
                                     const AltTensor& beta);
// Generated field with a point-dependent element (e.g. pulled back through a
// moment map); dbeta may be null (falls back to FD on the whole coefficient).
MultiVectorField generated_field_fn(const ModelSpace& S, const ActionSpec& A, int slot, int deg,
                                    std::function<AltTensor(const Point&)> beta,
                                    std::function<AltTensor(const Point&, int)> dbeta);

// Cartan 3-tensor of one slot group as a constant array over its algebra:
// stored components (1/2) f_{abc} at a < b < c.
AltTensor cartan_tensor(const GroupModel& G);
// Its generated trivector field, summed over all slots.
MultiVectorField cartan_field(const ModelSpace& S, const ActionSpec& A);

// Fused-pair bivector psi = (1/2) sum_a (e_a)^{slot i} wedge (e_a)^{slot j}.
MultiVectorField psi_field(const ModelSpace& S, const ActionSpec& A, int slot_i, int slot_j);

// A smooth map between model spaces carrying its tangent map in the global
// left frames (target rows, source columns).
struct SmoothMap {
  const ModelSpace* dom = nullptr;
  const ModelSpace* cod = nullptr;
  std::function<Point(const Point&)> value;
  std::function<RMat(const Point&)> jac;
  bool exact_jac = false;
};

// FD tangent map: columns are left-trivialized difference quotients of the
// flowed map value.
RMat fd_jacobian(const SmoothMap& F, const Point& m, const DerivativeEngine& eng = default_engine());
RMat map_jacobian(const SmoothMap& F, const Point& m);

// Pushforward of a field's value at m through F (lands at F(m)).
AltTensor pushforward_at(const MultiVectorField& u, const SmoothMap& F, const Point& m);

// Standard maps.
SmoothMap mult_map(const ModelSpace& GxG, const ModelSpace& G);       // (g1,g2) -> g1 g2
SmoothMap inversion_map(const ModelSpace& G);                          // g -> g^{-1}
SmoothMap exp_chart_map(const ModelSpace& gA, const ModelSpace& G);    // algebra -> group
SmoothMap log_chart_map(const ModelSpace& G, const ModelSpace& gA);    // group -> algebra
// Action map G (x) M -> M for the given M-action: (g, m) -> g.m, where the
// domain space is [G-factor] + M-factors and the slot acts on the M part.
SmoothMap action_map(const ModelSpace& GxM, const ModelSpace& M, const ActionSpec& MA, int slot);
// Projection onto a subset of factors (by index, in the given order).
SmoothMap factor_projection(const ModelSpace& M, const ModelSpace& Msub, std::vector<int> keep);
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

}  // namespace qpl
