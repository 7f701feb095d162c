#include "qpl/field.hpp"

#include <stdexcept>

namespace qpl {

RVec DerivativeEngine::deriv(const std::function<RVec(double)>& f) const {
  auto stencil = [&](double hh) -> RVec {
    if (order == 2) return (f(hh) - f(-hh)) / (2 * hh);
    return (8.0 * (f(hh) - f(-hh)) - (f(2 * hh) - f(-2 * hh))) / (12 * hh);
  };
  RVec a = stencil(h);
  if (!richardson) return a;
  RVec b = stencil(h / 2);
  const double w = (order == 2) ? 4.0 : 16.0;
  return (w * b - a) / (w - 1.0);
}

double DerivativeEngine::deriv_scalar(const std::function<double(double)>& f) const {
  auto wrap = [&](double t) { return RVec::Constant(1, f(t)); };
  return deriv(wrap)[0];
}

MultiVectorField with_fd_derivative(const ModelSpace& S, int deg,
                                    std::function<AltTensor(const Point&)> coeff,
                                    const DerivativeEngine& eng) {
  MultiVectorField u;
  u.deg = deg;
  u.coeff = coeff;
  ModelSpace Sc = S;
  u.dcoeff = [Sc, coeff, eng, deg](const Point& m, int dir) {
    AltTensor out(Sc.D, deg);
    out.c = eng.deriv([&](double t) { return coeff(flow(Sc, m, dir, t)).c; });
    return out;
  };
  u.exact = false;
  return u;
}

MultiVectorField mvf_constant(const ModelSpace& S, const AltTensor& value) {
  MultiVectorField u;
  u.deg = value.deg;
  const int D = S.D;
  u.coeff = [value](const Point&) { return value; };
  u.dcoeff = [D, k = value.deg](const Point&, int) { return AltTensor(D, k); };
  u.exact = true;
  return u;
}

MultiVectorField mvf_add(const MultiVectorField& a, const MultiVectorField& b) {
  if (a.deg != b.deg) throw std::invalid_argument("mvf_add: degree mismatch");
  MultiVectorField u;
  u.deg = a.deg;
  u.coeff = [a, b](const Point& m) { return a.coeff(m) + b.coeff(m); };
  u.dcoeff = [a, b](const Point& m, int dir) { return a.dcoeff(m, dir) + b.dcoeff(m, dir); };
  u.exact = a.exact && b.exact;
  return u;
}

MultiVectorField mvf_sub(const MultiVectorField& a, const MultiVectorField& b) {
  return mvf_add(a, mvf_scale(-1.0, b));
}

MultiVectorField mvf_scale(double s, const MultiVectorField& a) {
  MultiVectorField u;
  u.deg = a.deg;
  u.coeff = [s, a](const Point& m) { return s * a.coeff(m); };
  u.dcoeff = [s, a](const Point& m, int dir) { return s * a.dcoeff(m, dir); };
  u.exact = a.exact;
  return u;
}

MultiVectorField mvf_wedge(const MultiVectorField& a, const MultiVectorField& b) {
  MultiVectorField u;
  u.deg = a.deg + b.deg;
  u.coeff = [a, b](const Point& m) { return wedge(a.coeff(m), b.coeff(m)); };
  u.dcoeff = [a, b](const Point& m, int dir) {
    return wedge(a.dcoeff(m, dir), b.coeff(m)) + wedge(a.coeff(m), b.dcoeff(m, dir));
  };
  u.exact = a.exact && b.exact;
  return u;
}

MultiVectorField mvf_scale_fn(std::function<double(const Point&)> fn,
                              std::function<double(const Point&, int)> dfn,
                              const MultiVectorField& a, const ModelSpace& S) {
  if (!dfn) {
    auto coeff = [fn, a](const Point& m) { return fn(m) * a.coeff(m); };
    return with_fd_derivative(S, a.deg, coeff);
  }
  MultiVectorField u;
  u.deg = a.deg;
  u.coeff = [fn, a](const Point& m) { return fn(m) * a.coeff(m); };
  u.dcoeff = [fn, dfn, a](const Point& m, int dir) {
    return dfn(m, dir) * a.coeff(m) + fn(m) * a.dcoeff(m, dir);
  };
  u.exact = a.exact;
  return u;
}

MultiVectorField left_frame_field(const ModelSpace& S, int global_dir) {
  RVec v = RVec::Zero(S.D);
  v[global_dir] = 1.0;
  return mvf_constant(S, AltTensor::vector(v));
}

MultiVectorField left_coframe_field(const ModelSpace& S, int factor, int a) {
  return left_frame_field(S, S.factors[factor].offset + a);
}

// Shared by the right frame and right coframe: in the orthonormal left frame
// both e_a^R and theta_a^R have coefficient vector col_a(Ad_{g^{-1}}).
static MultiVectorField right_ad_column_field(const ModelSpace& S, int factor, int a) {
  if (S.factors[factor].is_algebra)
    throw std::invalid_argument("right frame only exists on group factors");
  MultiVectorField u;
  u.deg = 1;
  ModelSpace Sc = S;
  const int off = S.factors[factor].offset;
  const ModelPtr M = S.factors[factor].model;
  u.coeff = [Sc, off, M, factor, a](const Point& m) {
    RVec v = RVec::Zero(Sc.D);
    v.segment(off, M->d) = M->Ad(m.p[factor].g.adjoint()).col(a);
    return AltTensor::vector(v);
  };
  u.dcoeff = [Sc, off, M, factor, a](const Point& m, int dir) {
    AltTensor out(Sc.D, 1);
    if (Sc.factor_of(dir) != factor) return out;
    RVec ec = RVec::Zero(M->d);
    ec[dir - off] = 1.0;
    // d/dt Ad_{(g exp(t e_c))^{-1}} = -ad_{e_c} Ad_{g^{-1}}
    out.c.segment(off, M->d) = -(M->ad(ec) * M->Ad(m.p[factor].g.adjoint()).col(a));
    return out;
  };
  u.exact = true;
  return u;
}

MultiVectorField right_frame_field(const ModelSpace& S, int factor, int a) {
  return right_ad_column_field(S, factor, a);
}
MultiVectorField right_coframe_field(const ModelSpace& S, int factor, int a) {
  return right_ad_column_field(S, factor, a);
}

MultiVectorField generated_field(const ModelSpace& S, const ActionSpec& A, int slot,
                                 const AltTensor& beta) {
  MultiVectorField u;
  u.deg = beta.deg;
  ModelSpace Sc = S;
  ActionSlot sl = A.slots[slot];
  u.coeff = [Sc, sl, beta](const Point& m) {
    return pushforward(beta, slot_generator_matrix(Sc, sl, m));
  };
  u.dcoeff = [Sc, sl, beta](const Point& m, int dir) {
    return pushforward_derivative(beta, slot_generator_matrix(Sc, sl, m),
                                  slot_generator_matrix_deriv(Sc, sl, m, dir));
  };
  u.exact = true;
  return u;
}

MultiVectorField generated_field_all(const ModelSpace& S, const ActionSpec& A,
                                     const AltTensor& beta) {
  MultiVectorField u;
  u.deg = beta.deg;
  ModelSpace Sc = S;
  ActionSpec Ac = A;
  u.coeff = [Sc, Ac, beta](const Point& m) {
    return pushforward(beta, action_generator_matrix(Sc, Ac, m));
  };
  u.dcoeff = [Sc, Ac, beta](const Point& m, int dir) {
    return pushforward_derivative(beta, action_generator_matrix(Sc, Ac, m),
                                  action_generator_matrix_deriv(Sc, Ac, m, dir));
  };
  u.exact = true;
  return u;
}

MultiVectorField generated_field_fn(const ModelSpace& S, const ActionSpec& A, int slot, int deg,
                                    std::function<AltTensor(const Point&)> beta,
                                    std::function<AltTensor(const Point&, int)> dbeta) {
  ModelSpace Sc = S;
  ActionSlot sl = A.slots[slot];
  auto coeff = [Sc, sl, beta](const Point& m) {
    return pushforward(beta(m), slot_generator_matrix(Sc, sl, m));
  };
  if (!dbeta) return with_fd_derivative(S, deg, coeff);
  MultiVectorField u;
  u.deg = deg;
  u.coeff = coeff;
  u.dcoeff = [Sc, sl, beta, dbeta](const Point& m, int dir) {
    RMat G = slot_generator_matrix(Sc, sl, m);
    return pushforward_derivative(beta(m), G, slot_generator_matrix_deriv(Sc, sl, m, dir)) +
           pushforward(dbeta(m, dir), G);
  };
  u.exact = true;
  return u;
}

AltTensor cartan_tensor(const GroupModel& G) {
  AltTensor t(G.d, 3);
  int idx[3];
  for (int a = 0; a < G.d; ++a)
    for (int b = a + 1; b < G.d; ++b)
      for (int c = b + 1; c < G.d; ++c) {
        idx[0] = a; idx[1] = b; idx[2] = c;
        alt_add(t, idx, 0.5 * G.fc(a, b, c));
      }
  return t;
}

MultiVectorField cartan_field(const ModelSpace& S, const ActionSpec& A) {
  MultiVectorField u = generated_field(S, A, 0, cartan_tensor(*A.slots[0].group));
  for (size_t s = 1; s < A.slots.size(); ++s)
    u = mvf_add(u, generated_field(S, A, static_cast<int>(s), cartan_tensor(*A.slots[s].group)));
  return u;
}

MultiVectorField psi_field(const ModelSpace& S, const ActionSpec& A, int slot_i, int slot_j) {
  MultiVectorField u;
  u.deg = 2;
  ModelSpace Sc = S;
  ActionSlot si = A.slots[slot_i], sj = A.slots[slot_j];
  u.coeff = [Sc, si, sj](const Point& m) {
    RMat Gi = slot_generator_matrix(Sc, si, m);
    RMat Gj = slot_generator_matrix(Sc, sj, m);
    return deg2_from_matrix(0.5 * (Gi * Gj.transpose() - Gj * Gi.transpose()));
  };
  u.dcoeff = [Sc, si, sj](const Point& m, int dir) {
    RMat Gi = slot_generator_matrix(Sc, si, m);
    RMat Gj = slot_generator_matrix(Sc, sj, m);
    RMat dGi = slot_generator_matrix_deriv(Sc, si, m, dir);
    RMat dGj = slot_generator_matrix_deriv(Sc, sj, m, dir);
    RMat M = dGi * Gj.transpose() + Gi * dGj.transpose();
    return deg2_from_matrix(0.5 * (M - M.transpose()));
  };
  u.exact = true;
  return u;
}

// Left-trivialized displacement of q relative to base, factor by factor.
static RVec point_delta(const ModelSpace& cod, const Point& base, const Point& q) {
  RVec v(cod.D);
  for (size_t j = 0; j < cod.factors.size(); ++j) {
    const Factor& f = cod.factors[j];
    if (f.is_algebra)
      v.segment(f.offset, f.model->d) = q.p[j].xi - base.p[j].xi;
    else
      v.segment(f.offset, f.model->d) = f.model->log_coords(base.p[j].g.adjoint() * q.p[j].g);
  }
  return v;
}

RMat fd_jacobian(const SmoothMap& F, const Point& m, const DerivativeEngine& eng) {
  Point base = F.value(m);
  RMat J(F.cod->D, F.dom->D);
  for (int j = 0; j < F.dom->D; ++j)
    J.col(j) = eng.deriv(
        [&](double t) { return point_delta(*F.cod, base, F.value(flow(*F.dom, m, j, t))); });
  return J;
}

RMat map_jacobian(const SmoothMap& F, const Point& m) {
  return F.jac ? F.jac(m) : fd_jacobian(F, m);
}

AltTensor pushforward_at(const MultiVectorField& u, const SmoothMap& F, const Point& m) {
  return pushforward(u.coeff(m), map_jacobian(F, m));
}

SmoothMap mult_map(const ModelSpace& GxG, const ModelSpace& G) {
  SmoothMap F;
  F.dom = &GxG;
  F.cod = &G;
  const ModelPtr M = G.factors[0].model;
  F.value = [](const Point& m) {
    Point out;
    out.p.push_back({m.p[0].g * m.p[1].g, RVec()});
    return out;
  };
  const int d = M->d;
  F.jac = [M, d](const Point& m) {
    RMat J(d, 2 * d);
    J.block(0, 0, d, d) = M->Ad(m.p[1].g.adjoint());
    J.block(0, d, d, d) = RMat::Identity(d, d);
    return J;
  };
  F.exact_jac = true;
  return F;
}

SmoothMap inversion_map(const ModelSpace& G) {
  SmoothMap F;
  F.dom = &G;
  F.cod = &G;
  const ModelPtr M = G.factors[0].model;
  F.value = [](const Point& m) {
    Point out;
    out.p.push_back({m.p[0].g.adjoint(), RVec()});
    return out;
  };
  F.jac = [M](const Point& m) -> RMat { return -M->Ad(m.p[0].g); };
  F.exact_jac = true;
  return F;
}

// Left-trivialized differential of exp at xi: (1 - e^{-s})/s of ad_xi.
static cxd dexp_left_fn(cxd s) {
  if (std::abs(s) < 1e-3) {
    cxd acc = 1.0, term = 1.0;
    for (int k = 1; k <= 8; ++k) {
      term *= -s / static_cast<double>(k + 1);
      acc += term;
    }
    return acc;
  }
  return (1.0 - std::exp(-s)) / s;
}

SmoothMap exp_chart_map(const ModelSpace& gA, const ModelSpace& G) {
  SmoothMap F;
  F.dom = &gA;
  F.cod = &G;
  const ModelPtr M = G.factors[0].model;
  F.value = [M](const Point& m) {
    Point out;
    out.p.push_back({M->exp_coords(m.p[0].xi), RVec()});
    return out;
  };
  F.jac = [M](const Point& m) { return analytic_of_ad(*M, m.p[0].xi, dexp_left_fn); };
  F.exact_jac = true;
  return F;
}

SmoothMap log_chart_map(const ModelSpace& G, const ModelSpace& gA) {
  SmoothMap F;
  F.dom = &G;
  F.cod = &gA;
  const ModelPtr M = G.factors[0].model;
  F.value = [M](const Point& m) {
    Point out;
    out.p.push_back({CMat(), M->log_coords(m.p[0].g)});
    return out;
  };
  F.jac = [M](const Point& m) { return analytic_of_ad(*M, M->log_coords(m.p[0].g), nu_fn); };
  F.exact_jac = true;
  return F;
}

// Block-diagonal tangent map of x -> g.x at fixed g, in left frames.
static RMat fixed_group_block(const ModelSpace& M, const ActionSlot& slot, const CMat& g) {
  RMat B = RMat::Zero(M.D, M.D);
  for (size_t j = 0; j < M.factors.size(); ++j) {
    const Factor& f = M.factors[j];
    const int d = f.model->d, off = f.offset;
    switch (slot.per_factor[j]) {
      case ElemAct::None:
      case ElemAct::Left:  // left translation is left-frame transparent
        B.block(off, off, d, d) = RMat::Identity(d, d);
        break;
      case ElemAct::Right:
      case ElemAct::Conj:
      case ElemAct::Adjoint:
        B.block(off, off, d, d) = f.model->Ad(g);
        break;
    }
  }
  return B;
}

SmoothMap action_map(const ModelSpace& GxM, const ModelSpace& M, const ActionSpec& MA, int slot) {
  SmoothMap F;
  F.dom = &GxM;
  F.cod = &M;
  ModelSpace Mc = M;
  ActionSlot sl = MA.slots[slot];
  F.value = [Mc, sl](const Point& m) {
    Point x;
    x.p.assign(m.p.begin() + 1, m.p.end());
    return act(Mc, sl, m.p[0].g, x);
  };
  const int dg = GxM.factors[0].model->d;
  F.jac = [Mc, sl, dg](const Point& m) {
    Point x;
    x.p.assign(m.p.begin() + 1, m.p.end());
    RMat B = fixed_group_block(Mc, sl, m.p[0].g);
    RMat J(Mc.D, dg + Mc.D);
    // d/dt (g exp(t e_a)).x = (g.)_* d/dt exp(t e_a).x = -(g.)_* (e_a)_M(x)
    J.block(0, 0, Mc.D, dg) = -B * slot_generator_matrix(Mc, sl, x);
    J.block(0, dg, Mc.D, Mc.D) = B;
    return J;
  };
  F.exact_jac = true;
  return F;
}

SmoothMap factor_projection(const ModelSpace& M, const ModelSpace& Msub, std::vector<int> keep) {
  SmoothMap F;
  F.dom = &M;
  F.cod = &Msub;
  F.value = [keep](const Point& m) {
    Point out;
    for (int j : keep) out.p.push_back(m.p[j]);
    return out;
  };
  RMat J = RMat::Zero(Msub.D, M.D);
  for (size_t r = 0; r < keep.size(); ++r) {
    const Factor& src = M.factors[keep[r]];
    J.block(Msub.factors[r].offset, src.offset, src.model->d, src.model->d) =
        RMat::Identity(src.model->d, src.model->d);
  }
  F.jac = [J](const Point&) { return J; };
  F.exact_jac = true;
  return F;
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  SmoothMap F;
  F.dom = inner.dom;
  F.cod = outer.cod;
  SmoothMap o = outer, i = inner;
  F.value = [o, i](const Point& m) { return o.value(i.value(m)); };
  F.jac = [o, i](const Point& m) -> RMat {
    Point mid = i.value(m);
    return map_jacobian(o, mid) * map_jacobian(i, m);
  };
  F.exact_jac = outer.exact_jac && inner.exact_jac;
  return F;
}

}  // namespace qpl
