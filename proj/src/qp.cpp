#include "qpl/qp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qpl {

namespace {

Point restrict_point(const Point& m, int from, int count) {
  Point out;
  out.p.assign(m.p.begin() + from, m.p.begin() + from + count);
  return out;
}

ModelSpace one_group_space(ModelPtr G) { return product_space({G}); }

Point group_point(const CMat& g) {
  Point q;
  q.p.push_back(FactorPoint{g, RVec()});
  return q;
}

Point algebra_point(const RVec& xi) {
  Point q;
  q.p.push_back(FactorPoint{CMat(), xi});
  return q;
}

// Eigenvalue-1 cluster threshold for Ad at a class base point: a quarter of
// the smallest non-unit eigenvalue gap, measured as |lambda - 1|.
double class_cluster_delta(const GroupModel& G, const CMat& g0) {
  RMat A = G.Ad(g0);
  RMat sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(sym);
  double best = -1;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double gap = 1.0 - es.eigenvalues()[i];  // = |lambda-1|^2 / 2
    if (gap > 1e-8 && (best < 0 || gap < best)) best = gap;
  }
  if (best < 0) return 1.0;  // central base point: the class is a point
  return 0.5 * std::sqrt(2.0 * best);
}

ElemAct merge_acts(ElemAct a, ElemAct b) {
  if (a == ElemAct::None) return b;
  if (b == ElemAct::None) return a;
  if ((a == ElemAct::Left && b == ElemAct::Right) ||
      (a == ElemAct::Right && b == ElemAct::Left))
    return ElemAct::Conj;
  throw std::invalid_argument("fuse: the two slots collide on a factor");
}

}  // namespace

RMat cayley_orthogonal(const RMat& A, double delta) {
  const int d = static_cast<int>(A.rows());
  RMat sym = 0.5 * (A + A.transpose());
  RMat w = 0.5 * (A - A.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(RMat::Identity(d, d) - sym);
  // |lambda - 1|^2 = 2(1 - cos) maps the cluster radius to eigenvalues of I-sym
  double cut = 0.5 * delta * delta;
  RVec inv(d);
  for (int i = 0; i < d; ++i) {
    double ev = es.eigenvalues()[i];
    inv[i] = ev > cut ? 1.0 / ev : 0.0;
  }
  RMat pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  RMat F = -w * pinv;
  return 0.5 * (F - F.transpose());
}

RMat dynamical_T(const GroupModel& G, const RVec& xi) {
  if (!G.in_natural_domain(xi))
    throw std::domain_error("dynamical T: ad spectrum outside the exp-regular domain");
  return analytic_of_ad(G, xi, phi_fn);
}

ModelSpace algebra_space(ModelPtr G) {
  ModelSpace S;
  S.factors.push_back(Factor{G, true, 0, std::nullopt});
  S.finalize();
  return S;
}

QuasiPoissonSpace canonical_group_space(ModelPtr G) {
  QuasiPoissonSpace X;
  X.name = "group(" + G->name + ")";
  X.S = one_group_space(G);
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Conj}, "conj"});
  const ModelSpace Sc = X.S;
  auto Gm = G;
  X.P.deg = 2;
  X.P.exact = true;
  X.P.coeff = [Gm](const Point& m) {
    const CMat& g = m.p[0].g;
    return deg2_from_matrix(0.5 * (Gm->Ad(g.adjoint()) - Gm->Ad(g)));
  };
  X.P.dcoeff = [Gm](const Point& m, int dir) {
    const CMat& g = m.p[0].g;
    RMat adc = Gm->ad(RVec::Unit(Gm->d, dir));
    return deg2_from_matrix(0.5 * (-adc * Gm->Ad(g.adjoint()) - Gm->Ad(g) * adc));
  };
  X.moments.push_back(factor_moment(X.S, 0));
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace linear_poisson_space(ModelPtr G) {
  QuasiPoissonSpace X;
  X.name = "linear(" + G->name + ")";
  X.S = algebra_space(G);
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Adjoint}, "adjoint"});
  const ModelSpace Sc = X.S;
  auto Gm = G;
  X.P.deg = 2;
  X.P.exact = true;
  X.P.coeff = [Gm](const Point& m) { return deg2_from_matrix(-Gm->ad(m.p[0].xi)); };
  X.P.dcoeff = [Gm](const Point&, int dir) {
    return deg2_from_matrix(-Gm->ad(RVec::Unit(Gm->d, dir)));
  };
  X.moments.push_back(algebra_factor_moment(X.S, 0));
  X.poisson = true;
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace conjugacy_class_space(ModelPtr G, const CMat& g0) {
  QuasiPoissonSpace X;
  X.name = "class(" + G->name + ")";
  X.S.factors.push_back(Factor{G, false, 0, ClassTag{g0, 1e-9}});
  X.S.finalize();
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Conj}, "conj"});
  const ModelSpace Sc = X.S;
  auto Gm = G;
  const double delta = class_cluster_delta(*G, g0);
  auto coeff = [Gm, delta](const Point& m) {
    const CMat& g = m.p[0].g;
    RMat F = cayley_orthogonal(Gm->Ad(g), delta);
    RMat C = RMat::Identity(Gm->d, Gm->d) - Gm->Ad(g.adjoint());
    return deg2_from_matrix(0.5 * C * F * C.transpose());
  };
  X.P = with_fd_derivative(Sc, 2, coeff);
  X.moments.push_back(factor_moment(X.S, 0));
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace double_DG(ModelPtr G) {
  QuasiPoissonSpace X;
  X.name = "double(" + G->name + ")";
  X.S = product_space({G, G});
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Left, ElemAct::Right}, "left-type"});
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Right, ElemAct::Left}, "right-type"});
  const ModelSpace Sc = X.S;
  auto Gm = G;
  const int d = G->d;
  X.P.deg = 2;
  X.P.exact = true;
  // off-diagonal block (1,2) = (1/2)(Ad_{g2} + Ad_{g1^{-1}}), diagonal zero
  X.P.coeff = [Gm, d](const Point& m) {
    RMat B = RMat::Zero(2 * d, 2 * d);
    RMat blk = 0.5 * (Gm->Ad(m.p[1].g) + Gm->Ad(m.p[0].g.adjoint()));
    B.topRightCorner(d, d) = blk;
    B.bottomLeftCorner(d, d) = -blk.transpose();
    return deg2_from_matrix(B);
  };
  X.P.dcoeff = [Gm, d](const Point& m, int dir) {
    RMat blk;
    if (dir < d) {
      RMat adc = Gm->ad(RVec::Unit(d, dir));
      blk = -0.5 * adc * Gm->Ad(m.p[0].g.adjoint());
    } else {
      RMat adc = Gm->ad(RVec::Unit(d, dir - d));
      blk = 0.5 * Gm->Ad(m.p[1].g) * adc;
    }
    RMat B = RMat::Zero(2 * d, 2 * d);
    B.topRightCorner(d, d) = blk;
    B.bottomLeftCorner(d, d) = -blk.transpose();
    return deg2_from_matrix(B);
  };
  std::map<std::string, int> names{{"x", 0}, {"y", 1}};
  X.moments.push_back(word_moment(X.S, G, parse_word("x y", names)));
  X.moments.push_back(word_moment(X.S, G, parse_word("x' y'", names)));
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace double_bold_DG(ModelPtr G) {
  QuasiPoissonSpace X;
  X.name = "fused-double(" + G->name + ")";
  X.S = product_space({G, G});
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Conj, ElemAct::Conj}, "diag"});
  const ModelSpace Sc = X.S;
  auto Gm = G;
  const int d = G->d;
  auto assemble = [d](const RMat& b11, const RMat& b12, const RMat& b22) {
    RMat B(2 * d, 2 * d);
    B.topLeftCorner(d, d) = b11;
    B.topRightCorner(d, d) = b12;
    B.bottomLeftCorner(d, d) = -b12.transpose();
    B.bottomRightCorner(d, d) = b22;
    return deg2_from_matrix(B);
  };
  X.P.deg = 2;
  X.P.exact = true;
  X.P.coeff = [Gm, d, assemble](const Point& m) {
    RMat A1 = Gm->Ad(m.p[0].g), A1i = Gm->Ad(m.p[0].g.adjoint());
    RMat A2 = Gm->Ad(m.p[1].g), A2i = Gm->Ad(m.p[1].g.adjoint());
    RMat I = RMat::Identity(d, d);
    return assemble(0.5 * (A1i - A1), 0.5 * (I + A2 + A1i - A1i * A2), 0.5 * (A2 - A2i));
  };
  X.P.dcoeff = [Gm, d, assemble](const Point& m, int dir) {
    RMat A1 = Gm->Ad(m.p[0].g), A1i = Gm->Ad(m.p[0].g.adjoint());
    RMat A2 = Gm->Ad(m.p[1].g), A2i = Gm->Ad(m.p[1].g.adjoint());
    RMat Z = RMat::Zero(d, d);
    if (dir < d) {
      RMat adc = Gm->ad(RVec::Unit(d, dir));
      return assemble(0.5 * (-adc * A1i - A1 * adc), 0.5 * (-adc * A1i + adc * A1i * A2), Z);
    }
    RMat adc = Gm->ad(RVec::Unit(d, dir - d));
    return assemble(Z, 0.5 * (A2 * adc - A1i * A2 * adc), 0.5 * (A2 * adc + adc * A2i));
  };
  std::map<std::string, int> names{{"x", 0}, {"y", 1}};
  X.moments.push_back(word_moment(X.S, G, parse_word("x y x' y'", names)));
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace group_as_bi_space(ModelPtr G) {
  QuasiPoissonSpace X;
  X.name = "bi-group(" + G->name + ")";
  X.S = one_group_space(G);
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Left}, "left"});
  X.A.slots.push_back(ActionSlot{G, {ElemAct::Right}, "right"});
  const ModelSpace Sc = X.S;
  const int d = G->d;
  X.P.deg = 2;
  X.P.exact = true;
  X.P.coeff = [d](const Point&) { return AltTensor(d, 2); };
  X.P.dcoeff = [d](const Point&, int) { return AltTensor(d, 2); };
  X.moments.assign(2, std::nullopt);
  X.sample = [Sc](std::mt19937_64& rng) { return sample_point(Sc, rng); };
  return X;
}

QuasiPoissonSpace product(const QuasiPoissonSpace& X, const QuasiPoissonSpace& Y) {
  if (X.poisson != Y.poisson)
    throw std::invalid_argument("product: mixed bracket conventions");
  QuasiPoissonSpace Z;
  Z.name = "(" + X.name + " x " + Y.name + ")";
  Z.poisson = X.poisson;
  Z.S.factors = X.S.factors;
  Z.S.factors.insert(Z.S.factors.end(), Y.S.factors.begin(), Y.S.factors.end());
  Z.S.finalize();
  const int nX = static_cast<int>(X.S.factors.size());
  const int nY = static_cast<int>(Y.S.factors.size());
  const int DX = X.S.D, DY = Y.S.D, D = Z.S.D;
  for (ActionSlot sl : X.A.slots) {
    sl.per_factor.resize(nX + nY, ElemAct::None);
    Z.A.slots.push_back(sl);
  }
  for (ActionSlot sl : Y.A.slots) {
    std::vector<ElemAct> pf(nX, ElemAct::None);
    pf.insert(pf.end(), sl.per_factor.begin(), sl.per_factor.end());
    sl.per_factor = std::move(pf);
    Z.A.slots.push_back(sl);
  }
  const MultiVectorField PX = X.P, PY = Y.P;
  Z.P.deg = 2;
  Z.P.exact = PX.exact && PY.exact;
  Z.P.coeff = [PX, PY, nX, nY, DX, DY, D](const Point& m) {
    RMat B = RMat::Zero(D, D);
    B.topLeftCorner(DX, DX) = deg2_matrix(PX.coeff(restrict_point(m, 0, nX)));
    B.bottomRightCorner(DY, DY) = deg2_matrix(PY.coeff(restrict_point(m, nX, nY)));
    return deg2_from_matrix(B);
  };
  Z.P.dcoeff = [PX, PY, nX, nY, DX, DY, D](const Point& m, int dir) {
    RMat B = RMat::Zero(D, D);
    if (dir < DX)
      B.topLeftCorner(DX, DX) = deg2_matrix(PX.dcoeff(restrict_point(m, 0, nX), dir));
    else
      B.bottomRightCorner(DY, DY) = deg2_matrix(PY.dcoeff(restrict_point(m, nX, nY), dir - DX));
    return deg2_from_matrix(B);
  };
  for (const auto& mo : X.moments) {
    if (!mo) {
      Z.moments.push_back(std::nullopt);
      continue;
    }
    MomentComponent mc = *mo;
    const int dt = mc.target->d;
    auto base = *mo;
    mc.value = [base, nX](const Point& m) { return base.value(restrict_point(m, 0, nX)); };
    mc.alg_value = [base, nX](const Point& m) { return base.alg_value(restrict_point(m, 0, nX)); };
    mc.rmat = [base, nX, DX, D, dt](const Point& m) {
      RMat R = RMat::Zero(dt, D);
      R.leftCols(DX) = base.rmat(restrict_point(m, 0, nX));
      return R;
    };
    Z.moments.push_back(mc);
  }
  for (const auto& mo : Y.moments) {
    if (!mo) {
      Z.moments.push_back(std::nullopt);
      continue;
    }
    MomentComponent mc = *mo;
    const int dt = mc.target->d;
    auto base = *mo;
    mc.value = [base, nX, nY](const Point& m) { return base.value(restrict_point(m, nX, nY)); };
    mc.alg_value = [base, nX, nY](const Point& m) {
      return base.alg_value(restrict_point(m, nX, nY));
    };
    mc.rmat = [base, nX, nY, DY, D, dt](const Point& m) {
      RMat R = RMat::Zero(dt, D);
      R.rightCols(DY) = base.rmat(restrict_point(m, nX, nY));
      return R;
    };
    Z.moments.push_back(mc);
  }
  Z.sample = [sx = X.sample, sy = Y.sample](std::mt19937_64& rng) {
    Point a = sx(rng);
    Point b = sy(rng);
    a.p.insert(a.p.end(), b.p.begin(), b.p.end());
    return a;
  };
  return Z;
}

QuasiPoissonSpace fuse(const QuasiPoissonSpace& X, int slot_i, int slot_j) {
  if (X.poisson) throw std::invalid_argument("fuse: needs the group-valued setting");
  const int ns = static_cast<int>(X.A.slots.size());
  if (slot_i == slot_j || slot_i < 0 || slot_j < 0 || slot_i >= ns || slot_j >= ns)
    throw std::invalid_argument("fuse: bad slot indices");
  const ActionSlot& si = X.A.slots[slot_i];
  const ActionSlot& sj = X.A.slots[slot_j];
  if (si.group->name != sj.group->name)
    throw std::invalid_argument("fuse: slots act by different groups");
  QuasiPoissonSpace Z = X;
  Z.name = "fuse(" + std::to_string(slot_i) + "," + std::to_string(slot_j) + ") " + X.name;
  ActionSlot merged;
  merged.group = si.group;
  merged.label = si.label + "*" + sj.label;
  merged.per_factor.resize(X.S.factors.size());
  for (size_t k = 0; k < X.S.factors.size(); ++k)
    merged.per_factor[k] = merge_acts(si.per_factor[k], sj.per_factor[k]);
  std::optional<MomentComponent> fm;
  if (X.moments[slot_i] && X.moments[slot_j])
    fm = moment_product(X.S, *X.moments[slot_i], *X.moments[slot_j]);
  Z.P = mvf_sub(X.P, psi_field(X.S, X.A, slot_i, slot_j));
  const int lo = std::min(slot_i, slot_j), hi = std::max(slot_i, slot_j);
  Z.A.slots[lo] = merged;
  Z.A.slots.erase(Z.A.slots.begin() + hi);
  Z.moments[lo] = fm;
  Z.moments.erase(Z.moments.begin() + hi);
  return Z;
}

SmoothMap fusion_twist(const QuasiPoissonSpace& X, int slot_i, int slot_j) {
  const int ns = static_cast<int>(X.A.slots.size());
  if (slot_i < 0 || slot_j < 0 || slot_i >= ns || slot_j >= ns || slot_i == slot_j)
    throw std::invalid_argument("fusion twist: bad slot indices");
  if (!X.moments[slot_i] || !X.moments[slot_i]->group_valued)
    throw std::invalid_argument("fusion twist: slot_i needs a group-valued moment");
  const ModelSpace Sc = X.S;
  const ActionSlot slot = X.A.slots[slot_j];
  const MomentComponent mi = *X.moments[slot_i];
  SmoothMap R;
  R.dom = &X.S;
  R.cod = &X.S;
  R.value = [Sc, slot, mi](const Point& m) { return act(Sc, slot, mi.value(m), m); };
  SmoothMap base = R;
  R.jac = [base](const Point& m) { return fd_jacobian(base, m); };
  return R;
}

QuasiPoissonSpace exponentiate(const QuasiPoissonSpace& X, int slot) {
  if (!X.poisson) throw std::invalid_argument("exponentiate: expects the linear setting");
  if (X.A.slots.size() != 1 || slot != 0)
    throw std::invalid_argument("exponentiate: single-slot spaces only");
  if (!X.moments[slot]) throw std::invalid_argument("exponentiate: missing moment");
  const MomentComponent& mc = *X.moments[slot];
  if (mc.group_valued) throw std::invalid_argument("exponentiate: moment already group valued");
  auto grp = X.A.slots[slot].group;
  auto beta = [mc, grp](const Point& m) {
    return deg2_from_matrix(dynamical_T(*grp, mc.alg_value(m)));
  };
  MultiVectorField TM = generated_field_fn(X.S, X.A, slot, 2, beta, nullptr);
  QuasiPoissonSpace Z = X;
  Z.name = "exp " + X.name;
  Z.P = mvf_sub(X.P, TM);
  Z.moments[slot] = exp_moment(X.S, mc);
  Z.poisson = false;
  return Z;
}

QuasiPoissonSpace logarithmize(const QuasiPoissonSpace& X, int slot) {
  if (X.poisson) throw std::invalid_argument("logarithmize: expects the group setting");
  if (X.A.slots.size() != 1 || slot != 0)
    throw std::invalid_argument("logarithmize: single-slot spaces only");
  if (!X.moments[slot]) throw std::invalid_argument("logarithmize: missing moment");
  const MomentComponent& mc = *X.moments[slot];
  if (!mc.group_valued) throw std::invalid_argument("logarithmize: moment already algebra valued");
  auto grp = X.A.slots[slot].group;
  auto beta = [mc, grp](const Point& m) {
    return deg2_from_matrix(dynamical_T(*grp, grp->log_coords(mc.value(m))));
  };
  MultiVectorField TM = generated_field_fn(X.S, X.A, slot, 2, beta, nullptr);
  QuasiPoissonSpace Z = X;
  Z.name = "log " + X.name;
  Z.P = mvf_add(X.P, TM);
  Z.moments[slot] = log_moment(X.S, mc);
  Z.poisson = true;
  return Z;
}

SmoothMap moment_map(const ModelSpace& S, const ModelSpace& target, const MomentComponent& mc) {
  SmoothMap F;
  F.dom = &S;
  F.cod = &target;
  F.exact_jac = mc.exact;
  if (mc.group_valued) {
    F.value = [v = mc.value](const Point& m) { return group_point(v(m)); };
    F.jac = [mc](const Point& m) -> RMat {
      return RMat(mc.target->Ad(mc.value(m).adjoint()) * mc.rmat(m));
    };
  } else {
    F.value = [v = mc.alg_value](const Point& m) { return algebra_point(v(m)); };
    F.jac = mc.rmat;
  }
  return F;
}

std::vector<Residual> certify(const QuasiPoissonSpace& X, std::mt19937_64& rng, int npoints) {
  std::vector<Residual> out;
  const ModelSpace& S = X.S;
  FrameAlgebra FA = frame_algebra(S);
  MultiVectorField phiM = cartan_field(S, X.A);
  const TolClass struct_cls = X.P.exact ? TolClass::ClosedForm : TolClass::FdFirst;
  const char* struct_id = X.poisson ? "[P,P] = 0" : "[P,P] = phi_M";
  for (int it = 0; it < npoints; ++it) {
    Point m = X.sample(rng);
    AltTensor br = schouten(S, FA, X.P, X.P, m);
    if (!X.poisson) br -= phiM.coeff(m);
    push_max(out, struct_id, X.name, br.norm(), struct_cls);

    for (size_t s = 0; s < X.A.slots.size(); ++s) {
      const ActionSlot& slot = X.A.slots[s];
      RVec xi = random_algebra(*slot.group, rng);
      MultiVectorField gen = generated_field(S, X.A, static_cast<int>(s), AltTensor::vector(xi));
      AltTensor lie = schouten(S, FA, gen, X.P, m);
      push_max(out, "L_{xi_M} P = 0", X.name, lie.norm(), struct_cls);
    }

    RMat sharp = sharp_matrix(X.P.coeff(m));
    for (size_t s = 0; s < X.A.slots.size(); ++s) {
      if (!X.moments[s]) continue;
      const MomentComponent& mc = *X.moments[s];
      const ActionSlot& slot = X.A.slots[s];
      const TolClass mcls = mc.exact ? TolClass::ClosedForm : TolClass::FdFirst;
      RMat R = mc.rmat(m);
      RMat Gs = slot_generator_matrix(S, slot, m);
      if (mc.group_valued) {
        RMat Ad = slot.group->Ad(mc.value(m));
        RMat lhs = sharp * R.transpose();
        RMat rhs = 0.5 * Gs * (RMat::Identity(Ad.rows(), Ad.cols()) + Ad).transpose();
        push_max(out, "P#(Phi^*theta^R) = (1/2)(1+Ad_Phi) e_M", X.name, (lhs - rhs).norm(), mcls);
      } else {
        RMat lhs = sharp * R.transpose();
        push_max(out, "P#(dPhi_a) = (e_a)_M", X.name, (lhs - Gs).norm(), mcls);
      }

      // equivariance under every slot: conjugation in its own slot, trivial otherwise
      for (size_t t = 0; t < X.A.slots.size(); ++t) {
        CMat h = random_group(*X.A.slots[t].group, rng);
        Point ma = act(S, X.A.slots[t], h, m);
        double r;
        if (mc.group_valued) {
          CMat phi = mc.value(m);
          CMat expect = (t == s) ? CMat(h * phi * h.adjoint()) : phi;
          r = (mc.value(ma) - expect).norm();
        } else {
          RVec v = mc.alg_value(m);
          RVec expect = (t == s) ? RVec(X.A.slots[t].group->Ad(h) * v) : v;
          r = (mc.alg_value(ma) - expect).norm();
        }
        push_max(out, "Phi equivariance", X.name, r, TolClass::ClosedForm);
      }

      // moment map intertwines P with the slot-group structure
      if (mc.group_valued) {
        ModelSpace Gs1 = one_group_space(slot.group);
        SmoothMap F = moment_map(S, Gs1, mc);
        AltTensor push = pushforward_at(X.P, F, m);
        CMat phi = mc.value(m);
        AltTensor target =
            deg2_from_matrix(0.5 * (slot.group->Ad(phi.adjoint()) - slot.group->Ad(phi)));
        push_max(out, "Phi_* P = P_G", X.name, (push - target).norm(), mcls);
      } else {
        ModelSpace gs = algebra_space(slot.group);
        SmoothMap F = moment_map(S, gs, mc);
        AltTensor push = pushforward_at(X.P, F, m);
        AltTensor target = deg2_from_matrix(-slot.group->ad(mc.alg_value(m)));
        push_max(out, "Phi_* P = P_0", X.name, (push - target).norm(), mcls);
      }
    }
  }
  return out;
}

NondegReport nondegeneracy(const QuasiPoissonSpace& X, const Point& m) {
  const ModelSpace& S = X.S;
  const int D = S.D;
  RMat sharp = sharp_matrix(X.P.coeff(m));
  std::vector<RMat> blocks{sharp};
  int extra = 0;
  for (size_t s = 0; s < X.A.slots.size(); ++s) {
    if (!X.moments[s] || !X.moments[s]->group_valued) continue;
    const ActionSlot& slot = X.A.slots[s];
    RMat A = slot.group->Ad(X.moments[s]->value(m));
    RMat K = A + RMat::Identity(A.rows(), A.cols());
    Eigen::JacobiSVD<RMat> svd(K, Eigen::ComputeFullV);
    double th = S.factors[0].model->tol.rank_rel * std::max(svd.singularValues()[0], 1.0);
    int k = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] < th) ++k;
    if (k > 0) {
      RMat ker = svd.matrixV().rightCols(k);
      blocks.push_back(slot_generator_matrix(S, slot, m) * ker);
      extra += k;
    }
  }
  RMat M(D, sharp.cols() + extra);
  int col = 0;
  for (const RMat& b : blocks) {
    M.middleCols(col, b.cols()) = b;
    col += static_cast<int>(b.cols());
  }
  Eigen::JacobiSVD<RMat> svd(M);
  double th = S.factors[0].model->tol.rank_rel * std::max(svd.singularValues()[0], 1.0);
  NondegReport rep;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= th) ++rep.rank;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    if (f.is_algebra || !f.tag) {
      rep.expected += f.model->d;
      continue;
    }
    RMat C = RMat::Identity(f.model->d, f.model->d) - f.model->Ad(m.p[j].g.adjoint());
    Eigen::JacobiSVD<RMat> csvd(C);
    double cth = f.model->tol.rank_rel * std::max(csvd.singularValues()[0], 1.0);
    for (int i = 0; i < csvd.singularValues().size(); ++i)
      if (csvd.singularValues()[i] >= cth) ++rep.expected;
  }
  rep.nondegenerate = (rep.rank == rep.expected);
  return rep;
}

std::vector<LinearizationRow> linearization_check(const GroupModel& G, const RVec& xi,
                                                  const std::vector<double>& ts) {
  auto Gp = std::make_shared<GroupModel>(G);
  ModelSpace gA = algebra_space(Gp);
  ModelSpace Gs = one_group_space(Gp);
  SmoothMap E = exp_chart_map(gA, Gs);
  std::vector<LinearizationRow> rows;
  for (double t : ts) {
    RVec x = t * xi;
    Point px = algebra_point(x);
    RMat J = E.jac(px);
    CMat g = G.exp_coords(x);
    RMat B = 0.5 * (G.Ad(g.adjoint()) - G.Ad(g));
    RMat Ji = J.inverse();
    RMat Bpull = Ji * B * Ji.transpose();
    double r = (Bpull - (-G.ad(x))).norm();
    rows.push_back(LinearizationRow{t, r, r / (t * t), r / (t * t * t)});
  }
  return rows;
}

}  // namespace qpl
