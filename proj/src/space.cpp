#include "qpl/space.hpp"

namespace qpl {

ModelSpace product_space(const std::vector<ModelPtr>& models) {
  ModelSpace S;
  for (const auto& m : models) S.factors.push_back(Factor{m, false, 0, std::nullopt});
  S.finalize();
  return S;
}

Point flow(const ModelSpace& S, const Point& m, int dir, double t) {
  Point out = m;
  int j = S.factor_of(dir);
  const Factor& f = S.factors[j];
  int a = dir - f.offset;
  if (f.is_algebra) {
    out.p[j].xi[a] += t;
  } else {
    out.p[j].g = m.p[j].g * f.model->exp_alg(t * f.model->basis[a]);
  }
  return out;
}

Point sample_point(const ModelSpace& S, std::mt19937_64& rng, double scale) {
  Point m;
  for (const auto& f : S.factors) {
    FactorPoint fp;
    if (f.is_algebra) {
      fp.xi = random_algebra(*f.model, rng, scale);
    } else if (f.tag) {
      // Random point of the conjugacy class of the base point.
      CMat u = random_group(*f.model, rng, scale);
      fp.g = u * f.tag->base * u.adjoint();
    } else {
      fp.g = random_group(*f.model, rng, scale);
    }
    m.p.push_back(fp);
  }
  return m;
}

PointFrame point_frame(const ModelSpace& S, const Point& m) {
  PointFrame pf;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    if (f.is_algebra) {
      pf.Ad.push_back(RMat::Identity(f.model->d, f.model->d));
      pf.Ad_inv.push_back(RMat::Identity(f.model->d, f.model->d));
    } else {
      RMat A = f.model->Ad(m.p[j].g);
      pf.Ad.push_back(A);
      pf.Ad_inv.push_back(A.transpose());  // Ad is orthogonal
    }
  }
  return pf;
}

RMat slot_generator_matrix(const ModelSpace& S, const ActionSlot& slot, const Point& m) {
  RMat G = RMat::Zero(S.D, slot.group->d);
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    ElemAct e = slot.per_factor[j];
    if (e == ElemAct::None) continue;
    const int d = f.model->d, off = f.offset;
    switch (e) {
      case ElemAct::Right:  // m -> m g^{-1}: generator xi^L
        G.block(off, 0, d, d) += RMat::Identity(d, d);
        break;
      case ElemAct::Left:  // m -> g m: generator -xi^R, left-frame coeffs -Ad_{g^{-1}} xi
        G.block(off, 0, d, d) -= f.model->Ad(m.p[j].g.adjoint());
        break;
      case ElemAct::Conj:  // m -> g m g^{-1}: xi^L - xi^R
        G.block(off, 0, d, d) +=
            RMat::Identity(d, d) - f.model->Ad(m.p[j].g.adjoint());
        break;
      case ElemAct::Adjoint:  // xi -> Ad_g xi: generator ad_xi e_a (column a)
        G.block(off, 0, d, d) += f.model->ad(m.p[j].xi);
        break;
      default: break;
    }
  }
  return G;
}

RMat slot_generator_matrix_deriv(const ModelSpace& S, const ActionSlot& slot, const Point& m,
                                 int dir) {
  RMat dG = RMat::Zero(S.D, slot.group->d);
  int jd = S.factor_of(dir);
  const Factor& f = S.factors[jd];
  ElemAct e = slot.per_factor[jd];
  if (e == ElemAct::None) return dG;
  const int d = f.model->d, off = f.offset;
  int c = dir - off;
  if (e == ElemAct::Adjoint) {
    // d/dt ad_{xi + t e_c} = ad_{e_c}
    RVec ec = RVec::Zero(d);
    ec[c] = 1;
    dG.block(off, 0, d, d) += f.model->ad(ec);
    return dG;
  }
  // d/dt Ad_{(g exp(t e_c))^{-1}} = -ad_{e_c} Ad_{g^{-1}}
  RVec ec = RVec::Zero(d);
  ec[c] = 1;
  RMat dAdInv = -f.model->ad(ec) * f.model->Ad(m.p[jd].g.adjoint());
  switch (e) {
    case ElemAct::Left: dG.block(off, 0, d, d) -= dAdInv; break;
    case ElemAct::Conj: dG.block(off, 0, d, d) -= dAdInv; break;
    case ElemAct::Right: break;  // constant block
    default: break;
  }
  return dG;
}

RMat action_generator_matrix(const ModelSpace& S, const ActionSpec& A, const Point& m) {
  RMat G(S.D, A.total_dim());
  int col = 0;
  for (const auto& slot : A.slots) {
    G.block(0, col, S.D, slot.group->d) = slot_generator_matrix(S, slot, m);
    col += slot.group->d;
  }
  return G;
}

RMat action_generator_matrix_deriv(const ModelSpace& S, const ActionSpec& A, const Point& m,
                                   int dir) {
  RMat G(S.D, A.total_dim());
  int col = 0;
  for (const auto& slot : A.slots) {
    G.block(0, col, S.D, slot.group->d) = slot_generator_matrix_deriv(S, slot, m, dir);
    col += slot.group->d;
  }
  return G;
}

Point act(const ModelSpace& S, const ActionSlot& slot, const CMat& g, const Point& m) {
  Point out = m;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    switch (slot.per_factor[j]) {
      case ElemAct::None: break;
      case ElemAct::Left: out.p[j].g = g * out.p[j].g; break;
      case ElemAct::Right: out.p[j].g = out.p[j].g * g.adjoint(); break;
      case ElemAct::Conj: out.p[j].g = g * out.p[j].g * g.adjoint(); break;
      case ElemAct::Adjoint: {
        const GroupModel& M = *S.factors[j].model;
        out.p[j].xi = M.coords_of(g * M.alg_of(out.p[j].xi) * g.adjoint());
        break;
      }
    }
  }
  return out;
}

double class_distance(const Factor& f, const CMat& g) {
  if (!f.tag) return 0.0;
  return (eigenphases(g) - eigenphases(f.tag->base)).norm();
}

}  // namespace qpl
