#include "qpl/omega.hpp"

#include <Eigen/SVD>
#include <stdexcept>
#include <string>

#include "qpl/schouten.hpp"

namespace qpl {

namespace {

double rank_rel_of(const ModelSpace& S) { return S.factors[0].model->tol.rank_rel; }

// L * U = C, rows of L indexed like rows of C.
struct LeftCon {
  RMat L;
  RMat C;
};
// U * M = N.
struct RightCon {
  RMat M;
  RMat N;
};

struct AntisymSolve {
  RMat U;
  double residual = 0;
  int kernel = 0;
};

// Joint least squares over antisymmetric D x D matrices. Unknowns are the
// strict upper triangle, ranked like degree-2 AltTensor components.
AntisymSolve solve_antisym(int D, const std::vector<LeftCon>& ls,
                           const std::vector<RightCon>& rs, double rank_rel) {
  const int n = D * (D - 1) / 2;
  int rows = 0;
  for (const auto& c : ls) rows += static_cast<int>(c.L.rows()) * D;
  for (const auto& c : rs) rows += D * static_cast<int>(c.M.cols());

  RMat A = RMat::Zero(rows, n);
  RVec b = RVec::Zero(rows);
  int off = 0;
  for (const auto& c : ls) {
    const int r = static_cast<int>(c.L.rows());
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < D; ++j) b[off + i * D + j] = c.C(i, j);
    for (int p = 0; p < D; ++p)
      for (int q = p + 1; q < D; ++q) {
        int idx[2] = {p, q};
        const int t = combo_rank(idx, 2);
        for (int i = 0; i < r; ++i) {
          A(off + i * D + q, t) += c.L(i, p);
          A(off + i * D + p, t) -= c.L(i, q);
        }
      }
    off += r * D;
  }
  for (const auto& c : rs) {
    const int cols = static_cast<int>(c.M.cols());
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < cols; ++j) b[off + i * cols + j] = c.N(i, j);
    for (int p = 0; p < D; ++p)
      for (int q = p + 1; q < D; ++q) {
        int idx[2] = {p, q};
        const int t = combo_rank(idx, 2);
        for (int j = 0; j < cols; ++j) {
          A(off + p * cols + j, t) += c.M(q, j);
          A(off + q * cols + j, t) -= c.M(p, j);
        }
      }
    off += D * cols;
  }

  AntisymSolve out;
  if (n == 0) {
    out.U = RMat::Zero(D, D);
    out.residual = b.norm();
    return out;
  }
  Eigen::BDCSVD<RMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_rel);
  RVec u = svd.solve(b);
  out.kernel = n - static_cast<int>(svd.rank());
  out.residual = (A * u - b).norm();
  out.U = RMat::Zero(D, D);
  for (int p = 0; p < D; ++p)
    for (int q = p + 1; q < D; ++q) {
      int idx[2] = {p, q};
      const double v = u[combo_rank(idx, 2)];
      out.U(p, q) = v;
      out.U(q, p) = -v;
    }
  return out;
}

RMat orbit_tangent_basis(const GroupModel& G, const CMat& g) {
  RMat T = G.Ad(CMat(g.adjoint())) - RMat::Identity(G.d, G.d);
  Eigen::JacobiSVD<RMat> svd(T, Eigen::ComputeFullU);
  const double th = G.tol.rank_rel * std::max(svd.singularValues()[0], 1.0);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= th) ++r;
  return svd.matrixU().leftCols(r);
}

// Per-slot matrices of the compatibility system, already in the tangent frame.
struct SlotData {
  RMat Gt;     // Dt x d, restricted generators
  RMat RQ;     // d x Dt, restricted moment tangent
  RMat Ad;     // Ad_{Phi_s}
  RMat Adinv;  // Ad_{Phi_s^{-1}}
};

std::vector<SlotData> slot_data(const QuasiPoissonSpace& X, const RMat& Q, const Point& m) {
  std::vector<SlotData> out;
  for (size_t s = 0; s < X.A.slots.size(); ++s) {
    if (!X.moments[s] || !X.moments[s]->group_valued)
      throw std::invalid_argument("omega: every slot needs a group-valued moment");
    const ActionSlot& slot = X.A.slots[s];
    const MomentComponent& mc = *X.moments[s];
    SlotData d;
    CMat phi = mc.value(m);
    d.Ad = slot.group->Ad(phi);
    d.Adinv = slot.group->Ad(CMat(phi.adjoint()));
    d.RQ = mc.rmat(m) * Q;
    d.Gt = Q.transpose() * slot_generator_matrix(X.S, slot, m);
    out.push_back(std::move(d));
  }
  return out;
}

// Right-hand side of the composition condition in the tangent frame.
RMat composition_rhs(const std::vector<SlotData>& sd, int Dt) {
  RMat rhs = RMat::Identity(Dt, Dt);
  for (const auto& d : sd) {
    const int dg = static_cast<int>(d.Ad.rows());
    rhs -= 0.25 * d.Gt * (d.Adinv - RMat::Identity(dg, dg)) * d.RQ;
  }
  return rhs;
}

}  // namespace

RMat tangent_basis(const ModelSpace& S, const Point& m) {
  std::vector<RMat> blocks;
  int Dt = 0;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    if (!f.is_algebra && f.tag) {
      blocks.push_back(orbit_tangent_basis(*f.model, m.p[j].g));
    } else {
      blocks.push_back(RMat::Identity(f.model->d, f.model->d));
    }
    Dt += static_cast<int>(blocks.back().cols());
  }
  RMat Q = RMat::Zero(S.D, Dt);
  int col = 0;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    Q.block(S.factors[j].offset, col, blocks[j].rows(), blocks[j].cols()) = blocks[j];
    col += static_cast<int>(blocks[j].cols());
  }
  return Q;
}

OmegaSolveReport omega_matrix_at(const QuasiPoissonSpace& X, const Point& m) {
  NondegReport nd = nondegeneracy(X, m);
  if (!nd.nondegenerate)
    throw std::domain_error("omega solve: degenerate point, distribution corank " +
                            std::to_string(nd.expected - nd.rank));
  RMat Q = tangent_basis(X.S, m);
  const int Dt = static_cast<int>(Q.cols());
  RMat Bt = Q.transpose() * deg2_matrix(X.P.coeff(m)) * Q;
  std::vector<SlotData> sd = slot_data(X, Q, m);
  RMat rhs = composition_rhs(sd, Dt);

  std::vector<LeftCon> ls{{Bt, rhs}};
  std::vector<RightCon> rcons;
  for (const auto& d : sd) {
    const int dg = static_cast<int>(d.Ad.rows());
    // W^T G = (1/2) R^T (I + Ad)  <=>  W G = -(1/2) R^T (I + Ad)
    rcons.push_back(
        {d.Gt, RMat(-0.5 * d.RQ.transpose() * (RMat::Identity(dg, dg) + d.Ad))});
  }
  AntisymSolve sol = solve_antisym(Dt, ls, rcons, rank_rel_of(X.S));
  if (sol.kernel > 0)
    throw std::domain_error("omega solve: degenerate point, solution kernel dimension " +
                            std::to_string(sol.kernel));

  OmegaSolveReport rep;
  rep.solve_kernel = sol.kernel;
  rep.defining_residual = (Bt * sol.U - rhs).norm();
  for (size_t s = 0; s < sd.size(); ++s)
    rep.moment_residual =
        std::max(rep.moment_residual, (sol.U * rcons[s].M - rcons[s].N).norm());
  rep.W = Q * sol.U * Q.transpose();
  return rep;
}

double defining_residual_at(const QuasiPoissonSpace& X, const RMat& W, const Point& m) {
  RMat Q = tangent_basis(X.S, m);
  RMat Bt = Q.transpose() * deg2_matrix(X.P.coeff(m)) * Q;
  RMat Wt = Q.transpose() * W * Q;
  std::vector<SlotData> sd = slot_data(X, Q, m);
  return (Bt * Wt - composition_rhs(sd, static_cast<int>(Q.cols()))).norm();
}

double moment_form_residual_at(const QuasiPoissonSpace& X, const RMat& W, const Point& m) {
  RMat Q = tangent_basis(X.S, m);
  RMat Wt = Q.transpose() * W * Q;
  double worst = 0;
  for (const auto& d : slot_data(X, Q, m)) {
    const int dg = static_cast<int>(d.Ad.rows());
    RMat r = Wt.transpose() * d.Gt -
             0.5 * d.RQ.transpose() * (RMat::Identity(dg, dg) + d.Ad);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

int omega_kernel_dim(const QuasiPoissonSpace& X, const RMat& W, const Point& m) {
  RMat Q = tangent_basis(X.S, m);
  RMat Wt = Q.transpose() * W * Q;
  Eigen::JacobiSVD<RMat> svd(Wt);
  const double th = rank_rel_of(X.S) * std::max(svd.singularValues()[0], 1.0);
  int k = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] < th) ++k;
  return k;
}

int expected_kernel_dim(const QuasiPoissonSpace& X, const Point& m) {
  RMat Q = tangent_basis(X.S, m);
  std::vector<RMat> cols;
  int total = 0;
  for (size_t s = 0; s < X.A.slots.size(); ++s) {
    if (!X.moments[s] || !X.moments[s]->group_valued) continue;
    const ActionSlot& slot = X.A.slots[s];
    RMat A = slot.group->Ad(X.moments[s]->value(m));
    RMat K = A + RMat::Identity(A.rows(), A.cols());
    Eigen::JacobiSVD<RMat> svd(K, Eigen::ComputeFullV);
    const double th = slot.group->tol.rank_rel * std::max(svd.singularValues()[0], 1.0);
    int k = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] < th) ++k;
    if (k == 0) continue;
    RMat gen = Q.transpose() * slot_generator_matrix(X.S, slot, m) *
               svd.matrixV().rightCols(k);
    cols.push_back(gen);
    total += k;
  }
  if (total == 0) return 0;
  RMat M(Q.cols(), total);
  int c = 0;
  for (const RMat& b : cols) {
    M.middleCols(c, b.cols()) = b;
    c += static_cast<int>(b.cols());
  }
  Eigen::JacobiSVD<RMat> svd(M);
  const double th = rank_rel_of(X.S) * std::max(svd.singularValues()[0], 1.0);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] >= th) ++r;
  return r;
}

TwoFormStructure omega_from_P(const QuasiPoissonSpace& X, std::mt19937_64& rng,
                              int npoints) {
  TwoFormStructure out;
  QuasiPoissonSpace Xc = X;
  auto coeff = [Xc](const Point& m) {
    return deg2_from_matrix(omega_matrix_at(Xc, m).W);
  };
  out.omega = with_fd_derivative(X.S, 2, coeff);
  for (int it = 0; it < npoints; ++it) {
    Point m = X.sample(rng);
    OmegaSolveReport rep = omega_matrix_at(X, m);
    out.defining_residual = std::max(out.defining_residual, rep.defining_residual);
    out.moment_residual = std::max(out.moment_residual, rep.moment_residual);
  }
  return out;
}

QuasiPoissonSpace P_from_omega(const QuasiPoissonSpace& X, const DifferentialForm& omega) {
  QuasiPoissonSpace Y = X;
  QuasiPoissonSpace Xc = X;
  DifferentialForm w = omega;
  auto coeff = [Xc, w](const Point& m) -> AltTensor {
    RMat Q = tangent_basis(Xc.S, m);
    const int Dt = static_cast<int>(Q.cols());
    RMat Wt = Q.transpose() * deg2_matrix(w.coeff(m)) * Q;
    std::vector<SlotData> sd = slot_data(Xc, Q, m);
    std::vector<RightCon> rcons{{Wt, composition_rhs(sd, Dt)}};
    for (const auto& d : sd) {
      const int dg = static_cast<int>(d.Ad.rows());
      // B^T R^T = (1/2) G (I + Ad)^T  <=>  B R^T = -(1/2) G (I + Ad)^T
      rcons.push_back({RMat(d.RQ.transpose()),
                       RMat(-0.5 * d.Gt * (RMat::Identity(dg, dg) + d.Ad).transpose())});
    }
    AntisymSolve sol = solve_antisym(Dt, {}, rcons, rank_rel_of(Xc.S));
    if (sol.kernel > 0)
      throw std::domain_error("bivector solve: degenerate point, solution kernel dimension " +
                              std::to_string(sol.kernel));
    return deg2_from_matrix(RMat(Q * sol.U * Q.transpose()));
  };
  Y.P = with_fd_derivative(X.S, 2, coeff);
  return Y;
}

DifferentialForm double_two_form(const QuasiPoissonSpace& X) {
  if (X.S.factors.size() != 2 || X.S.factors[0].is_algebra || X.S.factors[1].is_algebra ||
      X.S.factors[0].tag || X.S.factors[1].tag)
    throw std::invalid_argument("double two-form: needs two plain group factors");
  const ModelPtr G = X.S.factors[0].model;
  const int d = G->d, D = X.S.D;
  auto assemble = [d, D](const RMat& M) {
    RMat W = RMat::Zero(D, D);
    W.block(0, d, d, d) = -M;
    W.block(d, 0, d, d) = M.transpose();
    return deg2_from_matrix(W);
  };
  DifferentialForm w;
  w.deg = 2;
  w.exact = true;
  w.coeff = [G, assemble](const Point& m) -> AltTensor {
    RMat M = 0.5 * (G->Ad(m.p[1].g) + G->Ad(CMat(m.p[0].g.adjoint())));
    return assemble(M);
  };
  w.dcoeff = [G, d, assemble](const Point& m, int dir) -> AltTensor {
    RMat adc = G->ad(RVec(RVec::Unit(G->d, dir % d)));
    RMat dM;
    if (dir < d)
      dM = -0.5 * adc * G->Ad(CMat(m.p[0].g.adjoint()));
    else
      dM = 0.5 * G->Ad(m.p[1].g) * adc;
    return assemble(dM);
  };
  return w;
}

AltTensor eta_pullback_at(const QuasiPoissonSpace& X, const Point& m) {
  AltTensor out(X.S.D, 3);
  for (size_t s = 0; s < X.A.slots.size(); ++s) {
    if (!X.moments[s] || !X.moments[s]->group_valued) continue;
    const MomentComponent& mc = *X.moments[s];
    const GroupModel& G = *X.A.slots[s].group;
    RMat L = G.Ad(CMat(mc.value(m).adjoint())) * mc.rmat(m);
    out += pushforward(cartan_tensor(G), RMat(L.transpose()));
  }
  return out;
}

DifferentialForm fusion_two_form(const QuasiPoissonSpace& X, const DifferentialForm& omega,
                                 int slot_i, int slot_j) {
  if (!X.moments[slot_i] || !X.moments[slot_j] || !X.moments[slot_i]->group_valued ||
      !X.moments[slot_j]->group_valued)
    throw std::invalid_argument("fusion two-form: both slots need group-valued moments");
  const MomentComponent mi = *X.moments[slot_i];
  const MomentComponent mj = *X.moments[slot_j];
  const ModelPtr G = X.A.slots[slot_i].group;
  DifferentialForm w = omega;
  auto coeff = [mi, mj, G, w](const Point& m) -> AltTensor {
    // -(1/2) Phi_i^* theta_a^L ^ Phi_j^* theta_a^R, columns R_i^T Ad_{Phi_i} e_a
    // and R_j^T e_a.
    RMat K = mi.rmat(m).transpose() * G->Ad(mi.value(m)) * mj.rmat(m);
    return w.coeff(m) - deg2_from_matrix(RMat(0.5 * (K - K.transpose())));
  };
  return with_fd_derivative(X.S, 2, coeff);
}

}  // namespace qpl
