#include "qpl/reduction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qpl/omega.hpp"

namespace qpl {

namespace {

// Zero-dimensional space with the trivial action and the constant identity
// moment: the genus-0 one-circle variety in its trimmed presentation.
QuasiPoissonSpace trivial_space(ModelPtr G) {
  QuasiPoissonSpace X;
  X.S.finalize();
  X.A.slots.push_back(ActionSlot{G, {}, "diag"});
  X.P.deg = 2;
  X.P.exact = true;
  X.P.coeff = [](const Point&) { return AltTensor(0, 2); };
  X.P.dcoeff = [](const Point&, int) { return AltTensor(0, 2); };
  MomentComponent mc;
  mc.target = G;
  mc.group_valued = true;
  mc.exact = true;
  mc.value = [n = G->n](const Point&) -> CMat { return CMat::Identity(n, n); };
  mc.rmat = [d = G->d](const Point&) -> RMat { return RMat::Zero(d, 0); };
  X.moments.push_back(mc);
  X.sample = [](std::mt19937_64&) { return Point{}; };
  return X;
}

const MomentComponent& single_moment(const QuasiPoissonSpace& X) {
  if (X.moments.size() != 1 || !X.moments[0] || !X.moments[0]->group_valued)
    throw std::invalid_argument("expected a one-slot space with a group-valued moment");
  return *X.moments[0];
}

Point flow_along(const ModelSpace& S, const Point& m, const RVec& v) {
  Point q = m;
  for (int dir = 0; dir < S.D; ++dir)
    if (v[dir] != 0.0) q = flow(S, q, dir, v[dir]);
  return q;
}

bool locally_free_at(const QuasiPoissonSpace& X, const Point& m) {
  int cols = 0;
  for (const auto& slot : X.A.slots) cols += slot.group->d;
  if (cols == 0) return true;
  if (X.S.D == 0) return false;
  RMat L(X.S.D, cols);
  int at = 0;
  for (const auto& slot : X.A.slots) {
    L.middleCols(at, slot.group->d) = slot_generator_matrix(X.S, slot, m);
    at += slot.group->d;
  }
  Eigen::BDCSVD<RMat> svd(L);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  // Relative cutoff with an absolute floor: a vanishing generator matrix has
  // roundoff-sized singular values that a purely relative cut would keep.
  const double cut = std::max(sv[0] * X.A.slots[0].group->tol.rank_rel, 1e-12);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return rank == cols;
}

int matrix_rank(const RMat& A, double rel) {
  if (A.rows() == 0 || A.cols() == 0) return 0;
  Eigen::BDCSVD<RMat> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = std::max(sv[0] * rel, 1e-12);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return rank;
}

}  // namespace

RepVarietySpace build_rep_variety(const SurfaceData& surf, ModelPtr G, RepVariant variant) {
  if (surf.boundary < 1)
    throw std::invalid_argument("build_rep_variety: needs at least one boundary circle");
  if (surf.genus < 0) throw std::invalid_argument("build_rep_variety: negative genus");
  if (static_cast<int>(surf.classes.size()) > surf.boundary)
    throw std::invalid_argument("build_rep_variety: class entry targets a missing circle");
  const int kept = surf.boundary - (variant == RepVariant::Trimmed ? 1 : 0);
  if (variant == RepVariant::Trimmed && static_cast<int>(surf.classes.size()) > kept &&
      surf.classes[kept])
    throw std::invalid_argument("build_rep_variety: the trimmed presentation drops a pinned circle");

  auto boundary_class = [&surf](int k) -> const std::optional<CMat>& {
    static const std::optional<CMat> none;
    return k < static_cast<int>(surf.classes.size()) ? surf.classes[k] : none;
  };

  RepVarietySpace R;
  R.surface = surf;
  R.variant = variant;
  if (surf.genus == 0 && kept == 0) {
    R.X = trivial_space(G);
  } else {
    std::vector<QuasiPoissonSpace> parts;
    for (int j = 0; j < surf.genus; ++j) parts.push_back(double_bold_DG(G));
    for (int k = 0; k < kept; ++k) {
      const auto& cls = boundary_class(k);
      parts.push_back(cls ? conjugacy_class_space(G, *cls) : canonical_group_space(G));
    }
    R.X = parts[0];
    for (size_t i = 1; i < parts.size(); ++i) R.X = fuse(product(R.X, parts[i]), 0, 1);
  }
  R.X.name = "surface(" + std::to_string(surf.genus) + "," + std::to_string(surf.boundary) +
             "|" + G->name + ")" + (variant == RepVariant::Trimmed ? " trimmed" : "");
  R.names = generator_names(surf.genus, kept);
  return R;
}

Point identity_level_embedding(const QuasiPoissonSpace& M, const Point& m) {
  const MomentComponent& mc = single_moment(M);
  Point q = m;
  q.p.push_back(FactorPoint{mc.value(m).adjoint(), RVec()});
  return q;
}

ScalarFunction trace_word_function(const ModelSpace& S, ModelPtr target, const Word& w) {
  ScalarFunction F;
  F.value = [S, w](const Point& m) -> double { return eval_word(S, w, m).trace().real(); };
  F.dvalue = [S, target, w](const Point& m, int dir) -> double {
    const CMat W = eval_word(S, w, m);
    const RMat R = word_right_jacobian(S, *target, w, m);
    return (target->alg_of(R.col(dir)) * W).trace().real();
  };
  return F;
}

ScalarFunction parse_trace_word(const RepVarietySpace& R, const std::string& text) {
  if (R.X.A.slots.empty()) throw std::invalid_argument("parse_trace_word: no action slot");
  return trace_word_function(R.X.S, R.X.A.slots[0].group, parse_word(text, R.names));
}

ScalarFunction fd_oracle(const ModelSpace& S, std::function<double(const Point&)> value) {
  ScalarFunction F;
  F.value = value;
  F.dvalue = [S, value](const Point& m, int dir) -> double {
    return default_engine().deriv_scalar(
        [&](double t) -> double { return value(flow(S, m, dir, t)); });
  };
  return F;
}

RVec differential_covector(const ModelSpace& S, const ScalarFunction& F, const Point& m) {
  RVec a(S.D);
  for (int dir = 0; dir < S.D; ++dir) a[dir] = F.dvalue(m, dir);
  return a;
}

double invariance_defect(const QuasiPoissonSpace& X, const ScalarFunction& F,
                         std::mt19937_64& rng, int npoints) {
  double worst = 0;
  for (int i = 0; i < npoints; ++i) {
    const Point m = X.sample(rng);
    const double base = F.value(m);
    for (const auto& slot : X.A.slots) {
      const CMat h = random_group(*slot.group, rng);
      worst = std::max(worst, std::abs(F.value(act(X.S, slot, h, m)) - base));
    }
  }
  return worst;
}

double poisson_bracket(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const Point& m) {
  const RMat B = deg2_matrix(X.P.coeff(m));
  return differential_covector(X.S, F1, m).dot(B * differential_covector(X.S, F2, m));
}

double reduced_bracket(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const Point& m) {
  for (const ScalarFunction* F : {&F1, &F2}) {
    const double base = F->value(m);
    for (const auto& slot : X.A.slots) {
      const GroupModel& G = *slot.group;
      for (int k = 0; k < 2; ++k) {
        RVec xi(G.d);
        for (int i = 0; i < G.d; ++i) xi[i] = (0.5 - 0.2 * k) * std::sin(1.0 + 2.0 * k + 0.7 * i);
        const double moved = F->value(act(X.S, slot, G.exp_coords(xi), m));
        if (std::abs(moved - base) > 1e-8)
          throw std::invalid_argument("reduced_bracket: observable is not invariant under the action");
      }
    }
  }
  return poisson_bracket(X, F1, F2, m);
}

double jacobi_residual(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const ScalarFunction& F3, const Point& m) {
  auto dbl = [&X](const ScalarFunction& a, const ScalarFunction& b, const ScalarFunction& c,
                  const Point& q) -> double {
    const ScalarFunction ab = fd_oracle(
        X.S, [&X, a, b](const Point& p) -> double { return poisson_bracket(X, a, b, p); });
    return poisson_bracket(X, ab, c, q);
  };
  const double cyc = dbl(F1, F2, F3, m) + dbl(F2, F3, F1, m) + dbl(F3, F1, F2, m);
  if (X.poisson) return cyc;
  RMat W(3, X.S.D);
  W.row(0) = differential_covector(X.S, F1, m);
  W.row(1) = differential_covector(X.S, F2, m);
  W.row(2) = differential_covector(X.S, F3, m);
  // Constant of the structure identity in the frame determinant pairing,
  // pinned numerically: the cyclic double bracket equals this multiple of the
  // background trivector on the three differentials.
  const double background = -0.5;
  return cyc - background * eval_on_covectors(cartan_field(X.S, X.A).coeff(m), W);
}

LevelSetPoint project_to_level_set(const QuasiPoissonSpace& X, const Point& m0,
                                   const CMat& base, int max_iter) {
  const MomentComponent& mc = single_moment(X);
  const ModelPtr Gp = mc.target;
  const GroupModel& G = *Gp;
  const Factor class_factor{Gp, false, 0, ClassTag{base, 1e-9}};
  auto certificate = [&](const Point& q) -> double { return class_distance(class_factor, mc.value(q)); };

  const bool central = (G.Ad(base) - RMat::Identity(G.d, G.d)).norm() <= 1e-12;

  // Log coordinates of Phi base^{-1} when the class is a single central
  // point, power-trace invariants otherwise; both with exact jacobians
  // through the moment's right-trivialized tangent.
  MomentComponent log_shift;
  if (central) {
    MomentComponent cinv;
    cinv.target = Gp;
    cinv.group_valued = true;
    cinv.exact = mc.exact;
    cinv.value = [bi = CMat(base.adjoint())](const Point&) -> CMat { return bi; };
    cinv.rmat = [d = G.d, D = X.S.D](const Point&) -> RMat { return RMat::Zero(d, D); };
    log_shift = log_moment(X.S, moment_product(X.S, mc, cinv));
  }
  std::vector<std::complex<double>> base_traces;
  for (int k = 1, n = G.n; k < n; ++k) {
    CMat pw = base;
    for (int j = 1; j < k; ++j) pw = pw * base;
    base_traces.push_back(pw.trace());
  }

  auto residual = [&](const Point& q) -> RVec {
    if (central) return log_shift.alg_value(q);
    const CMat Phi = mc.value(q);
    RVec r(2 * (G.n - 1));
    CMat pw = CMat::Identity(G.n, G.n);
    for (int k = 1; k < G.n; ++k) {
      pw = pw * Phi;
      const std::complex<double> z = pw.trace() - base_traces[k - 1];
      r[2 * (k - 1)] = z.real();
      r[2 * k - 1] = z.imag();
    }
    return r;
  };
  auto jacobian = [&](const Point& q) -> RMat {
    if (central) return log_shift.rmat(q);
    const CMat Phi = mc.value(q);
    const RMat R = mc.rmat(q);
    RMat J(2 * (G.n - 1), X.S.D);
    CMat pw = CMat::Identity(G.n, G.n);
    for (int k = 1; k < G.n; ++k) {
      pw = pw * Phi;
      for (int v = 0; v < X.S.D; ++v) {
        const std::complex<double> z =
            static_cast<double>(k) * (G.alg_of(R.col(v)) * pw).trace();
        J(2 * (k - 1), v) = z.real();
        J(2 * k - 1, v) = z.imag();
      }
    }
    return J;
  };
  auto objective = [&](const Point& q) -> double {
    try {
      return residual(q).squaredNorm();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  LevelSetPoint out;
  out.m = m0;
  out.distance = certificate(m0);
  out.locally_free = locally_free_at(X, m0);
  if (out.distance <= 1e-9) return out;

  Point q = m0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    const RVec r = residual(q);
    const RMat Q = tangent_basis(X.S, q);
    const RMat JQ = jacobian(q) * Q;
    Eigen::JacobiSVD<RMat> svd(JQ, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-12);
    const RVec v = Q * RVec(-svd.solve(r));
    if (v.norm() < 1e-14)
      throw std::runtime_error("project_to_level_set: stalled, no descent direction");
    const double n0 = r.squaredNorm();
    double alpha = 1.0;
    bool accepted = false;
    for (int t = 0; t < 16; ++t, alpha *= 0.5) {
      const Point cand = flow_along(X.S, q, alpha * v);
      if (objective(cand) < n0 * (1.0 - 1e-4 * alpha)) {
        q = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) throw std::runtime_error("project_to_level_set: line search stalled");
    out.distance = certificate(q);
    if (out.distance <= 1e-9) {
      out.m = q;
      out.locally_free = locally_free_at(X, q);
      out.iterations = iter;
      return out;
    }
  }
  throw std::runtime_error("project_to_level_set: no convergence within the iteration budget");
}

TangencyReport tangency_and_rank_checks(const QuasiPoissonSpace& X,
                                        const std::vector<ScalarFunction>& fns,
                                        const Point& m) {
  const MomentComponent& mc = single_moment(X);
  const RMat R = mc.rmat(m);
  const RMat sharp = sharp_matrix(X.P.coeff(m));
  TangencyReport rep;
  for (const auto& F : fns) {
    const RVec alpha = differential_covector(X.S, F, m);
    rep.tangency = std::max(rep.tangency, (R * (sharp * alpha)).norm());
  }
  rep.moment_rank = matrix_rank(R, mc.target->tol.rank_rel);
  rep.moment_rank_full = rep.moment_rank == mc.target->d;
  rep.locally_free = locally_free_at(X, m);
  return rep;
}

}  // namespace qpl
