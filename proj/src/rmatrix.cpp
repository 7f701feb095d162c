#include "qpl/rmatrix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qpl {

namespace {

RMat antisym(const RMat& m) { return 0.5 * (m - m.transpose()); }

double min_singular(const RMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<RMat> svd(m);
  return svd.singularValues().minCoeff();
}

// (Ad_h - I) compressed to h-perp.
RMat perp_defect(const Slice& S, const CMat& h) {
  const RMat& Qp = S.hperp_basis;
  return RMat(Qp.transpose() * (S.G->Ad(h) - RMat::Identity(S.G->d, S.G->d)) * Qp);
}

}  // namespace

RMat dynamical_T_deriv_fd(const GroupModel& G, const RVec& xi, int dir,
                          const DerivativeEngine& eng) {
  const int d = G.d;
  RVec flat = eng.deriv([&](double t) -> RVec {
    RVec x = xi;
    x[dir] += t;
    RMat T = dynamical_T(G, x);
    return RVec(Eigen::Map<const RVec>(T.data(), d * d));
  });
  return RMat(Eigen::Map<const RMat>(flat.data(), d, d));
}

RMat dynamical_T_deriv_cs(const GroupModel& G, const RVec& xi, int dir, double h) {
  if (!G.in_natural_domain(xi))
    throw std::domain_error("dynamical T: ad spectrum outside the exp-regular domain");
  const int d = G.d;
  Eigen::MatrixXcd adc = G.ad(xi).cast<cxd>();
  adc += cxd(0.0, h) * G.ad(RVec::Unit(d, dir)).cast<cxd>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(adc);
  if (es.info() != Eigen::Success) throw std::runtime_error("complex eigensolver failed");
  Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::VectorXcd flam(d);
  for (int i = 0; i < d; ++i) flam[i] = phi_fn(lam[i]);
  Eigen::MatrixXcd V = es.eigenvectors();
  Eigen::MatrixXcd Tc = V * flam.asDiagonal() * V.inverse();
  return RMat(Tc.imag() / h);
}

double cdybe_residual(const GroupModel& G, const RVec& xi, bool complex_step,
                      const DerivativeEngine& eng) {
  const int d = G.d;
  RMat T = dynamical_T(G, xi);
  std::vector<RMat> dT(d);
  for (int c = 0; c < d; ++c)
    dT[c] = complex_step ? dynamical_T_deriv_cs(G, xi, c) : dynamical_T_deriv_fd(G, xi, c, eng);

  // quad(a,b,c) = sum_{k,l} T_{ak} f_{kbl} T_{lc}
  auto quad = [&](int a, int b, int c) {
    double s = 0;
    for (int k = 0; k < d; ++k) {
      if (T(a, k) == 0.0) continue;
      double inner = 0;
      for (int l = 0; l < d; ++l) inner += G.fc(k, b, l) * T(l, c);
      s += T(a, k) * inner;
    }
    return s;
  };
  auto one = [&](int a, int b, int c) { return dT[c](a, b) + quad(a, b, c); };

  double worst = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double lhs = one(a, b, c) + one(b, c, a) + one(c, a, b);
        worst = std::max(worst, std::abs(lhs - 0.25 * G.fc(a, b, c)));
      }
  return worst;
}

double tab_identity_residual(const GroupModel& G, const RVec& xi) {
  const int d = G.d;
  RMat ad = G.ad(xi);
  RMat T = dynamical_T(G, xi);
  RMat nu = analytic_of_ad(G, xi, nu_fn);
  RMat adinv_exp = analytic_of_ad(G, xi, [](cxd s) { return std::exp(-s); });
  RMat lhs = ad * T;
  RMat rhs = RMat::Identity(d, d) - 0.5 * nu * (RMat::Identity(d, d) + adinv_exp);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double nu_phi_scalar_residual(double s) {
  cxd z(s, 0.0);
  cxd lhs = 0.5 * (nu_fn(z) + nu_fn(-z));
  cxd rhs = 1.0 - z * phi_fn(z);
  return std::abs(lhs - rhs);
}

CMat Slice::point(const RVec& w) const { return base * H.exp_coords(w); }

Slice make_slice(ModelPtr G, const CMat& base, unsigned seed) {
  Slice S;
  S.G = G;
  S.base = base;
  CentralizerSplit split = centralizer_split(*G, base);
  S.h_basis = split.h_basis;
  S.hperp_basis = split.perp_basis;
  S.H = subgroup_model(*G, split.h_basis, "cent(" + G->name + ")");
  S.f_sub = embedded_subalgebra_f(*G, split.proj_h);

  const int k = split.dim_h;
  if (k == G->d) {
    // Central base point: no transverse directions, any bounded ball works.
    S.radius = 1.0;
    S.sigma_floor = std::numeric_limits<double>::infinity();
    return S;
  }

  double sigma0 = min_singular(perp_defect(S, base));
  double floor = std::max(100 * G->tol.rank_rel, 0.02 * sigma0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.15, 1.0);

  auto sample_sigma = [&](double rho, int count) {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < count; ++i) {
      RVec w(k);
      for (int a = 0; a < k; ++a) w[a] = gauss(rng);
      w *= rho * (i < count / 2 ? 1.0 : unif(rng)) / w.norm();
      worst = std::min(worst, min_singular(perp_defect(S, S.point(w))));
    }
    return worst;
  };
  auto ok = [&](double rho) { return sample_sigma(rho, 16) > floor; };

  double lo = 0, hi = 0.05;
  if (!ok(hi)) {
    hi = 0.05;
  } else {
    while (hi < 3.0 && ok(2 * hi)) hi *= 2;
    lo = hi;
    hi = 2 * hi;
  }
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  S.radius = 0.8 * lo;
  S.sigma_floor = sample_sigma(S.radius, 24);
  return S;
}

RMat slice_r(const Slice& S, const CMat& h) {
  const int d = S.G->d;
  const RMat& Qp = S.hperp_basis;
  if (Qp.cols() == 0) return RMat::Zero(d, d);
  RMat Ap = RMat(Qp.transpose() * S.G->Ad(h) * Qp);
  RMat num = Ap + RMat::Identity(Ap.rows(), Ap.cols());
  RMat den = Ap - RMat::Identity(Ap.rows(), Ap.cols());
  if (min_singular(den) < 1e-10)
    throw std::domain_error("slice r: Ad_h - I degenerates on h-perp");
  // B (Ap - I) = Ap + I  =>  B = (Ap + I)(Ap - I)^{-1}; antisymmetric for
  // orthogonal Ap with no unit eigenvalue.
  RMat B = den.transpose().partialPivLu().solve(num.transpose()).transpose();
  RMat r_perp = -0.5 * antisym(B);
  return RMat(Qp * r_perp * Qp.transpose());
}

double ev2_residual(const Slice& S, const CMat& h, const DerivativeEngine& eng) {
  const GroupModel& G = *S.G;
  const int d = G.d;
  RMat Pi = S.h_basis * S.h_basis.transpose();
  RMat r = slice_r(S, h);
  RMat W = Pi * (RMat::Identity(d, d) + G.Ad(h.adjoint()));  // column a = projected frame sum

  std::vector<RMat> Dr(d);
  for (int a = 0; a < d; ++a) {
    CMat wa = G.alg_of(RVec(W.col(a)));
    RVec flat = eng.deriv([&](double t) -> RVec {
      RMat rt = slice_r(S, CMat(h * G.exp_alg(t * wa)));
      return RVec(Eigen::Map<const RVec>(rt.data(), d * d));
    });
    Dr[a] = RMat(Eigen::Map<const RMat>(flat.data(), d, d));
  }

  auto fsub = [&](int a, int b, int c) {
    return S.f_sub[(static_cast<size_t>(a) * d + b) * d + c];
  };
  auto quad = [&](int a, int b, int c) {
    double s = 0;
    for (int k = 0; k < d; ++k) {
      if (r(a, k) == 0.0) continue;
      double inner = 0;
      for (int l = 0; l < d; ++l) inner += G.fc(k, b, l) * r(l, c);
      s += r(a, k) * inner;
    }
    return s;
  };
  auto one = [&](int a, int b, int c) { return 0.5 * Dr[a](b, c) + quad(a, b, c); };

  double worst = 0;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        double lhs = one(a, b, c) + one(b, c, a) + one(c, a, b);
        worst = std::max(worst, std::abs(lhs - 0.25 * (G.fc(a, b, c) - fsub(a, b, c))));
      }
  return worst;
}

namespace {

struct SplitFrames {
  RMat N;     // moment pullbacks of h-perp covectors, unit columns
  RMat Tann;  // annihilators of the embedded normal directions, unit columns
  RMat Gs;    // slot generator matrix
  CMat phi;   // moment value
};

SplitFrames split_frames(const QuasiPoissonSpace& X, const Slice& S, const Point& m) {
  if (X.A.slots.size() != 1 || X.moments.size() != 1 || !X.moments[0])
    throw std::invalid_argument("splitting checks need a single-slot Hamiltonian space");
  SplitFrames F;
  const MomentComponent& mc = *X.moments[0];
  F.phi = mc.value(m);
  RMat R = mc.rmat(m);
  F.Gs = slot_generator_matrix(X.S, X.A.slots[0], m);
  F.N = R.transpose() * S.hperp_basis;
  for (int j = 0; j < F.N.cols(); ++j) F.N.col(j).normalize();
  RMat V = F.Gs * S.hperp_basis;
  if (V.cols() == 0) {
    // trivial perp space: no embedded normal directions, every covector
    // annihilates them
    F.Tann = RMat::Identity(X.S.D, X.S.D);
    return F;
  }
  Eigen::JacobiSVD<RMat> svd(V, Eigen::ComputeFullU);
  RVec sv = svd.singularValues();
  double th = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > th) ++rank;
  F.Tann = svd.matrixU().rightCols(X.S.D - rank);
  return F;
}

}  // namespace

double splitting_orthogonality_residual(const QuasiPoissonSpace& X, const Slice& S,
                                        const Point& m) {
  SplitFrames F = split_frames(X, S, m);
  if (F.N.cols() == 0 || F.Tann.cols() == 0) return 0.0;
  RMat B = deg2_matrix(X.P.coeff(m));
  return (F.N.transpose() * B * F.Tann).cwiseAbs().maxCoeff();
}

double perp_block_residual(const QuasiPoissonSpace& X, const Slice& S, const Point& m) {
  SplitFrames F = split_frames(X, S, m);
  if (F.N.cols() == 0) return 0.0;
  RMat B = deg2_matrix(X.P.coeff(m));
  RMat Br = F.Gs * (-slice_r(S, F.phi)) * F.Gs.transpose();
  return (F.N.transpose() * (B - Br) * F.N).cwiseAbs().maxCoeff();
}

QuasiPoissonSpace cross_section_space(const Slice& S) {
  auto Hp = std::make_shared<const GroupModel>(S.H);
  QuasiPoissonSpace Y = canonical_group_space(Hp);
  Y.name = "section(" + S.G->name + ")";
  ModelPtr Gp = S.G;
  RMat Qh = S.h_basis;
  Y.P.coeff = [Gp, Qh](const Point& m) {
    const CMat& h = m.p[0].g;
    RMat BG = 0.5 * (Gp->Ad(h.adjoint()) - Gp->Ad(h));
    return deg2_from_matrix(RMat(Qh.transpose() * BG * Qh));
  };
  Y.P.dcoeff = [Gp, Qh](const Point& m, int dir) {
    const CMat& h = m.p[0].g;
    RMat adu = Gp->ad(RVec(Qh.col(dir)));
    RMat dBG = 0.5 * (-adu * Gp->Ad(h.adjoint()) - Gp->Ad(h) * adu);
    return deg2_from_matrix(RMat(Qh.transpose() * dBG * Qh));
  };
  Y.P.exact = true;
  const int k = S.dim_h();
  const double rho = S.radius;
  CMat base = S.base;
  Y.sample = [Hp, base, k, rho](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif(0.15, 1.0);
    RVec w(k);
    for (int a = 0; a < k; ++a) w[a] = gauss(rng);
    w *= 0.75 * rho * unif(rng) / w.norm();
    return Point{{FactorPoint{base * Hp->exp_coords(w), RVec()}}};
  };
  return Y;
}

QuasiPoissonSpace poisson_cross_section_space(const Slice& S) {
  QuasiPoissonSpace Y = cross_section_space(S);
  MomentComponent mc = *Y.moments[0];
  CMat base_inv = S.base.adjoint();
  auto old_value = mc.value;
  mc.value = [base_inv, old_value](const Point& m) { return CMat(base_inv * old_value(m)); };
  // The base point is central in H, so the recentering leaves the
  // right-trivialized moment jacobian unchanged.
  Y.moments[0] = mc;
  return logarithmize(Y, 0);
}

}  // namespace qpl
