#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "qpl/cohomology.hpp"
#include "qpl/omega.hpp"
#include "qpl/reduction.hpp"
#include "qpl/report.hpp"
#include "qpl/rmatrix.hpp"

namespace qpl {

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Accumulates CheckRecords. Every residual callback runs under a try/catch:
// an exception is an honest failure (infinite residual), never a crash of
// the whole suite.
struct Collector {
  Report& rep;
  Tolerances tol;

  void record(const std::string& name, const std::string& identity, TolClass cls,
              double tolerance, const std::function<double()>& fn) {
    CheckRecord c;
    c.name = name;
    c.identity = identity;
    c.tol_class = tol_class_name(cls);
    c.tolerance = tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.residual = fn();
    } catch (const std::exception&) {
      c.residual = std::numeric_limits<double>::infinity();
    }
    c.runtime_ms = ms_since(t0);
    c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
    rep.checks.push_back(c);
  }

  // tolerance from the taxonomy class
  void add(const std::string& name, const std::string& identity, TolClass cls,
           const std::function<double()>& fn) {
    record(name, identity, cls, tol_of(tol, cls), fn);
  }
  // pinned tolerance tighter than (or unrelated to) the class default
  void add_at(const std::string& name, const std::string& identity, TolClass cls,
              double tolerance, const std::function<double()>& fn) {
    record(name, identity, cls, tolerance, fn);
  }

  // one record per certified identity of the space
  void add_certify(const QuasiPoissonSpace& X, unsigned long long seed, int npoints) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Residual> rs;
    bool failed = false;
    try {
      std::mt19937_64 rng(seed);
      rs = certify(X, rng, npoints);
    } catch (const std::exception&) {
      failed = true;
    }
    const double ms = ms_since(t0);
    if (failed || rs.empty()) {
      CheckRecord c;
      c.name = X.name + " :: certify";
      c.identity = "defining identities";
      c.tol_class = tol_class_name(TolClass::ClosedForm);
      c.tolerance = tol.closed_form;
      c.residual = std::numeric_limits<double>::infinity();
      c.pass = false;
      c.runtime_ms = ms;
      rep.checks.push_back(c);
      return;
    }
    const double share = ms / static_cast<double>(rs.size());
    for (const auto& r : rs) {
      CheckRecord c;
      c.name = r.name + " :: " + r.identity;
      c.identity = r.identity;
      c.tol_class = tol_class_name(r.cls);
      c.tolerance = tol_of(tol, r.cls);
      c.residual = r.value;
      c.pass = std::isfinite(c.residual) && c.residual <= c.tolerance;
      c.runtime_ms = share;
      rep.checks.push_back(c);
    }
  }
};

bool abelian(const GroupModel& G) {
  for (int c = 0; c < G.d; ++c)
    for (int p = 0; p < G.d; ++p)
      for (int q = 0; q < G.d; ++q)
        if (std::abs(G.fc(c, p, q)) > 0) return false;
  return true;
}

// Slice base point per model: a repeated-eigenvalue element on su3 so the
// centralizer is non-abelian, a generic one-parameter element otherwise.
CMat standard_slice_base(const GroupModel& G) {
  if (G.name == "su3") {
    CMat base = CMat::Zero(3, 3);
    base(0, 0) = std::polar(1.0, 0.4);
    base(1, 1) = std::polar(1.0, 0.4);
    base(2, 2) = std::polar(1.0, -0.8);
    return base;
  }
  return G.exp_coords(RVec(RVec::Unit(G.d, G.d - 1) * 1.0));
}

// sample-count cap by manifold dimension, so high-dimensional spaces do not
// dominate the suite runtime
int capped(int points, int D) {
  if (D <= 4) return points;
  if (D <= 9) return std::min(points, 10);
  return std::min(points, 5);
}

// ---------------------------------------------------------------- qp-core

void suite_qp_core(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  std::mt19937_64 seedgen(cfg.seed);
  const CMat g0 = random_group(*G, seedgen);

  auto can = canonical_group_space(G);
  auto lin = linear_poisson_space(G);
  auto cls = conjugacy_class_space(G, g0);

  C.add_certify(can, cfg.seed + 1, capped(np, can.S.D));
  C.add_certify(lin, cfg.seed + 2, capped(np, lin.S.D));
  C.add_certify(cls, cfg.seed + 3, capped(np, cls.S.D));

  C.add_at("class bivector extends the ambient bivector", "P_cls = P_G on the class",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 4);
             double w = 0;
             for (int it = 0; it < capped(np, cls.S.D); ++it) {
               Point m = cls.sample(rng);
               w = std::max(w, (cls.P.coeff(m) - can.P.coeff(m)).norm());
             }
             return w;
           });

  C.add("class non-degeneracy flag", "rank P# (+) ker(1+Ad_Phi) = dim T_m",
        TolClass::RankRel, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 5);
          double w = 0;
          for (int it = 0; it < std::min(np, 8); ++it) {
            Point m = cls.sample(rng);
            w = std::max(w, nondegeneracy(cls, m).nondegenerate ? 0.0 : 1.0);
          }
          return w;
        });

  const std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  C.add_at("chart linearization: quadratic ratio bounded",
           "|exp^* P_G(t xi) - t P_0(xi)| <= C t^2", TolClass::ClosedForm, 1.0,
           [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 6);
             RVec xi = random_algebra(*G, rng, 1.0);
             double w = 0;
             for (const auto& r : linearization_check(*G, xi, ts))
               w = std::max(w, r.ratio2);
             return w;
           });
  C.add_at("chart linearization: cubic ratio stable", "residual / t^3 varies < 20%",
           TolClass::ClosedForm, 0.2, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 6);
             RVec xi = random_algebra(*G, rng, 1.0);
             auto rows = linearization_check(*G, xi, ts);
             double lo = rows[0].ratio3, hi = rows[0].ratio3;
             for (const auto& r : rows) {
               lo = std::min(lo, r.ratio3);
               hi = std::max(hi, r.ratio3);
             }
             return hi <= 1e-14 ? 0.0 : (hi - lo) / hi;
           });
}

// ----------------------------------------------------------------- fusion

void suite_fusion(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  auto can = canonical_group_space(G);
  auto D = double_DG(G);
  auto Db = double_bold_DG(G);
  auto GG = fuse(product(can, can), 0, 1);

  C.add_certify(D, cfg.seed + 1, capped(np, D.S.D));
  C.add_certify(Db, cfg.seed + 2, capped(np, Db.S.D));
  C.add_certify(GG, cfg.seed + 3, capped(np, GG.S.D));

  C.add_at("one-sided slot fusion recovers the canonical bivector", "fuse(0,1) P_bi = P_G",
           TolClass::ClosedForm, 1e-13, [&]() -> double {
             auto B = group_as_bi_space(G);
             auto F = fuse(B, 0, 1);
             std::mt19937_64 rng(cfg.seed + 4);
             double w = 0;
             for (int it = 0; it < capped(np, B.S.D); ++it) {
               Point m = B.sample(rng);
               w = std::max(w, (F.P.coeff(m) - can.P.coeff(m)).norm());
             }
             return w;
           });

  C.add_at("fusion is associative on a triple product",
           "fuse(fuse(0,1),0,1) = fuse(fuse(1,2),0,1)", TolClass::ClosedForm, 1e-12,
           [&]() -> double {
             auto Z = product(product(can, can), can);
             auto left = fuse(fuse(Z, 0, 1), 0, 1);
             auto right = fuse(fuse(Z, 1, 2), 0, 1);
             std::mt19937_64 rng(cfg.seed + 5);
             double w = 0;
             for (int it = 0; it < capped(np, Z.S.D); ++it) {
               Point m = Z.sample(rng);
               w = std::max(w, (left.P.coeff(m) - right.P.coeff(m)).norm());
               w = std::max(w, (left.moments[0]->value(m) - right.moments[0]->value(m)).norm());
               w = std::max(w, (left.moments[0]->rmat(m) - right.moments[0]->rmat(m)).norm());
             }
             return w;
           });

  C.add("multiplication map transports the fused bivector", "Mult_* (P (+) P - psi) = P_G",
        TolClass::ClosedForm, [&]() -> double {
          ModelSpace Gs = product_space({G});
          SmoothMap mult = mult_map(GG.S, Gs);
          std::mt19937_64 rng(cfg.seed + 6);
          double w = 0;
          for (int it = 0; it < capped(np, GG.S.D); ++it) {
            Point m = GG.sample(rng);
            AltTensor push = pushforward_at(GG.P, mult, m);
            w = std::max(w, (push - can.P.coeff(mult.value(m))).norm());
          }
          return w;
        });

  std::mt19937_64 seedgen(cfg.seed);
  auto cls = conjugacy_class_space(G, random_group(*G, seedgen));
  C.add("action map transports the fused bivector", "Act_* (P_G (+) P_C - psi) = P_C",
        TolClass::ClosedForm, [&]() -> double {
          auto GM = fuse(product(can, cls), 0, 1);
          SmoothMap amap = action_map(GM.S, cls.S, cls.A, 0);
          std::mt19937_64 rng(cfg.seed + 7);
          double w = 0;
          for (int it = 0; it < capped(np, GM.S.D); ++it) {
            Point m = GM.sample(rng);
            AltTensor push = pushforward_at(GM.P, amap, m);
            w = std::max(w, (push - cls.P.coeff(amap.value(m))).norm());
          }
          return w;
        });

  C.add_certify(fuse(product(cls, cls), 0, 1), cfg.seed + 8, capped(np, 2 * G->d));

  SmoothMap R = fusion_twist(D, 0, 1);
  auto F01 = fuse(D, 0, 1);
  auto F10 = fuse(D, 1, 0);
  C.add_at("fusion twist reverses the moment order", "Phi_{10}(R m) = Phi_{01}(m)",
           TolClass::ClosedForm, 1e-12, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 9);
             double w = 0;
             for (int it = 0; it < capped(np, D.S.D); ++it) {
               Point m = D.sample(rng);
               w = std::max(
                   w, (F10.moments[0]->value(R.value(m)) - F01.moments[0]->value(m)).norm());
             }
             return w;
           });
  C.add("fusion twist transports the bivector", "R_* P_{01} = P_{10}", TolClass::FdFirst,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 9);
          double w = 0;
          for (int it = 0; it < std::min(np, 6); ++it) {
            Point m = D.sample(rng);
            AltTensor push = pushforward_at(F01.P, R, m);
            w = std::max(w, (push - F10.P.coeff(R.value(m))).norm());
          }
          return w;
        });
}

// ---------------------------------------------------------------- rmatrix

void suite_rmatrix(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;

  C.add_at("scalar companion identity on a grid", "(1/2)(nu(s) + nu(-s)) = 1 - s phi(s)",
           TolClass::ClosedForm, 1e-12, [&]() -> double {
             double w = 0;
             for (double s : {-2.9, -1.7, -0.3, -1e-5, 0.0, 1e-5, 0.3, 1.7, 2.9})
               w = std::max(w, nu_phi_scalar_residual(s));
             return w;
           });

  C.add_at("kernel frame identity", "ad_xi T e_a = (1 - (1/2) nu(ad_xi)(1 + e^{-ad_xi})) e_a",
           TolClass::ClosedForm, 1e-10, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 1);
             double w = 0;
             for (int it = 0; it < np; ++it)
               w = std::max(w, tab_identity_residual(*G, random_algebra(*G, rng)));
             return w;
           });

  C.add_at("kernel symmetry and equivariance",
           "T(-xi) = -T(xi) = T(xi)^T, T(Ad xi) = Ad T(xi) Ad^T", TolClass::ClosedForm, 1e-10,
           [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 2);
             double w = 0;
             for (int it = 0; it < np; ++it) {
               RVec xi = random_algebra(*G, rng);
               RMat T = dynamical_T(*G, xi);
               w = std::max(w, (T + T.transpose()).norm());
               w = std::max(w, (dynamical_T(*G, RVec(-xi)) + T).norm());
               RMat Ad = G->Ad(random_group(*G, rng));
               w = std::max(w,
                            (dynamical_T(*G, RVec(Ad * xi)) - Ad * T * Ad.transpose()).norm());
             }
             return w;
           });

  // both engines carry O(h^2) truncation, so their gap scatters at the
  // fd-first scale over random draws
  C.add("kernel derivative: finite differences vs complex step", "dT/dxi_c: FD = CS",
        TolClass::FdFirst, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 3);
             double w = 0;
             for (int it = 0; it < std::min(np, 6); ++it) {
               RVec xi = random_algebra(*G, rng);
               for (int c = 0; c < G->d; ++c)
                 w = std::max(w, (dynamical_T_deriv_fd(*G, xi, c) -
                                  dynamical_T_deriv_cs(*G, xi, c))
                                     .cwiseAbs()
                                     .maxCoeff());
             }
             return w;
           });

  C.add("classical dynamical Yang-Baxter (finite differences)",
        "Cycl(dT_ab/dxi_c + T_ak f_kbl T_lc) = (1/4) f_abc", TolClass::FdSecond,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 4);
          double w = 0;
          for (int it = 0; it < std::min(np, 10); ++it)
            w = std::max(w, cdybe_residual(*G, random_algebra(*G, rng), false));
          return w;
        });
  C.add("classical dynamical Yang-Baxter (complex step)",
        "Cycl(dT_ab/dxi_c + T_ak f_kbl T_lc) = (1/4) f_abc", TolClass::FdSecond,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 5);
          double w = 0;
          for (int it = 0; it < std::min(np, 10); ++it)
            w = std::max(w, cdybe_residual(*G, random_algebra(*G, rng), true));
          return w;
        });

  auto lin = linear_poisson_space(G);
  auto can = canonical_group_space(G);
  C.add_certify(exponentiate(lin, 0), cfg.seed + 6, capped(np, G->d));
  C.add_certify(logarithmize(can, 0), cfg.seed + 7, capped(np, G->d));

  C.add_at("exponentiate and logarithmize invert each other",
           "log(exp(P_0)) = P_0, exp moment = Phi", TolClass::ClosedForm, 1e-9,
           [&]() -> double {
             auto back = logarithmize(exponentiate(lin, 0), 0);
             std::mt19937_64 rng(cfg.seed + 8);
             double w = 0;
             for (int it = 0; it < capped(np, G->d); ++it) {
               Point m = lin.sample(rng);
               w = std::max(w, (back.P.coeff(m) - lin.P.coeff(m)).norm());
               w = std::max(w, (back.moments[0]->alg_value(m) - m.p[0].xi).norm());
             }
             return w;
           });

  C.add("exponential chart pullback of the group bivector", "exp^* P_G = P_0 - T_M",
        TolClass::ClosedForm, [&]() -> double {
          ModelSpace gA = algebra_space(G);
          ModelSpace Gs = product_space({G});
          SmoothMap E = exp_chart_map(gA, Gs);
          std::mt19937_64 rng(cfg.seed + 9);
          double w = 0;
          for (int it = 0; it < std::min(np, 8); ++it) {
            RVec x = random_algebra(*G, rng);
            Point px;
            px.p.push_back(FactorPoint{CMat(), x});
            RMat J = E.jac(px);
            CMat g = G->exp_coords(x);
            RMat B = 0.5 * (G->Ad(CMat(g.adjoint())) - G->Ad(g));
            RMat Ji = J.inverse();
            RMat pull = Ji * B * Ji.transpose();
            RMat ad = G->ad(x);
            RMat target = -ad - ad * dynamical_T(*G, x) * ad.transpose();
            w = std::max(w, (pull - target).norm());
          }
          return w;
        });
}

// ---------------------------------------------------------- cross-section

void suite_cross_section(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  const CMat base = standard_slice_base(*G);
  const Slice S = make_slice(G, base);

  C.add("certified slice radius", "(Ad_h - 1)|_perp invertible on the ball",
        TolClass::RankRel, [&]() -> double {
          const bool ok = S.radius > 0 && (S.dim_h() == G->d || S.sigma_floor > 0);
          return ok ? 0.0 : 1.0;
        });

  // deterministic slice points spread over the certified ball
  auto slice_points = [&](unsigned long long seed, int count) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<CMat> hs;
    for (int i = 0; i < count; ++i) {
      RVec w(S.dim_h());
      for (int a = 0; a < S.dim_h(); ++a) w[a] = gauss(rng);
      const double nw = std::max(w.norm(), 1e-12);
      w *= (0.15 + 0.5 * (double(i) / std::max(1, count - 1))) * S.radius / nw;
      hs.push_back(S.point(w));
    }
    return hs;
  };

  C.add_at("slice kernel compression", "r = -(1/2)(Ad_h + 1)(Ad_h - 1)^{-1}|_perp, r|_h = 0",
           TolClass::ClosedForm, 1e-12, [&]() -> double {
             double w = 0;
             for (const CMat& h : slice_points(cfg.seed + 1, std::min(np, 8))) {
               RMat r = slice_r(S, h);
               w = std::max(w, (r + r.transpose()).norm());
               w = std::max(w, (r * S.h_basis).norm());
               w = std::max(w, (S.h_basis.transpose() * r).norm());
             }
             return w;
           });

  C.add("mixed Yang-Baxter on the slice",
        "Cycl((1/2) D_a r_bc + r_ak f_kbl r_lc) = (1/4)(f_abc - f^h_abc)", TolClass::FdSecond,
        [&]() -> double {
          double w = 0;
          for (const CMat& h : slice_points(cfg.seed + 2, std::min(np, 8)))
            w = std::max(w, ev2_residual(S, h));
          return w;
        });

  auto can = canonical_group_space(G);
  C.add_at("splitting orthogonality", "P_G(Phi^* perp-directions, orbit annihilators) = 0",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             double w = 0;
             for (const CMat& h : slice_points(cfg.seed + 3, std::min(np, 8))) {
               Point m{{FactorPoint{h, RVec()}}};
               w = std::max(w, splitting_orthogonality_residual(can, S, m));
             }
             return w;
           });
  C.add_at("normal block reproduces the slice kernel", "P_G|_perp = -Phi^* r",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             double w = 0;
             for (const CMat& h : slice_points(cfg.seed + 3, std::min(np, 8))) {
               Point m{{FactorPoint{h, RVec()}}};
               w = std::max(w, perp_block_residual(can, S, m));
             }
             return w;
           });

  QuasiPoissonSpace Y = cross_section_space(S);
  C.add_certify(Y, cfg.seed + 4, capped(np, Y.S.D));

  C.add_at("cross-section restricts to the centralizer structure", "P_Y = P_H on the section",
           TolClass::ClosedForm, 1e-10, [&]() -> double {
             auto H = std::make_shared<const GroupModel>(S.H);
             auto canH = canonical_group_space(H);
             std::mt19937_64 rng(cfg.seed + 5);
             double w = 0;
             for (int it = 0; it < capped(np, Y.S.D); ++it) {
               Point m = Y.sample(rng);
               w = std::max(w, (Y.P.coeff(m) - canH.P.coeff(m)).norm());
             }
             return w;
           });

  C.add_certify(poisson_cross_section_space(S), cfg.seed + 6, capped(np, Y.S.D));
}

// ------------------------------------------------------- omega-equivalence

void suite_omega(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  auto D = double_DG(G);
  DifferentialForm wD = double_two_form(D);

  C.add_at("double: joint solve matches the closed-form 2-form",
           "W = [[0,-M],[M^T,0]], M = (1/2)(Ad_{a2} + Ad_{a1^-1})", TolClass::ClosedForm, 1e-9,
           [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 1);
             double w = 0;
             for (int it = 0; it < capped(np, D.S.D); ++it) {
               Point m = D.sample(rng);
               OmegaSolveReport rep = omega_matrix_at(D, m);
               w = std::max(w, rep.defining_residual);
               w = std::max(w, rep.moment_residual);
               w = std::max(w, (rep.W - deg2_matrix(wD.coeff(m))).norm());
             }
             return w;
           });

  C.add_at("double: closed 2-form derivative is the moment pullback", "d omega_D = Phi^* eta",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 2);
             double w = 0;
             for (int it = 0; it < std::min(np, 5); ++it) {
               Point m = D.sample(rng);
               w = std::max(
                   w, (exterior_derivative(D.S, wD, m) - eta_pullback_at(D, m)).norm());
             }
             return w;
           });

  C.add("double: solved 2-form derivative is the moment pullback", "d omega = Phi^* eta",
        TolClass::FdFirst, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 3);
          TwoFormStructure tf = omega_from_P(D, rng, 3);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it) {
            Point m = D.sample(rng);
            // entrywise: the solved field passes through the FD engine once,
            // and per-entry accuracy is what that layer bounds
            AltTensor diff = exterior_derivative(D.S, tf.omega, m) - eta_pullback_at(D, m);
            w = std::max(w, diff.c.cwiseAbs().maxCoeff());
          }
          return w;
        });

  C.add("double: bivector to 2-form round trip", "P(omega(P)) = P", TolClass::ClosedForm,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 4);
          TwoFormStructure tf = omega_from_P(D, rng, 3);
          double w = std::max(tf.defining_residual, tf.moment_residual);
          QuasiPoissonSpace Y = P_from_omega(D, tf.omega);
          for (int it = 0; it < std::min(np, 5); ++it) {
            Point m = D.sample(rng);
            w = std::max(w, (Y.P.coeff(m) - D.P.coeff(m)).norm());
          }
          return w;
        });

  C.add("double: form kernel matches the moment kernel",
        "dim ker omega = sum_s dim ker(1 + Ad_{Phi_s})", TolClass::RankRel, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 5);
          double w = 0;
          for (int it = 0; it < std::min(np, 6); ++it) {
            Point m = D.sample(rng);
            OmegaSolveReport rep = omega_matrix_at(D, m);
            w = std::max(w, omega_kernel_dim(D, rep.W, m) == expected_kernel_dim(D, m) ? 0.0
                                                                                       : 1.0);
          }
          return w;
        });

  C.add("fused 2-form is compatible with the fused bivector",
        "omega - (1/2) Phi_0^* theta^L ^ Phi_1^* theta^R solves the fused conditions",
        TolClass::ClosedForm, [&]() -> double {
          QuasiPoissonSpace Df = fuse(D, 0, 1);
          DifferentialForm wf = fusion_two_form(D, wD, 0, 1);
          std::mt19937_64 rng(cfg.seed + 6);
          double w = 0;
          for (int it = 0; it < std::min(np, 6); ++it) {
            Point m = D.sample(rng);
            RMat Wf = deg2_matrix(wf.coeff(m));
            w = std::max(w, defining_residual_at(Df, Wf, m));
            w = std::max(w, moment_form_residual_at(Df, Wf, m));
            w = std::max(w, (omega_matrix_at(Df, m).W - Wf).norm());
          }
          return w;
        });

  if (!abelian(*G)) {
    std::mt19937_64 seedgen(cfg.seed);
    auto cls = conjugacy_class_space(G, random_group(*G, seedgen));
    C.add("class: bivector to 2-form round trip", "P(omega(P)) = P", TolClass::ClosedForm,
          [&]() -> double {
            std::mt19937_64 rng(cfg.seed + 7);
            TwoFormStructure tf = omega_from_P(cls, rng, 3);
            double w = std::max(tf.defining_residual, tf.moment_residual);
            QuasiPoissonSpace Y = P_from_omega(cls, tf.omega);
            for (int it = 0; it < std::min(np, 5); ++it) {
              Point m = cls.sample(rng);
              w = std::max(w, (Y.P.coeff(m) - cls.P.coeff(m)).norm());
            }
            return w;
          });
    C.add("class: form kernel matches the moment kernel",
          "dim ker omega = dim ker(1 + Ad_Phi)", TolClass::RankRel, [&]() -> double {
            std::mt19937_64 rng(cfg.seed + 8);
            double w = 0;
            for (int it = 0; it < std::min(np, 6); ++it) {
              Point m = cls.sample(rng);
              OmegaSolveReport rep = omega_matrix_at(cls, m);
              w = std::max(w, omega_kernel_dim(cls, rep.W, m) == expected_kernel_dim(cls, m)
                                  ? 0.0
                                  : 1.0);
            }
            return w;
          });
  }
}

// ------------------------------------------------------------- cohomology

void suite_cohomology(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  auto X = canonical_group_space(G);
  const FrameAlgebra FA = frame_algebra(X.S);
  VolumeStructure V = frame_volume(X.S);

  C.add_at("algebra homology boundary", "del(x ^ y) = -[x, y], del o del = 0, del phi = 0",
           TolClass::ClosedForm, 1e-12, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 1);
             double w = 0;
             for (int it = 0; it < std::min(np, 6); ++it) {
               RVec x = random_algebra(*G, rng), y = random_algebra(*G, rng);
               AltTensor xy = wedge(AltTensor::vector(x), AltTensor::vector(y));
               RVec br = G->coords_of(G->bracket(G->alg_of(x), G->alg_of(y)));
               w = std::max(w,
                            (algebra_boundary(*G, xy) + AltTensor::vector(br)).norm());
               AltTensor b3 =
                   wedge(xy, AltTensor::vector(RVec(random_algebra(*G, rng))));
               w = std::max(w, algebra_boundary(*G, algebra_boundary(*G, b3)).norm());
             }
             w = std::max(w, algebra_boundary(*G, cartan_tensor(*G)).norm());
             return w;
           });

  MultiVectorField u1 = left_frame_field(X.S, 0);
  MultiVectorField v1 = right_frame_field(X.S, 0, (G->d > 1) ? 1 : 0);
  MultiVectorField u2 = mvf_wedge(v1, u1);

  C.add_at("classical generator identity",
           "[u,v] = (-1)^{|u|}(del(uv) - (del u)v - (-1)^{|u|} u(del v))",
           TolClass::ClosedForm, 1e-10, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 2);
             auto resid = [&](const MultiVectorField& u, const MultiVectorField& v,
                              const Point& m) -> double {
               const double pa = (u.deg % 2 == 0) ? 1.0 : -1.0;
               AltTensor lhs = schouten(X.S, FA, u, v, m);
               AltTensor rhs = bv_apply(X.S, FA, V, mvf_wedge(u, v), m) -
                               wedge(bv_apply(X.S, FA, V, u, m), v.coeff(m)) -
                               pa * wedge(u.coeff(m), bv_apply(X.S, FA, V, v, m));
               return (lhs - pa * rhs).norm();
             };
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point m = X.sample(rng);
               w = std::max(w, resid(u1, v1, m));
               w = std::max(w, resid(u1, u2, m));
               w = std::max(w, resid(u2, v1, m));
             }
             return w;
           });

  C.add("generating operator squares to zero", "del_mu o del_mu = 0", TolClass::FdFirst,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 3);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it) {
            Point m = X.sample(rng);
            for (const MultiVectorField* u : {&u2, &X.P})
              w = std::max(w, bv_apply(X.S, FA, V, bv_field(X.S, V, *u), m).norm());
          }
          return w;
        });

  C.add_at("generating operator kills generated fields", "del_mu xi_M = 0",
           TolClass::ClosedForm, 1e-12, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 4);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point m = X.sample(rng);
               MultiVectorField gen = generated_field(
                   X.S, X.A, 0, AltTensor::vector(RVec(random_algebra(*G, rng))));
               w = std::max(w, bv_apply(X.S, FA, V, gen, m).norm());
             }
             return w;
           });

  C.add("boundary intertwines through generated fields", "del_mu beta_M = (del beta)_M",
        TolClass::ClosedForm, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 5);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it) {
            Point m = X.sample(rng);
            AltTensor beta = wedge(AltTensor::vector(RVec(random_algebra(*G, rng))),
                                   AltTensor::vector(RVec(random_algebra(*G, rng))));
            AltTensor got = bv_apply(X.S, FA, V, generated_field(X.S, X.A, 0, beta), m);
            AltTensor want = generated_field(X.S, X.A, 0, algebra_boundary(*G, beta)).coeff(m);
            w = std::max(w, (got - want).norm());
          }
          return w;
        });

  MultiVectorField phi = cartan_field(X.S, X.A);
  C.add("background trivector is closed for the generating operator", "del_mu phi_M = 0",
        TolClass::ClosedForm, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 6);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it)
            w = std::max(w, bv_apply(X.S, FA, V, phi, X.sample(rng)).norm());
          return w;
        });

  C.add("second differential is the background bracket", "d_P d_P u = (1/2)[phi_M, u]",
        TolClass::ClosedForm, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 7);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it) {
            Point m = X.sample(rng);
            for (const MultiVectorField* u : {&u1, &u2}) {
              AltTensor lhs = schouten(X.S, FA, X.P, schouten_field(X.S, X.P, *u), m);
              AltTensor rhs = 0.5 * schouten(X.S, FA, phi, *u, m);
              w = std::max(w, (lhs - rhs).norm());
            }
            w = std::max(w, schouten(X.S, FA, X.P, schouten_field(X.S, X.P, X.P), m).norm());
          }
          return w;
        });

  C.add("modular field of the canonical structure vanishes", "del_mu P_G = 0",
        TolClass::ClosedForm, [&]() -> double {
          MultiVectorField Xmu = modular_field(X, V);
          std::mt19937_64 rng(cfg.seed + 8);
          double w = 0;
          for (int it = 0; it < std::min(np, 4); ++it)
            w = std::max(w, Xmu.coeff(X.sample(rng)).norm());
          return w;
        });

  auto XD = double_bold_DG(G);
  VolumeStructure VD = frame_volume(XD.S);
  C.add("modular invariance on the fused double", "[xi_M, X_mu] = 0", TolClass::FdFirst,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 9);
          return modular_residuals(XD, VD, rng, 2).invariance;
        });
  C.add("modular cocycle on the fused double", "[P, X_mu] = 0", TolClass::FdFirst,
        [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 10);
          return modular_residuals(XD, VD, rng, 2).cocycle;
        });

  MultiVectorField lnf = log_trace_gauge(X.S, 0);
  VolumeStructure Vf = rescale_volume(V, lnf);
  C.add_at("gauge law pins the boundary shift", "del_{f mu} u = del_mu u - iota(d ln f) u",
           TolClass::ClosedForm, 1e-10, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 11);
             double w = 0;
             for (int it = 0; it < std::min(np, 3); ++it) {
               Point m = X.sample(rng);
               RVec cov(X.S.D);
               for (int i = 0; i < X.S.D; ++i) cov[i] = lnf.dcoeff(m, i).c(0);
               for (const MultiVectorField* u : {&u1, &X.P, &u2}) {
                 AltTensor diff =
                     bv_apply(X.S, FA, Vf, *u, m) - bv_apply(X.S, FA, V, *u, m);
                 w = std::max(w, (diff + contract_covector(u->coeff(m), cov)).norm());
               }
             }
             return w;
           });

  C.add("volume rescaling shifts the modular field by the gauge bracket",
        "X_{f mu} = X_mu + [P, ln f]", TolClass::FdFirst, [&]() -> double {
          const FrameAlgebra FAD = frame_algebra(XD.S);
          MultiVectorField lng = log_trace_gauge(XD.S, 0);
          MultiVectorField Xmu = modular_field(XD, VD);
          MultiVectorField Xf = modular_field(XD, rescale_volume(VD, lng));
          std::mt19937_64 rng(cfg.seed + 12);
          double w = 0;
          for (int it = 0; it < std::min(np, 3); ++it) {
            Point m = XD.sample(rng);
            AltTensor shift = Xf.coeff(m) - Xmu.coeff(m);
            w = std::max(w, (shift - schouten(XD.S, FAD, XD.P, lng, m)).norm());
          }
          return w;
        });
}

// ----------------------------------------------------------------- moduli

void suite_moduli(Collector& C, ModelPtr G, const SuiteConfig& cfg) {
  const int np = cfg.points;
  SurfaceData surf;
  surf.genus = 1;
  surf.boundary = 1;
  RepVarietySpace R = build_rep_variety(surf, G, RepVariant::Full);
  RepVarietySpace Rt = build_rep_variety(surf, G, RepVariant::Trimmed);

  C.add_at("surface moment equals the boundary word", "Phi = prod [a_j, b_j] prod c_k",
           TolClass::ClosedForm, 1e-13, [&]() -> double {
             Word w = parse_word("a1 b1 a1' b1' c1", R.names);
             std::mt19937_64 rng(cfg.seed + 1);
             double r = 0;
             for (int it = 0; it < std::min(np, 6); ++it) {
               Point m = R.X.sample(rng);
               r = std::max(
                   r, (R.X.moments[0]->value(m) - eval_word(R.X.S, w, m)).norm());
             }
             return r;
           });

  C.add_certify(R.X, cfg.seed + 2, capped(np, R.X.S.D));

  ScalarFunction Fab = parse_trace_word(R, "a1 b1");
  ScalarFunction Fa = parse_trace_word(R, "a1");
  ScalarFunction Fb = parse_trace_word(R, "b1");

  C.add_at("trace observables are invariant", "F(g . m) = F(m)", TolClass::ClosedForm, 1e-10,
           [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 3);
             double w = 0;
             for (const ScalarFunction* F : {&Fab, &Fa, &Fb})
               w = std::max(w, invariance_defect(R.X, *F, rng, std::min(np, 4)));
             return w;
           });

  C.add_at("bracket antisymmetry", "{F1,F2} = -{F2,F1}, {F,F} = 0", TolClass::ClosedForm,
           1e-14, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 4);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point m = R.X.sample(rng);
               w = std::max(w, std::abs(reduced_bracket(R.X, Fab, Fa, m) +
                                        reduced_bracket(R.X, Fa, Fab, m)));
               w = std::max(w, std::abs(reduced_bracket(R.X, Fab, Fab, m)));
             }
             return w;
           });

  C.add_at("closed-form differentials against the flow oracle", "{F1,F2} closed form = FD",
           TolClass::FdFirst, 1e-8, [&]() -> double {
             ScalarFunction Oab = fd_oracle(R.X.S, Fab.value);
             ScalarFunction Oa = fd_oracle(R.X.S, Fa.value);
             std::mt19937_64 rng(cfg.seed + 5);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point m = R.X.sample(rng);
               w = std::max(w, std::abs(poisson_bracket(R.X, Fab, Fa, m) -
                                        poisson_bracket(R.X, Oab, Oa, m)));
             }
             return w;
           });

  C.add_at("bracket descends to the quotient", "{F1,F2}(g . m) = {F1,F2}(m)",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             std::mt19937_64 rng(cfg.seed + 6);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point m = R.X.sample(rng);
               const double v0 = reduced_bracket(R.X, Fab, Fa, m);
               CMat g = random_group(*G, rng);
               Point gm = act(R.X.S, R.X.A.slots[0], g, m);
               w = std::max(w, std::abs(reduced_bracket(R.X, Fab, Fa, gm) - v0));
             }
             return w;
           });

  C.add("Jacobi identity on invariant observables", "Cycl {{F1,F2},F3} = 0",
        TolClass::FdSecond, [&]() -> double {
          std::mt19937_64 rng(cfg.seed + 7);
          double w = 0;
          for (int it = 0; it < std::min(np, 2); ++it) {
            Point m = R.X.sample(rng);
            w = std::max(w, std::abs(jacobi_residual(R.X, Fab, Fa, Fb, m)));
          }
          return w;
        });

  C.add_at("the two presentations agree", "{F1,F2}_free(embed m) = {F1,F2}_qu(m)",
           TolClass::ClosedForm, 1e-8, [&]() -> double {
             ScalarFunction tFab = parse_trace_word(Rt, "a1 b1");
             ScalarFunction tFa = parse_trace_word(Rt, "a1");
             std::mt19937_64 rng(cfg.seed + 8);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it) {
               Point mt = Rt.X.sample(rng);
               Point mf = identity_level_embedding(Rt.X, mt);
               w = std::max(w, std::abs(Fab.value(mf) - tFab.value(mt)));
               w = std::max(w, std::abs(reduced_bracket(R.X, Fab, Fa, mf) -
                                        reduced_bracket(Rt.X, tFab, tFa, mt)));
             }
             return w;
           });

  C.add_at("projection onto the identity level", "Phi(m*) = e", TolClass::ClosedForm, 1e-9,
           [&]() -> double {
             const CMat e = CMat::Identity(G->n, G->n);
             std::mt19937_64 rng(cfg.seed + 9);
             double w = 0;
             for (int it = 0; it < std::min(np, 6); ++it) {
               LevelSetPoint lp = project_to_level_set(R.X, R.X.sample(rng), e);
               w = std::max(w, lp.distance);
             }
             return w;
           });

  C.add_at("invariant flows are tangent to the level", "dPhi(P# dF) = 0",
           TolClass::ClosedForm, 1e-9, [&]() -> double {
             std::vector<ScalarFunction> fns = {Fab, Fa, Fb};
             std::mt19937_64 rng(cfg.seed + 10);
             double w = 0;
             for (int it = 0; it < std::min(np, 4); ++it)
               w = std::max(w, tangency_and_rank_checks(R.X, fns, R.X.sample(rng)).tangency);
             return w;
           });

  C.add("moment rank is full at locally free points", "rank dPhi = dim G when free",
        TolClass::RankRel, [&]() -> double {
          std::vector<ScalarFunction> fns = {Fab, Fa};
          std::mt19937_64 rng(cfg.seed + 11);
          double w = 0;
          for (int it = 0; it < std::min(np, 4); ++it) {
            TangencyReport tr = tangency_and_rank_checks(R.X, fns, R.X.sample(rng));
            if (tr.locally_free) w = std::max(w, tr.moment_rank_full ? 0.0 : 1.0);
          }
          return w;
        });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "qp-core",   "fusion",     "rmatrix", "cross-section",
      "omega-equivalence", "cohomology", "moduli"};
  return names;
}

Report run_suite(const SuiteConfig& cfg) {
  ModelPtr G0 = resolve_group(cfg.group);
  const Tolerances tol = apply_tol_overrides(G0->tol, cfg.tol);
  auto Gm = std::make_shared<GroupModel>(*G0);
  Gm->tol = tol;  // overrides reach rank cutoffs and internal gates too
  ModelPtr G = Gm;

  Report rep;
  rep.suite = cfg.suite;
  rep.group = cfg.group;
  rep.seed = cfg.seed;
  rep.points = cfg.points;
  Collector C{rep, tol};

  if (cfg.suite == "qp-core")
    suite_qp_core(C, G, cfg);
  else if (cfg.suite == "fusion")
    suite_fusion(C, G, cfg);
  else if (cfg.suite == "rmatrix")
    suite_rmatrix(C, G, cfg);
  else if (cfg.suite == "cross-section")
    suite_cross_section(C, G, cfg);
  else if (cfg.suite == "omega-equivalence")
    suite_omega(C, G, cfg);
  else if (cfg.suite == "cohomology")
    suite_cohomology(C, G, cfg);
  else if (cfg.suite == "moduli")
    suite_moduli(C, G, cfg);
  else {
    std::string all;
    for (const auto& s : suite_names()) all += (all.empty() ? "" : ", ") + s;
    throw std::invalid_argument("unknown suite '" + cfg.suite + "'; expected one of: " + all);
  }
  return rep;
}

}  // namespace qpl
