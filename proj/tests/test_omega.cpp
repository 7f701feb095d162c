#include <random>

#include "doctest.h"
#include "qpl/omega.hpp"
#include "qpl/schouten.hpp"

using namespace qpl;

namespace {

// su2 element whose adjoint is a half turn: Ad has eigenvalue -1 twice, so
// 1 + Ad_g has a two-dimensional kernel.
CMat half_turn(const GroupModel& G) {
  const double pi = 3.14159265358979323846;
  return G.exp_coords(RVec(RVec::Unit(3, 2) * (pi / std::sqrt(2.0))));
}

double max_abs(const AltTensor& t) { return t.c.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("double: solved 2-form matches the closed form and both conditions") {
  for (std::string kind : {"su2", "su3", "so3"}) {
    ModelPtr G = build_model(kind);
    QuasiPoissonSpace X = double_DG(G);
    DifferentialForm wD = double_two_form(X);
    std::mt19937_64 rng(11);
    const int npts = (kind == "su3") ? 4 : 8;
    for (int it = 0; it < npts; ++it) {
      Point m = X.sample(rng);
      OmegaSolveReport rep = omega_matrix_at(X, m);
      INFO(kind, " it=", it);
      CHECK(rep.solve_kernel == 0);
      CHECK(rep.defining_residual <= 1e-10);
      CHECK(rep.moment_residual <= 1e-10);
      CHECK((rep.W - deg2_matrix(wD.coeff(m))).norm() <= 1e-9);
      CHECK(defining_residual_at(X, rep.W, m) <= 1e-10);
      CHECK(moment_form_residual_at(X, deg2_matrix(wD.coeff(m)), m) <= 1e-9);
    }
  }
}

TEST_CASE("double: torus case is the constant symplectic pairing") {
  ModelPtr G = build_model("torus2");
  QuasiPoissonSpace X = double_DG(G);
  std::mt19937_64 rng(5);
  Point m = X.sample(rng);
  OmegaSolveReport rep = omega_matrix_at(X, m);
  RMat W = RMat::Zero(4, 4);
  W.block(0, 2, 2, 2) = -RMat::Identity(2, 2);
  W.block(2, 0, 2, 2) = RMat::Identity(2, 2);
  CHECK((rep.W - W).norm() <= 1e-12);
  CHECK(max_abs(exterior_derivative(X.S, double_two_form(X), m)) <= 1e-12);
}

TEST_CASE("exterior derivative of the 2-form equals the moment pullback 3-form") {
  for (std::string kind : {"su2", "su3"}) {
    ModelPtr G = build_model(kind);
    QuasiPoissonSpace X = double_DG(G);
    DifferentialForm wD = double_two_form(X);
    std::mt19937_64 rng(23);
    const int npts = (kind == "su3") ? 2 : 6;
    for (int it = 0; it < npts; ++it) {
      Point m = X.sample(rng);
      AltTensor dw = exterior_derivative(X.S, wD, m);
      AltTensor pe = eta_pullback_at(X, m);
      INFO(kind, " it=", it);
      // closed-form coefficient derivatives: tight
      CHECK((dw - pe).norm() <= 1e-9);
    }
  }
  // the solved field goes through the FD engine once
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = double_DG(G);
  std::mt19937_64 rng(29);
  TwoFormStructure tf = omega_from_P(X, rng, 3);
  for (int it = 0; it < 3; ++it) {
    Point m = X.sample(rng);
    AltTensor dw = exterior_derivative(X.S, tf.omega, m);
    CHECK((dw - eta_pullback_at(X, m)).norm() <= 1e-7);
  }
}

TEST_CASE("round trip: bivector -> 2-form -> bivector") {
  std::mt19937_64 rng(37);
  std::vector<QuasiPoissonSpace> spaces;
  spaces.push_back(double_DG(build_model("su2")));
  spaces.push_back(double_DG(build_model("su3")));
  spaces.push_back(double_bold_DG(build_model("su2")));
  {
    ModelPtr G = build_model("su2");
    spaces.push_back(conjugacy_class_space(G, G->exp_coords(RVec(0.7 * RVec::Unit(3, 2)))));
  }
  {
    ModelPtr G = build_model("su3");
    RVec x = RVec::Zero(8);
    x[2] = 0.6;
    x[7] = 0.9;
    spaces.push_back(conjugacy_class_space(G, G->exp_coords(x)));
  }
  for (const auto& X : spaces) {
    TwoFormStructure tf = omega_from_P(X, rng, 4);
    CHECK(tf.defining_residual <= 1e-9);
    CHECK(tf.moment_residual <= 1e-9);
    QuasiPoissonSpace Y = P_from_omega(X, tf.omega);
    for (int it = 0; it < 4; ++it) {
      Point m = X.sample(rng);
      INFO(X.name);
      CHECK((Y.P.coeff(m) - X.P.coeff(m)).norm() <= 1e-8);
    }
  }
}

TEST_CASE("degenerate spaces are rejected with the corank in the message") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = canonical_group_space(G);
  std::mt19937_64 rng(41);
  Point m = X.sample(rng);
  CHECK_THROWS_AS(omega_matrix_at(X, m), std::domain_error);
  try {
    omega_matrix_at(X, m);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("corank 1") != std::string::npos);
  }
}

TEST_CASE("class at a half turn: zero form, kernel fills the whole tangent") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = conjugacy_class_space(G, half_turn(*G));
  std::mt19937_64 rng(43);
  for (int it = 0; it < 4; ++it) {
    Point m = X.sample(rng);
    // the bivector vanishes on this class and so does the compatible form
    CHECK(X.P.coeff(m).norm() <= 1e-12);
    OmegaSolveReport rep = omega_matrix_at(X, m);
    CHECK(rep.solve_kernel == 0);
    CHECK(rep.W.norm() <= 1e-10);
    CHECK(omega_kernel_dim(X, rep.W, m) == 2);
    CHECK(expected_kernel_dim(X, m) == 2);
  }
}

TEST_CASE("class at a generic point: symplectic, trivial kernel") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = conjugacy_class_space(G, G->exp_coords(RVec(0.8 * RVec::Unit(3, 2))));
  std::mt19937_64 rng(47);
  Point m = X.sample(rng);
  OmegaSolveReport rep = omega_matrix_at(X, m);
  CHECK(rep.defining_residual <= 1e-10);
  CHECK(omega_kernel_dim(X, rep.W, m) == 0);
  CHECK(expected_kernel_dim(X, m) == 0);
}

TEST_CASE("double with a half-turn moment value: form kernel matches the slots") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = double_DG(G);
  std::mt19937_64 rng(53);
  Point m = X.sample(rng);
  // place Phi_1 = a1 a2 on the half-turn locus; Phi_2 is conjugate to its
  // inverse, so both slots contribute a two-dimensional kernel
  m.p[1].g = CMat(m.p[0].g.adjoint() * half_turn(*G));
  NondegReport nd = nondegeneracy(X, m);
  CHECK(nd.nondegenerate);
  OmegaSolveReport rep = omega_matrix_at(X, m);
  CHECK(rep.solve_kernel == 0);
  CHECK(rep.defining_residual <= 1e-10);
  CHECK(expected_kernel_dim(X, m) == 4);
  CHECK(omega_kernel_dim(X, rep.W, m) == 4);
}

TEST_CASE("fusion: fused 2-form is compatible with the fused bivector") {
  for (std::string kind : {"su2", "so3"}) {
    ModelPtr G = build_model(kind);
    QuasiPoissonSpace X = double_DG(G);
    QuasiPoissonSpace Xf = fuse(X, 0, 1);
    DifferentialForm wf = fusion_two_form(X, double_two_form(X), 0, 1);
    std::mt19937_64 rng(59);
    for (int it = 0; it < 6; ++it) {
      Point m = X.sample(rng);
      RMat Wf = deg2_matrix(wf.coeff(m));
      INFO(kind, " it=", it);
      CHECK(defining_residual_at(Xf, Wf, m) <= 1e-9);
      CHECK(moment_form_residual_at(Xf, Wf, m) <= 1e-9);
      // uniqueness: the pointwise solve on the fused space returns the same form
      CHECK((omega_matrix_at(Xf, m).W - Wf).norm() <= 1e-9);
    }
  }
}

TEST_CASE("fusion: fused double built two ways carries one 2-form") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = double_DG(G);
  QuasiPoissonSpace Xb = double_bold_DG(G);
  DifferentialForm wf = fusion_two_form(X, double_two_form(X), 0, 1);
  std::mt19937_64 rng(61);
  for (int it = 0; it < 6; ++it) {
    Point m = Xb.sample(rng);
    CHECK((omega_matrix_at(Xb, m).W - deg2_matrix(wf.coeff(m))).norm() <= 1e-9);
  }
}

TEST_CASE("fusion: exterior derivative tracks the fused moment pullback") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = double_DG(G);
  QuasiPoissonSpace Xf = fuse(X, 0, 1);
  DifferentialForm wf = fusion_two_form(X, double_two_form(X), 0, 1);
  std::mt19937_64 rng(67);
  for (int it = 0; it < 3; ++it) {
    Point m = Xf.sample(rng);
    AltTensor dw = exterior_derivative(Xf.S, wf, m);
    CHECK((dw - eta_pullback_at(Xf, m)).norm() <= 1e-7);
  }
}

TEST_CASE("fusion of two classes: compatibility and round trip survive restriction") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace C1 = conjugacy_class_space(G, G->exp_coords(RVec(0.7 * RVec::Unit(3, 2))));
  QuasiPoissonSpace C2 = conjugacy_class_space(G, G->exp_coords(RVec(1.1 * RVec::Unit(3, 0))));
  QuasiPoissonSpace X = product(C1, C2);
  QuasiPoissonSpace Xf = fuse(X, 0, 1);
  std::mt19937_64 rng(71);
  TwoFormStructure tf = omega_from_P(X, rng, 3);
  CHECK(tf.defining_residual <= 1e-9);
  DifferentialForm wf = fusion_two_form(X, tf.omega, 0, 1);
  for (int it = 0; it < 4; ++it) {
    Point m = X.sample(rng);
    RMat Wf = deg2_matrix(wf.coeff(m));
    CHECK(defining_residual_at(Xf, Wf, m) <= 1e-8);
    CHECK(moment_form_residual_at(Xf, Wf, m) <= 1e-9);
    // the fusion correction keeps ambient support off the classes; the two
    // forms agree as forms on the product of orbits
    RMat Q = tangent_basis(Xf.S, m);
    CHECK((Q.transpose() * (omega_matrix_at(Xf, m).W - Wf) * Q).norm() <= 1e-8);
  }
}

TEST_CASE("2-form structure wrapper certifies its residuals") {
  ModelPtr G = build_model("su2");
  QuasiPoissonSpace X = double_DG(G);
  std::mt19937_64 rng(73);
  TwoFormStructure tf = omega_from_P(X, rng, 6);
  CHECK(tf.defining_residual <= 1e-10);
  CHECK(tf.moment_residual <= 1e-10);
  DifferentialForm wD = double_two_form(X);
  Point m = X.sample(rng);
  CHECK((tf.omega.coeff(m).c - wD.coeff(m).c).norm() <= 1e-9);
}
