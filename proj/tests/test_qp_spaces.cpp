#include <random>

#include "doctest.h"
#include "qpl/qp.hpp"

using namespace qpl;

namespace {

const std::vector<std::string> kKinds = {"su2", "su3", "so3", "torus3"};

double max_residual(const std::vector<Residual>& rs) {
  double w = 0;
  for (const auto& r : rs) w = std::max(w, r.value);
  return w;
}

// every residual individually below its own tolerance class
void check_certified(const std::vector<Residual>& rs, const Tolerances& tol) {
  REQUIRE(!rs.empty());
  for (const auto& r : rs) {
    INFO(r.identity, " [", r.name, "] = ", r.value);
    CHECK(r.value <= tol_of(tol, r.cls));
  }
}

}  // namespace

TEST_CASE("word grammar: letters, inverses, layout names") {
  auto names = generator_names(2, 3);  // a1 b1 a2 b2 c1 c2 c3
  CHECK(names.size() == 7);
  CHECK(names.at("a1") == 0);
  CHECK(names.at("b1") == 1);
  CHECK(names.at("a2") == 2);
  CHECK(names.at("b2") == 3);
  CHECK(names.at("c1") == 4);
  CHECK(names.at("c3") == 6);

  Word w = parse_word("a1 b1 a1' b1' c2", names);
  REQUIRE(w.letters.size() == 5);
  CHECK(w.letters[0].factor == 0);
  CHECK(!w.letters[0].inverse);
  CHECK(w.letters[2].factor == 0);
  CHECK(w.letters[2].inverse);
  CHECK(w.letters[4].factor == 5);
}

TEST_CASE("word grammar: malformed input reports the offending offset") {
  auto names = generator_names(1, 1);
  CHECK_THROWS_AS(parse_word("a1''x", names), WordParseError);
  try {
    parse_word("a1''x", names);
  } catch (const WordParseError& e) {
    CHECK(e.offset == 2);
  }
  try {
    parse_word("a1 q7", names);
  } catch (const WordParseError& e) {
    CHECK(e.offset == 3);
  }
}

TEST_CASE("word evaluation and exact differential against finite differences") {
  std::mt19937_64 rng(71);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    ModelSpace S = product_space({G, G});
    ModelSpace Gs = product_space({G});
    std::map<std::string, int> names{{"x", 0}, {"y", 1}};
    Word w = parse_word("x y x' y' y", names);
    SmoothMap F = word_map(S, Gs, w);
    CHECK(F.exact_jac);
    for (int it = 0; it < 4; ++it) {
      Point m = sample_point(S, rng);
      const CMat &g1 = m.p[0].g, &g2 = m.p[1].g;
      CMat direct = g1 * g2 * g1.adjoint() * g2.adjoint() * g2;
      CHECK((eval_word(S, w, m) - direct).norm() < 1e-13);
      RMat jx = F.jac(m);
      RMat jfd = fd_jacobian(F, m);
      CHECK((jx - jfd).norm() < 1e-9);
    }
  }
}

TEST_CASE("moment calculus: product, inverse, exp and log tangent data") {
  std::mt19937_64 rng(72);
  auto G = build_model("su3");
  ModelSpace S = product_space({G, G});
  ModelSpace Gs = product_space({G});
  MomentComponent m0 = factor_moment(S, 0);
  MomentComponent m1 = factor_moment(S, 1);
  MomentComponent prod = moment_product(S, m0, m1);
  MomentComponent inv = moment_inverse(S, prod);
  CHECK(prod.exact);
  for (int it = 0; it < 3; ++it) {
    Point m = sample_point(S, rng);
    CHECK((prod.value(m) - m.p[0].g * m.p[1].g).norm() < 1e-13);
    CHECK((inv.value(m) - (m.p[0].g * m.p[1].g).adjoint()).norm() < 1e-13);
    SmoothMap Fp = moment_map(S, Gs, prod);
    SmoothMap Fi = moment_map(S, Gs, inv);
    CHECK((Fp.jac(m) - fd_jacobian(Fp, m)).norm() < 1e-9);
    CHECK((Fi.jac(m) - fd_jacobian(Fi, m)).norm() < 1e-9);
  }

  // exp/log composition on an algebra-valued component
  ModelSpace gA = algebra_space(G);
  MomentComponent lin = algebra_factor_moment(gA, 0);
  MomentComponent ex = exp_moment(gA, lin);
  MomentComponent lg = log_moment(gA, ex);
  for (int it = 0; it < 3; ++it) {
    Point m = sample_point(gA, rng);
    CHECK((ex.value(m) - G->exp_coords(m.p[0].xi)).norm() < 1e-12);
    CHECK((lg.alg_value(m) - m.p[0].xi).norm() < 1e-10);
    SmoothMap Fe = moment_map(gA, Gs, ex);
    CHECK((Fe.jac(m) - fd_jacobian(Fe, m)).norm() < 1e-9);
    SmoothMap Fl = moment_map(gA, gA, lg);
    CHECK((Fl.jac(m) - fd_jacobian(Fl, m)).norm() < 1e-9);
  }
}

TEST_CASE("canonical structure certifies on every model") {
  for (const auto& kind : kKinds) {
    auto G = build_model(kind);
    std::mt19937_64 rng(101);
    auto X = canonical_group_space(G);
    auto rs = certify(X, rng, 6);
    check_certified(rs, G->tol);
    if (kind == "torus3") CHECK(max_residual(rs) < 1e-13);  // abelian: everything exact
  }
}

TEST_CASE("linear structure certifies as a Hamiltonian bracket") {
  for (const auto& kind : kKinds) {
    auto G = build_model(kind);
    std::mt19937_64 rng(103);
    auto X = linear_poisson_space(G);
    CHECK(X.poisson);
    auto rs = certify(X, rng, 6);
    check_certified(rs, G->tol);
  }
}

TEST_CASE("class bivector: equals the restricted group bivector on the class") {
  std::mt19937_64 rng(107);
  for (const auto& kind : {std::string("su2"), std::string("su3"), std::string("so3")}) {
    auto G = build_model(kind);
    CMat g0 = random_group(*G, rng);
    auto C = conjugacy_class_space(G, g0);
    auto can = canonical_group_space(G);
    for (int it = 0; it < 6; ++it) {
      Point m = C.sample(rng);
      CHECK(class_distance(C.S.factors[0], m.p[0].g) < 1e-9);
      AltTensor pc = C.P.coeff(m);
      AltTensor pg = can.P.coeff(m);
      CHECK((pc - pg).norm() < 1e-9);
    }
  }
}

TEST_CASE("class structure certifies and is non-degenerate") {
  std::mt19937_64 rng(109);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    CMat g0 = random_group(*G, rng);
    auto C = conjugacy_class_space(G, g0);
    auto rs = certify(C, rng, 4);
    check_certified(rs, G->tol);
    for (int it = 0; it < 4; ++it) {
      Point m = C.sample(rng);
      NondegReport rep = nondegeneracy(C, m);
      CHECK(rep.nondegenerate);
    }
  }
}

TEST_CASE("equatorial class of su2: zero bivector, still non-degenerate") {
  auto G = build_model("su2");
  CMat g0(2, 2);
  g0 << cxd(0, 1), cxd(0, 0), cxd(0, 0), cxd(0, -1);
  auto C = conjugacy_class_space(G, g0);
  std::mt19937_64 rng(111);
  for (int it = 0; it < 4; ++it) {
    Point m = C.sample(rng);
    CHECK(C.P.coeff(m).norm() < 1e-12);
    NondegReport rep = nondegeneracy(C, m);
    CHECK(rep.expected == 2);  // the class is a 2-sphere
    CHECK(rep.nondegenerate);  // carried entirely by the kernel-type generators
  }
  // central class: a single point, vacuously non-degenerate
  auto Z = conjugacy_class_space(G, CMat::Identity(2, 2) * cxd(-1, 0));
  Point z = Z.sample(rng);
  NondegReport rz = nondegeneracy(Z, z);
  CHECK(rz.expected == 0);
  CHECK(rz.nondegenerate);
}

TEST_CASE("group bivector is degenerate away from the identity component floor") {
  auto G = build_model("su2");
  auto X = canonical_group_space(G);
  std::mt19937_64 rng(113);
  Point m = X.sample(rng);
  NondegReport rep = nondegeneracy(X, m);
  CHECK(rep.expected == 3);
  CHECK(rep.rank == 2);  // leaf through a generic point is its class
  CHECK(!rep.nondegenerate);
}

TEST_CASE("double certifies on su2 and su3") {
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    std::mt19937_64 rng(127);
    auto D = double_DG(G);
    auto rs = certify(D, rng, kind == "su3" ? 3 : 6);
    check_certified(rs, G->tol);
    Point m = D.sample(rng);
    CHECK(nondegeneracy(D, m).nondegenerate);
  }
}

TEST_CASE("internally fused double: closed-form blocks match slot fusion") {
  std::mt19937_64 rng(131);
  for (const auto& kind : {std::string("su2"), std::string("so3")}) {
    auto G = build_model(kind);
    auto D = double_DG(G);
    auto fusedD = fuse(D, 0, 1);
    auto bold = double_bold_DG(G);
    REQUIRE(fusedD.A.slots.size() == 1);
    for (int it = 0; it < 5; ++it) {
      Point m = D.sample(rng);
      CHECK((fusedD.P.coeff(m) - bold.P.coeff(m)).norm() < 1e-12);
      for (int dir = 0; dir < D.S.D; ++dir)
        CHECK((fusedD.P.dcoeff(m, dir) - bold.P.dcoeff(m, dir)).norm() < 1e-12);
      CHECK((fusedD.moments[0]->value(m) - bold.moments[0]->value(m)).norm() < 1e-13);
      CHECK((fusedD.moments[0]->rmat(m) - bold.moments[0]->rmat(m)).norm() < 1e-12);
    }
    auto rs = certify(bold, rng, 5);
    check_certified(rs, G->tol);
  }
}

TEST_CASE("fusing the two one-sided slots recovers the canonical bivector") {
  std::mt19937_64 rng(137);
  for (const auto& kind : kKinds) {
    auto G = build_model(kind);
    auto B = group_as_bi_space(G);
    auto F = fuse(B, 0, 1);
    auto can = canonical_group_space(G);
    REQUIRE(F.A.slots.size() == 1);
    CHECK(F.A.slots[0].per_factor[0] == ElemAct::Conj);
    for (int it = 0; it < 4; ++it) {
      Point m = B.sample(rng);
      CHECK((F.P.coeff(m) - can.P.coeff(m)).norm() < 1e-13);
    }
  }
}

TEST_CASE("fusion is associative on a triple product") {
  std::mt19937_64 rng(139);
  auto G = build_model("su2");
  auto c = canonical_group_space(G);
  auto Z = product(product(c, c), c);
  REQUIRE(Z.A.slots.size() == 3);
  auto left = fuse(fuse(Z, 0, 1), 0, 1);
  auto right = fuse(fuse(Z, 1, 2), 0, 1);
  for (int it = 0; it < 5; ++it) {
    Point m = Z.sample(rng);
    CHECK((left.P.coeff(m) - right.P.coeff(m)).norm() < 1e-12);
    CHECK((left.moments[0]->value(m) - right.moments[0]->value(m)).norm() < 1e-13);
    CHECK((left.moments[0]->rmat(m) - right.moments[0]->rmat(m)).norm() < 1e-12);
  }
  std::mt19937_64 rng2(140);
  auto rs = certify(left, rng2, 4);
  check_certified(rs, G->tol);
}

TEST_CASE("fused product of two classes certifies") {
  std::mt19937_64 rng(149);
  auto G = build_model("su2");
  auto C1 = conjugacy_class_space(G, random_group(*G, rng));
  auto C2 = conjugacy_class_space(G, random_group(*G, rng));
  auto F = fuse(product(C1, C2), 0, 1);
  auto rs = certify(F, rng, 4);
  check_certified(rs, G->tol);
}

TEST_CASE("multiplication map intertwines the fused bivector with the target") {
  std::mt19937_64 rng(151);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    auto c = canonical_group_space(G);
    auto GG = fuse(product(c, c), 0, 1);
    ModelSpace Gs = product_space({G});
    SmoothMap mult = mult_map(GG.S, Gs);
    for (int it = 0; it < 4; ++it) {
      Point m = GG.sample(rng);
      AltTensor push = pushforward_at(GG.P, mult, m);
      Point im = mult.value(m);
      AltTensor target = c.P.coeff(im);
      CHECK((push - target).norm() < 1e-8);
    }
  }
}

TEST_CASE("action map intertwines the fused bivector with the target") {
  std::mt19937_64 rng(157);
  auto G = build_model("su2");
  auto c = canonical_group_space(G);
  auto C = conjugacy_class_space(G, random_group(*G, rng));
  auto GM = fuse(product(c, C), 0, 1);
  SmoothMap act_map = action_map(GM.S, C.S, C.A, 0);
  for (int it = 0; it < 4; ++it) {
    Point m = GM.sample(rng);
    AltTensor push = pushforward_at(GM.P, act_map, m);
    Point im = act_map.value(m);
    AltTensor target = C.P.coeff(im);
    CHECK((push - target).norm() < 1e-8);
  }
}

TEST_CASE("fusion twist: moment order exchange and bivector transport") {
  std::mt19937_64 rng(163);
  auto G = build_model("su2");
  auto D = double_DG(G);
  SmoothMap R = fusion_twist(D, 0, 1);
  auto F01 = fuse(D, 0, 1);
  auto F10 = fuse(D, 1, 0);
  for (int it = 0; it < 4; ++it) {
    Point m = D.sample(rng);
    Point rm = R.value(m);
    // twisted point multiplies the moments in the opposite order
    CMat lhs = F10.moments[0]->value(rm);
    CMat rhs = F01.moments[0]->value(m);
    CHECK((lhs - rhs).norm() < 1e-12);
    AltTensor push = pushforward_at(F01.P, R, m);
    AltTensor target = F10.P.coeff(rm);
    CHECK((push - target).norm() < 1e-7);
  }
}

TEST_CASE("exponentiating the linear structure yields a certified group-type space") {
  std::mt19937_64 rng(167);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    auto lin = linear_poisson_space(G);
    auto qp = exponentiate(lin, 0);
    CHECK(!qp.poisson);
    auto rs = certify(qp, rng, 4);
    check_certified(rs, G->tol);
  }
}

TEST_CASE("logarithmizing the canonical structure yields a certified linear-type space") {
  std::mt19937_64 rng(173);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    auto can = canonical_group_space(G);
    auto p0 = logarithmize(can, 0);
    CHECK(p0.poisson);
    auto rs = certify(p0, rng, 4);
    check_certified(rs, G->tol);
  }
}

TEST_CASE("exponentiate and logarithmize are mutually inverse on the bivector") {
  std::mt19937_64 rng(179);
  auto G = build_model("su2");
  auto lin = linear_poisson_space(G);
  auto back = logarithmize(exponentiate(lin, 0), 0);
  for (int it = 0; it < 4; ++it) {
    Point m = lin.sample(rng);
    CHECK((back.P.coeff(m) - lin.P.coeff(m)).norm() < 1e-9);
    CHECK((back.moments[0]->alg_value(m) - m.p[0].xi).norm() < 1e-10);
  }
}

TEST_CASE("chart pullback of the group bivector: linear term plus generated kernel") {
  std::mt19937_64 rng(181);
  for (const auto& kind : {std::string("su2"), std::string("su3")}) {
    auto G = build_model(kind);
    for (int it = 0; it < 4; ++it) {
      RVec x = random_algebra(*G, rng);
      ModelSpace gA = algebra_space(G);
      ModelSpace Gs = product_space({G});
      SmoothMap E = exp_chart_map(gA, Gs);
      Point px;
      px.p.push_back(FactorPoint{CMat(), x});
      RMat J = E.jac(px);
      CMat g = G->exp_coords(x);
      RMat B = 0.5 * (G->Ad(g.adjoint()) - G->Ad(g));
      RMat Ji = J.inverse();
      RMat pull = Ji * B * Ji.transpose();
      RMat ad = G->ad(x);
      RMat target = -ad - ad * dynamical_T(*G, x) * ad.transpose();
      CHECK((pull - target).norm() < 1e-8);
    }
  }
}

TEST_CASE("linearization scaling of the chart pullback") {
  std::mt19937_64 rng(191);
  auto G = build_model("su2");
  RVec xi = random_algebra(*G, rng, 1.0);
  auto rows = linearization_check(*G, xi, {1e-1, 1e-2, 1e-3});
  REQUIRE(rows.size() == 3);
  double r3min = rows[0].ratio3, r3max = rows[0].ratio3;
  for (const auto& r : rows) {
    CHECK(r.ratio2 < 1.0);  // bounded: the defect is third order
    r3min = std::min(r3min, r.ratio3);
    r3max = std::max(r3max, r.ratio3);
  }
  CHECK(rows[0].ratio2 > rows[1].ratio2);
  CHECK(rows[1].ratio2 > rows[2].ratio2);
  CHECK((r3max - r3min) / r3max < 0.2);  // cubic-rate ratio is stable
}

TEST_CASE("dynamical kernel throws outside the exp-regular domain") {
  auto G = build_model("su2");
  RVec xi = RVec::Zero(3);
  xi[2] = 4.7;  // ad eigenvalues +-sqrt(2)*4.7 i, beyond 2 pi
  CHECK_THROWS_AS(dynamical_T(*G, xi), std::domain_error);
}

TEST_CASE("subgroup model of a centralizer torus certifies as a model") {
  std::mt19937_64 rng(193);
  auto G = build_model("su3");
  CMat g = random_group(*G, rng);
  CentralizerSplit split = centralizer_split(*G, g);
  REQUIRE(split.dim_h == 2);  // generic: the maximal torus
  GroupModel H = subgroup_model(*G, split.h_basis, "t2");
  CHECK(H.d == 2);
  for (int a = 0; a < H.d; ++a)
    for (int b = 0; b < H.d; ++b)
      CHECK(std::abs(H.inner(H.basis[a], H.basis[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);
  for (double v : H.f) CHECK(std::abs(v) < 1e-12);  // torus subalgebra is abelian
}
