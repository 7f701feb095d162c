#include "doctest.h"
#include "qpl/model.hpp"

using namespace qpl;

namespace {
const std::vector<std::string> kKinds = {"su2", "su3", "so3", "torus3"};

ModelPtr get(const std::string& k) { return build_model(k); }
}  // namespace

TEST_CASE("basis orthonormality") {
  for (const auto& k : kKinds) {
    auto G = get(k);
    for (int a = 0; a < G->d; ++a)
      for (int b = 0; b < G->d; ++b)
        CHECK(std::abs(G->inner(G->basis[a], G->basis[b]) - (a == b ? 1.0 : 0.0)) < 1e-13);
  }
}

TEST_CASE("basis elements are skew-hermitian and traceless where required") {
  for (const auto& k : kKinds) {
    auto G = get(k);
    for (const auto& e : G->basis) {
      CHECK(is_skew_hermitian(e, 1e-13));
      if (G->det_one) CHECK(std::abs(e.trace()) < 1e-13);
    }
  }
}

TEST_CASE("su2 structure constants are sqrt(2) epsilon") {
  auto G = get("su2");
  const double r2 = std::sqrt(2.0);
  auto eps = [](int a, int b, int c) {
    return ((a - b) * (b - c) * (c - a)) / 2.0;  // Levi-Civita on {0,1,2}
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(G->fc(a, b, c) - r2 * eps(a, b, c)) < 1e-13);
}

TEST_CASE("so3 structure constants are epsilon") {
  auto G = get("so3");
  auto eps = [](int a, int b, int c) { return ((a - b) * (b - c) * (c - a)) / 2.0; };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        CHECK(std::abs(G->fc(a, b, c) - eps(a, b, c)) < 1e-13);
}

TEST_CASE("structure constants: full antisymmetry and Jacobi") {
  for (const auto& k : kKinds) {
    auto G = get(k);
    const int d = G->d;
    double worstA = 0, worstJ = 0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
          worstA = std::max(worstA, std::abs(G->fc(a, b, c) + G->fc(a, c, b)));
          worstA = std::max(worstA, std::abs(G->fc(a, b, c) + G->fc(b, a, c)));
        }
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e) {
            double s = 0;
            for (int dd = 0; dd < d; ++dd)
              s += G->fc(dd, a, b) * G->fc(e, dd, c) + G->fc(dd, b, c) * G->fc(e, dd, a) +
                   G->fc(dd, c, a) * G->fc(e, dd, b);
            worstJ = std::max(worstJ, std::abs(s));
          }
    CHECK(worstA < 1e-12);
    CHECK(worstJ < 1e-12);
  }
}

TEST_CASE("ad matrix matches bracket and is antisymmetric") {
  std::mt19937_64 rng(11);
  for (const auto& k : kKinds) {
    auto G = get(k);
    RVec xi = random_algebra(*G, rng);
    RMat ad = G->ad(xi);
    CHECK((ad + ad.transpose()).norm() < 1e-12);
    for (int b = 0; b < G->d; ++b) {
      RVec lhs = ad.col(b);
      RVec rhs = G->coords_of(G->bracket(G->alg_of(xi), G->basis[b]));
      CHECK((lhs - rhs).norm() < 1e-12);
    }
  }
}

TEST_CASE("Ad of exp equals exp of ad") {
  std::mt19937_64 rng(12);
  for (const auto& k : kKinds) {
    auto G = get(k);
    for (int rep = 0; rep < 3; ++rep) {
      RVec xi = random_algebra(*G, rng);
      RMat lhs = G->Ad(G->exp_coords(xi));
      RMat rhs = analytic_of_ad(*G, xi, [](cxd s) { return std::exp(s); });
      CHECK((lhs - rhs).norm() < 1e-11);
    }
  }
}

TEST_CASE("Ad is orthogonal with determinant one") {
  std::mt19937_64 rng(13);
  for (const auto& k : kKinds) {
    auto G = get(k);
    CMat g = random_group(*G, rng);
    RMat A = G->Ad(g);
    CHECK((A.transpose() * A - RMat::Identity(G->d, G->d)).norm() < 1e-12);
    CHECK(std::abs(A.determinant() - 1.0) < 1e-10);
  }
}

TEST_CASE("log inverts exp inside the natural domain") {
  std::mt19937_64 rng(14);
  for (const auto& k : kKinds) {
    auto G = get(k);
    for (int rep = 0; rep < 5; ++rep) {
      RVec xi = random_algebra(*G, rng);
      REQUIRE(G->in_natural_domain(xi));
      RVec back = G->log_coords(G->exp_coords(xi));
      CHECK((back - xi).norm() < 1e-11);
    }
  }
}

TEST_CASE("principal log refuses the branch cut") {
  auto G = get("su2");
  CMat minus_eye = -CMat::Identity(2, 2);
  CHECK_THROWS_AS((void)G->log_group(minus_eye), std::domain_error);
}

TEST_CASE("nu and phi functional identities") {
  // nu(s) - nu(-s) = s and (nu(s)+nu(-s))/2 = 1 - s*phi(s), including across
  // the series/direct switch at |s| = 1e-3.
  for (double y : {1e-4, 9e-4, 1.1e-3, 0.3, 2.0}) {
    cxd s(0.0, y);
    CHECK(std::abs(nu_fn(s) - nu_fn(-s) - s) < 1e-12);
    CHECK(std::abs(0.5 * (nu_fn(s) + nu_fn(-s)) - (1.0 - s * phi_fn(s))) < 1e-12);
  }
  // series and direct evaluation agree across the switch (|s| = 1e-3)
  CHECK(std::abs(nu_fn(cxd(0, 1e-3 - 1e-9)) - nu_fn(cxd(0, 1e-3 + 1e-9))) < 1e-8);
  CHECK(std::abs(phi_fn(cxd(0, 1e-3 - 1e-9)) - phi_fn(cxd(0, 1e-3 + 1e-9))) < 1e-8);
}

TEST_CASE("centralizer split: generic torus direction in su2") {
  auto G = get("su2");
  CMat g = G->exp_coords((RVec(3) << 0, 0, 0.9).finished());
  auto cs = centralizer_split(*G, g);
  CHECK(cs.dim_h == 1);
  // kernel spans e_3
  CHECK(std::abs(std::abs(cs.h_basis(2, 0)) - 1.0) < 1e-10);
  CHECK((cs.proj_h + cs.proj_perp - RMat::Identity(3, 3)).norm() < 1e-12);
  CHECK((cs.proj_h * cs.proj_h - cs.proj_h).norm() < 1e-12);
}

TEST_CASE("centralizer split: torus group is its own centralizer") {
  auto G = get("torus3");
  std::mt19937_64 rng(15);
  auto cs = centralizer_split(*G, random_group(*G, rng));
  CHECK(cs.dim_h == G->d);
}

TEST_CASE("centralizer split: su3 two-equal-eigenvalue point has dim 4") {
  auto G = get("su3");
  double al = 0.7;
  CMat g = CMat::Zero(3, 3);
  g(0, 0) = std::polar(1.0, al);
  g(1, 1) = std::polar(1.0, al);
  g(2, 2) = std::polar(1.0, -2 * al);
  auto cs = centralizer_split(*G, g);
  CHECK(cs.dim_h == 4);
  // the embedded subalgebra constants stay fully antisymmetric
  auto fh = embedded_subalgebra_f(*G, cs.proj_h);
  auto at = [&](int a, int b, int c) { return fh[(static_cast<size_t>(a) * 8 + b) * 8 + c]; };
  double worst = 0, mag = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b)
      for (int c = 0; c < 8; ++c) {
        worst = std::max(worst, std::abs(at(a, b, c) + at(a, c, b)));
        worst = std::max(worst, std::abs(at(a, b, c) + at(b, a, c)));
        mag = std::max(mag, std::abs(at(a, b, c)));
      }
  CHECK(worst < 1e-12);
  CHECK(mag > 0.5);  // genuinely non-abelian
}

TEST_CASE("model json round trip is exact") {
  std::mt19937_64 rng(16);
  for (const auto& k : kKinds) {
    auto G = get(k);
    GroupModel back = model_from_json(model_to_json(*G));
    CHECK(back.name == G->name);
    CHECK(back.n == G->n);
    CHECK(back.d == G->d);
    CHECK(back.det_one == G->det_one);
    CHECK(back.ip_scale == G->ip_scale);
    for (int a = 0; a < G->d; ++a) CHECK((back.basis[a] - G->basis[a]).norm() == 0.0);
    for (size_t i = 0; i < G->f.size(); ++i) CHECK(back.f[i] == G->f[i]);
    CHECK(model_to_json(back) == model_to_json(*G));
  }
}

TEST_CASE("random group points stay unitary and in range") {
  std::mt19937_64 rng(17);
  for (const auto& k : kKinds) {
    auto G = get(k);
    for (int rep = 0; rep < 10; ++rep) {
      CMat g = random_group(*G, rng);
      CHECK(is_unitary(g, 1e-12));
      if (G->det_one) CHECK(std::abs(g.determinant() - 1.0) < 1e-10);
    }
  }
}
