#include <cmath>
#include <random>

#include "doctest.h"
#include "qpl/reduction.hpp"

using namespace qpl;

namespace {

void check_certified(const std::vector<Residual>& rs, const Tolerances& tol) {
  REQUIRE(!rs.empty());
  for (const auto& r : rs) {
    INFO(r.identity, " [", r.name, "] = ", r.value);
    CHECK(r.value <= tol_of(tol, r.cls));
  }
}

Point identity_point(const ModelSpace& S) {
  Point m;
  for (const auto& f : S.factors)
    m.p.push_back(FactorPoint{CMat::Identity(f.model->n, f.model->n), RVec()});
  return m;
}

// Matrix-entry observable Re tr(g_factor B): smooth but not invariant.
ScalarFunction coordinate_function(const ModelSpace& S, int factor, const CMat& B) {
  const auto G = S.factors[factor].model;
  const int off = S.factors[factor].offset;
  ScalarFunction F;
  F.value = [factor, B](const Point& m) -> double { return (m.p[factor].g * B).trace().real(); };
  F.dvalue = [factor, off, B, G](const Point& m, int dir) -> double {
    if (dir < off || dir >= off + G->d) return 0.0;
    return (m.p[factor].g * G->basis[dir - off] * B).trace().real();
  };
  return F;
}

ScalarFunction constant_function(double c) {
  ScalarFunction F;
  F.value = [c](const Point&) -> double { return c; };
  F.dvalue = [](const Point&, int) -> double { return 0.0; };
  return F;
}

// Pointwise product with the exact product-rule differential.
ScalarFunction product_function(const ScalarFunction& A, const ScalarFunction& B) {
  ScalarFunction F;
  F.value = [A, B](const Point& m) -> double { return A.value(m) * B.value(m); };
  F.dvalue = [A, B](const Point& m, int dir) -> double {
    return A.dvalue(m, dir) * B.value(m) + A.value(m) * B.dvalue(m, dir);
  };
  return F;
}

CMat random_entry_matrix(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMat B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = std::complex<double>(nd(rng), nd(rng));
  return B;
}

}  // namespace

TEST_CASE("rep variety assembly: moment is the handle-boundary word") {
  auto G = build_model("su2");
  std::mt19937_64 rng(17);

  auto full = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
  CHECK(full.X.A.slots.size() == 1);
  CHECK(full.X.S.factors.size() == 3);
  CHECK(full.names.at("a1") == 0);
  CHECK(full.names.at("c1") == 2);
  REQUIRE(full.X.moments.size() == 1);
  REQUIRE(full.X.moments[0].has_value());
  CHECK(full.X.moments[0]->exact);
  for (int i = 0; i < 4; ++i) {
    Point m = full.X.sample(rng);
    const CMat w = eval_word(full.X.S, parse_word("a1 b1 a1' b1' c1", full.names), m);
    INFO("sample ", i);
    CHECK((full.X.moments[0]->value(m) - w).norm() <= 1e-13);
  }

  auto two = build_rep_variety(SurfaceData{2, 2, {}}, G, RepVariant::Full);
  CHECK(two.X.S.factors.size() == 6);
  {
    Point m = two.X.sample(rng);
    const CMat w =
        eval_word(two.X.S, parse_word("a1 b1 a1' b1' a2 b2 a2' b2' c1 c2", two.names), m);
    CHECK((two.X.moments[0]->value(m) - w).norm() <= 1e-13);
  }

  auto trim = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Trimmed);
  CHECK(trim.X.S.factors.size() == 2);
  CHECK(trim.names.count("c1") == 0);
  {
    Point m = trim.X.sample(rng);
    const CMat w = eval_word(trim.X.S, parse_word("a1 b1 a1' b1'", trim.names), m);
    CHECK((trim.X.moments[0]->value(m) - w).norm() <= 1e-13);
  }

  // one boundary circle and no handles, trimmed: the zero-dimensional space
  // with constant identity moment
  auto triv = build_rep_variety(SurfaceData{0, 1, {}}, G, RepVariant::Trimmed);
  CHECK(triv.X.S.D == 0);
  CHECK((triv.X.moments[0]->value(Point{}) - CMat::Identity(2, 2)).norm() == 0.0);

  CHECK_THROWS_AS(build_rep_variety(SurfaceData{1, 0, {}}, G, RepVariant::Full),
                  std::invalid_argument);
  SurfaceData overfull{0, 1, {std::nullopt, std::nullopt}};
  CHECK_THROWS_AS(build_rep_variety(overfull, G, RepVariant::Full), std::invalid_argument);
  SurfaceData pinned_last{0, 1, {std::optional<CMat>(G->exp_coords(RVec::Unit(3, 0)))}};
  CHECK_THROWS_AS(build_rep_variety(pinned_last, G, RepVariant::Trimmed), std::invalid_argument);

  // the assembled space satisfies the structure and moment identities
  check_certified(certify(full.X, rng, 3), G->tol);
}

TEST_CASE("trace words: invariance and closed-form differentials") {
  for (std::string kind : {"su2", "so3"}) {
    auto G = build_model(kind);
    auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
    std::mt19937_64 rng(23);
    for (std::string text : {"a1", "b1", "a1 b1", "a1 b1 a1' c1"}) {
      ScalarFunction F = parse_trace_word(R, text);
      INFO(kind, " word ", text);
      CHECK(invariance_defect(R.X, F, rng, 3) <= 1e-10);
      ScalarFunction num = fd_oracle(R.X.S, F.value);
      double worst = 0;
      for (int i = 0; i < 2; ++i) {
        Point m = R.X.sample(rng);
        for (int dir = 0; dir < R.X.S.D; ++dir)
          worst = std::max(worst, std::abs(F.dvalue(m, dir) - num.dvalue(m, dir)));
      }
      CHECK(worst <= 1e-8);
    }
    CHECK_THROWS_AS(parse_trace_word(R, "a2"), WordParseError);
  }
}

TEST_CASE("reduced bracket: antisymmetry, derivation rule, descent") {
  auto G = build_model("su2");
  auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
  std::mt19937_64 rng(31);
  ScalarFunction Fa = parse_trace_word(R, "a1");
  ScalarFunction Fb = parse_trace_word(R, "b1");
  ScalarFunction Fc = parse_trace_word(R, "c1");
  ScalarFunction Fab = parse_trace_word(R, "a1 b1");

  for (int i = 0; i < 3; ++i) {
    Point m = R.X.sample(rng);
    INFO("sample ", i);
    const double ab = reduced_bracket(R.X, Fa, Fb, m);
    CHECK(std::abs(ab + reduced_bracket(R.X, Fb, Fa, m)) <= 1e-14);
    CHECK(std::abs(reduced_bracket(R.X, Fa, Fa, m)) <= 1e-14);

    // bracket with a product: derivation in each argument
    const double lhs = reduced_bracket(R.X, Fa, product_function(Fb, Fc), m);
    const double rhs = ab * Fc.value(m) + Fb.value(m) * reduced_bracket(R.X, Fa, Fc, m);
    CHECK(std::abs(lhs - rhs) <= 1e-12);

    // the value descends: constant along the conjugation orbit
    const CMat h = random_group(*G, rng);
    const Point hm = act(R.X.S, R.X.A.slots[0], h, m);
    CHECK(std::abs(reduced_bracket(R.X, Fa, Fb, hm) - ab) <= 1e-9);
    CHECK(std::abs(reduced_bracket(R.X, Fab, Fc, hm) - reduced_bracket(R.X, Fab, Fc, m)) <= 1e-9);

    // closed-form differentials against the central-difference oracle
    const double num = poisson_bracket(R.X, fd_oracle(R.X.S, Fa.value),
                                       fd_oracle(R.X.S, Fab.value), m);
    CHECK(std::abs(reduced_bracket(R.X, Fa, Fab, m) - num) <= 1e-8);
  }

  // non-invariant input is rejected by the gate, not silently bracketed
  ScalarFunction bad = coordinate_function(R.X.S, 0, random_entry_matrix(2, rng));
  Point m = R.X.sample(rng);
  CHECK_THROWS_AS(reduced_bracket(R.X, Fa, bad, m), std::invalid_argument);
  CHECK_THROWS_AS(reduced_bracket(R.X, bad, Fb, m), std::invalid_argument);
}

TEST_CASE("jacobi identity with the background term") {
  std::mt19937_64 rng(41);

  SUBCASE("invariant words on the genus-1 variety") {
    auto G = build_model("su2");
    auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
    ScalarFunction Fa = parse_trace_word(R, "a1");
    ScalarFunction Fb = parse_trace_word(R, "b1");
    ScalarFunction Fab = parse_trace_word(R, "a1 b1");
    ScalarFunction Fc = parse_trace_word(R, "c1");
    for (int i = 0; i < 3; ++i) {
      Point m = R.X.sample(rng);
      INFO("sample ", i);
      CHECK(std::abs(jacobi_residual(R.X, Fa, Fb, Fab, m)) <= 1e-6);
      CHECK(std::abs(jacobi_residual(R.X, Fa, Fb, Fc, m)) <= 1e-6);
    }
  }

  SUBCASE("coordinate functions need the background trivector") {
    for (std::string kind : {"su3", "su2"}) {
      auto G = build_model(kind);
      auto X = canonical_group_space(G);
      for (int i = 0; i < 2; ++i) {
        Point m = X.sample(rng);
        ScalarFunction f1 = coordinate_function(X.S, 0, random_entry_matrix(G->n, rng));
        ScalarFunction f2 = coordinate_function(X.S, 0, random_entry_matrix(G->n, rng));
        ScalarFunction f3 = coordinate_function(X.S, 0, random_entry_matrix(G->n, rng));
        INFO(kind, " sample ", i);
        CHECK(std::abs(jacobi_residual(X, f1, f2, f3, m)) <= 1e-6);
      }
    }
  }

  SUBCASE("a constant argument kills every term") {
    auto G = build_model("su2");
    auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
    Point m = R.X.sample(rng);
    CHECK(std::abs(jacobi_residual(R.X, parse_trace_word(R, "a1"), parse_trace_word(R, "b1"),
                                   constant_function(2.5), m)) <= 1e-15);
  }

  SUBCASE("linear structures have no background term") {
    auto G = build_model("su2");
    auto X = linear_poisson_space(G);
    std::mt19937_64 r2(7);
    Point m = X.sample(r2);
    auto coord = [&X](int i) {
      ScalarFunction F;
      F.value = [i](const Point& q) -> double { return q.p[0].xi[i]; };
      F.dvalue = [i](const Point&, int dir) -> double { return dir == i ? 1.0 : 0.0; };
      return F;
    };
    CHECK(std::abs(jacobi_residual(X, coord(0), coord(1), coord(2), m)) <= 1e-9);
  }
}

TEST_CASE("the two presentations agree through the identity-level embedding") {
  auto G = build_model("su2");
  std::mt19937_64 rng(53);
  struct Pair {
    SurfaceData surf;
    std::vector<std::string> words;
  };
  const std::vector<Pair> cases = {
      {{1, 1, {}}, {"a1", "b1", "a1 b1"}},
      {{1, 2, {}}, {"a1", "c1", "a1 b1", "b1 c1"}},
  };
  for (const auto& cs : cases) {
    auto full = build_rep_variety(cs.surf, G, RepVariant::Full);
    auto trim = build_rep_variety(cs.surf, G, RepVariant::Trimmed);
    for (int i = 0; i < 3; ++i) {
      Point m = trim.X.sample(rng);
      Point q = identity_level_embedding(trim.X, m);
      INFO("genus ", cs.surf.genus, " boundary ", cs.surf.boundary, " sample ", i);
      CHECK((full.X.moments[0]->value(q) - CMat::Identity(2, 2)).norm() <= 1e-13);
      for (size_t a = 0; a < cs.words.size(); ++a) {
        ScalarFunction Ft = parse_trace_word(trim, cs.words[a]);
        ScalarFunction Ff = parse_trace_word(full, cs.words[a]);
        CHECK(std::abs(Ff.value(q) - Ft.value(m)) <= 1e-14);
        for (size_t b = a + 1; b < cs.words.size(); ++b) {
          ScalarFunction Gt = parse_trace_word(trim, cs.words[b]);
          ScalarFunction Gf = parse_trace_word(full, cs.words[b]);
          INFO("words ", cs.words[a], " | ", cs.words[b]);
          CHECK(std::abs(reduced_bracket(full.X, Ff, Gf, q) -
                         reduced_bracket(trim.X, Ft, Gt, m)) <= 1e-8);
        }
      }
    }
  }
}

TEST_CASE("level-set projection: center, generic class, feasibility") {
  auto G = build_model("su2");
  auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
  std::mt19937_64 rng(61);

  SUBCASE("identity class from random starts") {
    const CMat e = CMat::Identity(2, 2);
    int ok = 0;
    const int total = 12;
    double iters = 0;
    Point witness;
    for (int i = 0; i < total; ++i) {
      Point m0 = R.X.sample(rng);
      try {
        LevelSetPoint lsp = project_to_level_set(R.X, m0, e);
        ++ok;
        iters += lsp.iterations;
        CHECK(lsp.distance <= 1e-9);
        CHECK(lsp.locally_free);
        witness = lsp.m;
      } catch (const std::runtime_error&) {
      }
    }
    MESSAGE("identity-class projection: ", ok, "/", total, " starts converged, mean iterations ",
            iters / std::max(ok, 1));
    CHECK(ok == total);

    // the jacobi and tangency certificates hold on the level set itself
    ScalarFunction Fa = parse_trace_word(R, "a1");
    ScalarFunction Fb = parse_trace_word(R, "b1");
    ScalarFunction Fab = parse_trace_word(R, "a1 b1");
    CHECK(std::abs(jacobi_residual(R.X, Fa, Fb, Fab, witness)) <= 1e-6);
    TangencyReport rep = tangency_and_rank_checks(R.X, {Fa, Fb, Fab}, witness);
    CHECK(rep.tangency <= 1e-9);

    // a fixed point of the action maps its moment to the identity already
    LevelSetPoint at_e = project_to_level_set(R.X, identity_point(R.X.S), e);
    CHECK(at_e.iterations == 0);
    CHECK_FALSE(at_e.locally_free);
  }

  SUBCASE("generic class, idempotence on the level set") {
    const CMat base = G->exp_coords((RVec(3) << 0.7, -0.2, 0.4).finished());
    Point m0 = R.X.sample(rng);
    LevelSetPoint lsp = project_to_level_set(R.X, m0, base);
    CHECK(lsp.distance <= 1e-9);
    LevelSetPoint again = project_to_level_set(R.X, lsp.m, base);
    CHECK(again.iterations == 0);
    for (size_t j = 0; j < lsp.m.p.size(); ++j)
      CHECK((again.m.p[j].g - lsp.m.p[j].g).norm() == 0.0);
  }

  SUBCASE("complex trace residuals") {
    auto H = build_model("su3");
    auto Rs = build_rep_variety(SurfaceData{1, 1, {}}, H, RepVariant::Full);
    std::mt19937_64 r2(5);
    const CMat base = H->exp_coords(random_algebra(*H, r2, 0.5));
    Point m0 = Rs.X.sample(r2);
    LevelSetPoint lsp = project_to_level_set(Rs.X, m0, base);
    CHECK(lsp.distance <= 1e-9);
    CHECK(lsp.locally_free);
  }

  SUBCASE("a pinned boundary cannot reach a different class") {
    const CMat pin = G->exp_coords((RVec(3) << 0.5, 0.1, -0.3).finished());
    const CMat target = G->exp_coords((RVec(3) << 1.1, 0.0, 0.2).finished());
    auto pinned = build_rep_variety(SurfaceData{0, 1, {std::optional<CMat>(pin)}}, G,
                                    RepVariant::Full);
    Point m0 = pinned.X.sample(rng);
    CHECK_THROWS_AS(project_to_level_set(pinned.X, m0, target), std::runtime_error);
  }
}

TEST_CASE("tangency of invariant flows and moment rank") {
  std::mt19937_64 rng(71);
  for (std::string kind : {"su2", "su3"}) {
    auto G = build_model(kind);
    auto R = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Full);
    std::vector<ScalarFunction> fns = {parse_trace_word(R, "a1"), parse_trace_word(R, "b1"),
                                       parse_trace_word(R, "a1 b1 c1")};
    for (int i = 0; i < 3; ++i) {
      Point m = R.X.sample(rng);
      TangencyReport rep = tangency_and_rank_checks(R.X, fns, m);
      INFO(kind, " sample ", i);
      CHECK(rep.tangency <= 1e-9);
      CHECK(rep.locally_free);
      CHECK(rep.moment_rank_full);
      CHECK(rep.moment_rank == G->d);
    }
  }

  // the handle-only presentation at its fixed point: stabilizer is the whole
  // group and the moment jacobian collapses, so no rank is claimed there
  auto G = build_model("su2");
  auto trim = build_rep_variety(SurfaceData{1, 1, {}}, G, RepVariant::Trimmed);
  TangencyReport rep =
      tangency_and_rank_checks(trim.X, {parse_trace_word(trim, "a1")}, identity_point(trim.X.S));
  CHECK_FALSE(rep.locally_free);
  CHECK(rep.moment_rank == 0);
  CHECK(rep.tangency <= 1e-12);
}
