#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpl/qp.hpp"

namespace qpl {

// Compact oriented surface with boundary: the representation variety of its
// fundamental group is the identity level set of the assembled moment, modulo
// the residual conjugation action.
struct SurfaceData {
  int genus = 0;
  int boundary = 1;
  // Optional conjugacy-class base point per boundary circle; an engaged entry
  // pins that holonomy factor to the class through it.
  std::vector<std::optional<CMat>> classes;
};

// Presentation choice. Full keeps one group factor per boundary circle and
// constrains the total moment to the identity class; Trimmed drops the last
// circle, whose holonomy is recovered as the inverse of the remaining moment,
// and needs no constraint.
enum class RepVariant { Full, Trimmed };

// One-slot Hamiltonian space assembled from genus doubles and boundary
// factors, with the generator-name table for word input.
struct RepVarietySpace {
  SurfaceData surface;
  RepVariant variant = RepVariant::Full;
  QuasiPoissonSpace X;
  std::map<std::string, int> names;  // generator name -> group factor index
};

// Left-to-right fusion of genus doubles (handle pairs a_j, b_j) and boundary
// factors (c_k); the moment is the word  a1 b1 a1' b1' ... c1 c2 ...
// Throws std::invalid_argument when boundary < 1, when a class entry targets
// a missing circle, or when Trimmed would drop a pinned circle.
RepVarietySpace build_rep_variety(const SurfaceData& surf, ModelPtr G, RepVariant variant);

// The map m -> (m, Phi(m)^{-1}) of a one-slot Hamiltonian space into its
// fusion with one more group factor; the image lies on the identity level of
// the fused moment, and brackets of invariant observables are preserved.
Point identity_level_embedding(const QuasiPoissonSpace& M, const Point& m);

// Scalar observable with a frame differential: dvalue(m, dir) is the exact
// derivative along the global frame direction dir.
struct ScalarFunction {
  std::function<double(const Point&)> value;
  std::function<double(const Point&, int)> dvalue;
};

// Re tr of a word in the group factors: invariant under diagonal conjugation,
// with the closed-form differential from the word's right-trivialized
// jacobian (cyclic product rule over the letters).
ScalarFunction trace_word_function(const ModelSpace& S, ModelPtr target, const Word& w);

// Parse `text` against the variety's generator table and wrap it as a trace
// observable.
ScalarFunction parse_trace_word(const RepVarietySpace& R, const std::string& text);

// Same observable with the differential replaced by the engine's central
// difference along the frame flows; oracle for closed-form differentials.
ScalarFunction fd_oracle(const ModelSpace& S, std::function<double(const Point&)> value);

// Stacked differential covector (dvalue over all frame directions).
RVec differential_covector(const ModelSpace& S, const ScalarFunction& F, const Point& m);

// Max |F(h.m) - F(m)| over sampled points and group elements of every slot.
double invariance_defect(const QuasiPoissonSpace& X, const ScalarFunction& F,
                         std::mt19937_64& rng, int npoints);

// {F1, F2}(m) = P(dF1, dF2)(m).
double poisson_bracket(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const Point& m);

// poisson_bracket behind an invariance gate: both inputs are probed against
// deterministic slot elements at m and must be invariant (the bracket of
// invariant observables is again invariant, so the value descends to the
// quotient). Non-invariant input throws std::invalid_argument.
double reduced_bracket(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const Point& m);

// Cyclic double bracket minus the background term,
//   {{F1,F2},F3} + {{F2,F3},F1} + {{F3,F1},F2} - c phi_M(dF1,dF2,dF3),
// with c = -1/2, the constant of the structure identity in the frame
// determinant pairing (pinned numerically; it is convention bookkeeping, not
// an extra hypothesis). Vanishes identically on quasi-Poisson spaces; the
// background term drops out when the inputs are invariant.
double jacobi_residual(const QuasiPoissonSpace& X, const ScalarFunction& F1,
                       const ScalarFunction& F2, const ScalarFunction& F3, const Point& m);

// Result of projecting onto a moment level set.
struct LevelSetPoint {
  Point m;
  double distance = 0;       // eigenphase distance of the moment value to the class
  bool locally_free = false; // slot generators span a dim-G subspace at m
  int iterations = 0;
};

// Move m0 along admissible frame directions (orbit directions only on
// class-tagged factors) until the moment value lands in the conjugacy class
// of `base`: damped Gauss-Newton with exact jacobians, on the log coordinates
// of Phi base^{-1} when base is central and on the power-trace invariants
// otherwise. A point already on the level set returns unchanged. Throws
// std::runtime_error when the iteration stalls or max_iter is exhausted.
LevelSetPoint project_to_level_set(const QuasiPoissonSpace& X, const Point& m0,
                                   const CMat& base, int max_iter = 60);

struct TangencyReport {
  double tangency = 0;       // max |dPhi(P# dF)| over the supplied observables
  int moment_rank = 0;       // rank of the right-trivialized moment jacobian
  bool locally_free = false;
  bool moment_rank_full = false;  // moment_rank == dim G; implied at locally free points
};

// Tangency of the Hamiltonian fields of invariant observables to the moment
// level sets, and the rank of the moment jacobian at m.
TangencyReport tangency_and_rank_checks(const QuasiPoissonSpace& X,
                                        const std::vector<ScalarFunction>& fns,
                                        const Point& m);

}  // namespace qpl
