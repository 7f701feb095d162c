#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qpl/alt.hpp"
#include "qpl/model.hpp"

namespace qpl {

// Conjugacy-class constraint on a group factor: membership is matching the
// base point's eigenphase multiset.
struct ClassTag {
  CMat base;
  double membership_tol = 1e-9;
};

struct Factor {
  ModelPtr model;
  bool is_algebra = false;  // algebra factors use the flat coordinate frame
  int offset = 0;           // global frame offset
  std::optional<ClassTag> tag;
};

struct ModelSpace {
  std::vector<Factor> factors;
  int D = 0;

  void finalize() {
    D = 0;
    for (auto& f : factors) {
      f.offset = D;
      D += f.model->d;
    }
  }
  int factor_of(int global_dir) const {
    for (size_t j = 0; j < factors.size(); ++j)
      if (global_dir < factors[j].offset + factors[j].model->d) return static_cast<int>(j);
    throw std::out_of_range("factor_of");
  }
};

ModelSpace product_space(const std::vector<ModelPtr>& models);

struct FactorPoint {
  CMat g;    // group factors
  RVec xi;   // algebra factors
};

struct Point {
  std::vector<FactorPoint> p;
};

// Move a point along the global frame direction `dir` for time t: group
// factors flow by right translation g -> g exp(t e_b) (the left-invariant
// frame flow); algebra factors translate.
Point flow(const ModelSpace& S, const Point& m, int dir, double t);

Point sample_point(const ModelSpace& S, std::mt19937_64& rng, double scale = 0.6);

// Per-point cache of the adjoint data every field evaluator needs.
struct PointFrame {
  std::vector<RMat> Ad;      // Ad_{g_j} (identity for algebra factors)
  std::vector<RMat> Ad_inv;  // Ad_{g_j^{-1}}
};
PointFrame point_frame(const ModelSpace& S, const Point& m);

// How one acting-slot copy acts on one factor.
enum class ElemAct { None, Left, Right, Conj, Adjoint };

struct ActionSlot {
  ModelPtr group;
  std::vector<ElemAct> per_factor;
  std::string label;
};

struct ActionSpec {
  std::vector<ActionSlot> slots;
  int total_dim() const {
    int s = 0;
    for (const auto& sl : slots) s += sl.group->d;
    return s;
  }
};

// Generating-field coefficient matrix of a slot at m: D x d_s, column a =
// global left-frame coefficients of the field generated by the a-th basis
// element (convention: the field of xi is d/dt|_0 exp(-t xi).m).
RMat slot_generator_matrix(const ModelSpace& S, const ActionSlot& slot, const Point& m);
// Exact directional derivative of the above along the frame flow `dir`.
RMat slot_generator_matrix_deriv(const ModelSpace& S, const ActionSlot& slot, const Point& m,
                                 int dir);
// All slots concatenated: D x total_dim.
RMat action_generator_matrix(const ModelSpace& S, const ActionSpec& A, const Point& m);
RMat action_generator_matrix_deriv(const ModelSpace& S, const ActionSpec& A, const Point& m,
                                   int dir);

// Apply the slot action of a group element.
Point act(const ModelSpace& S, const ActionSlot& slot, const CMat& g, const Point& m);

// Class membership distance (0 for untagged factors).
double class_distance(const Factor& f, const CMat& g);

}  // namespace qpl
