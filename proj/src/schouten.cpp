#include "qpl/schouten.hpp"

namespace qpl {

FrameAlgebra frame_algebra(const ModelSpace& S) {
  FrameAlgebra FA;
  for (const auto& f : S.factors) {
    if (f.is_algebra) continue;
    const GroupModel& M = *f.model;
    for (int a = 0; a < M.d; ++a)
      for (int b = 0; b < M.d; ++b)
        for (int c = 0; c < M.d; ++c) {
          double v = M.fc(a, b, c);
          if (v != 0.0) FA.nz.push_back({f.offset + a, f.offset + b, f.offset + c, v});
        }
  }
  return FA;
}

AltTensor schouten(const ModelSpace& S, const FrameAlgebra& FA, const MultiVectorField& u,
                   const MultiVectorField& v, const Point& m) {
  const int p = u.deg, q = v.deg, D = S.D;
  AltTensor out(D, std::max(p + q - 1, 0));
  if (p == 0 && q == 0) return out;

  AltTensor U = u.coeff(m), V = v.coeff(m);
  const double sign = (((p - 1) * (q - 1)) % 2 != 0) ? -1.0 : 1.0;

  if (p >= 1) {
    for (int b = 0; b < D; ++b) {
      AltTensor iu = interior_right(U, b);
      if (iu.c.isZero(0)) continue;
      out += wedge(iu, v.dcoeff(m, b));
    }
  }
  if (q >= 1) {
    for (int b = 0; b < D; ++b) {
      AltTensor iv = interior_right(V, b);
      if (iv.c.isZero(0)) continue;
      out += (-sign) * wedge(iv, u.dcoeff(m, b));
    }
  }
  if (p >= 1 && q >= 1 && !FA.nz.empty()) {
    std::vector<AltTensor> ilU(D), ilV(D);
    std::vector<char> haveU(D, 0), haveV(D, 0);
    auto getU = [&](int k) -> const AltTensor& {
      if (!haveU[k]) { ilU[k] = interior_left(U, k); haveU[k] = 1; }
      return ilU[k];
    };
    auto getV = [&](int k) -> const AltTensor& {
      if (!haveV[k]) { ilV[k] = interior_left(V, k); haveV[k] = 1; }
      return ilV[k];
    };
    // Group contributions by the frame generator in front.
    std::vector<AltTensor> acc(D);
    std::vector<char> haveAcc(D, 0);
    for (const auto& t : FA.nz) {
      AltTensor w = wedge(getU(t.a), getV(t.b));
      if (!haveAcc[t.c]) { acc[t.c] = AltTensor(D, w.deg); haveAcc[t.c] = 1; }
      acc[t.c] += t.v * w;
    }
    for (int c = 0; c < D; ++c) {
      if (!haveAcc[c]) continue;
      RVec e = RVec::Zero(D);
      e[c] = 1.0;
      out += wedge(AltTensor::vector(e), acc[c]);
    }
  }
  return out;
}

AltTensor schouten(const ModelSpace& S, const MultiVectorField& u, const MultiVectorField& v,
                   const Point& m) {
  return schouten(S, frame_algebra(S), u, v, m);
}

AltTensor exterior_derivative(const ModelSpace& S, const FrameAlgebra& FA,
                              const DifferentialForm& w, const Point& m) {
  const int D = S.D, k = w.deg;
  AltTensor out(D, k + 1);
  for (int b = 0; b < D; ++b) {
    RVec e = RVec::Zero(D);
    e[b] = 1.0;
    out += wedge(AltTensor::vector(e), w.dcoeff(m, b));
  }
  if (k >= 1 && !FA.nz.empty()) {
    AltTensor W = w.coeff(m);
    // d theta^c = -(1/2) f_{abc} theta^a ^ theta^b on group factors
    for (const auto& t : FA.nz) {
      AltTensor ic = interior_left(W, t.c);
      if (ic.c.isZero(0)) continue;
      AltTensor ab(D, 2);
      int idx[2] = {t.a, t.b};
      alt_add(ab, idx, 1.0);
      out += (-0.5 * t.v) * wedge(ab, ic);
    }
  }
  return out;
}

AltTensor exterior_derivative(const ModelSpace& S, const DifferentialForm& w, const Point& m) {
  return exterior_derivative(S, frame_algebra(S), w, m);
}

MultiVectorField schouten_field(const ModelSpace& S, const MultiVectorField& u,
                                const MultiVectorField& v) {
  ModelSpace Sc = S;
  FrameAlgebra FA = frame_algebra(S);
  MultiVectorField uc = u, vc = v;
  auto coeff = [Sc, FA, uc, vc](const Point& m) { return schouten(Sc, FA, uc, vc, m); };
  return with_fd_derivative(S, std::max(u.deg + v.deg - 1, 0), coeff);
}

DifferentialForm d_field(const ModelSpace& S, const DifferentialForm& w) {
  ModelSpace Sc = S;
  FrameAlgebra FA = frame_algebra(S);
  DifferentialForm wc = w;
  auto coeff = [Sc, FA, wc](const Point& m) { return exterior_derivative(Sc, FA, wc, m); };
  return with_fd_derivative(S, w.deg + 1, coeff);
}

RMat sharp_matrix(const AltTensor& P2) { return deg2_matrix(P2).transpose(); }

}  // namespace qpl
