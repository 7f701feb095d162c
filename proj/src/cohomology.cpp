#include "qpl/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qpl {

VolumeStructure frame_volume(const ModelSpace&) {
  VolumeStructure V;
  V.density = [](const Point&) { return 1.0; };
  V.ddensity = [](const Point&, int) { return 0.0; };
  V.exact = true;
  return V;
}

VolumeStructure rescale_volume(const VolumeStructure& V, const MultiVectorField& logf) {
  if (logf.deg != 0) throw std::invalid_argument("rescale_volume: logf must have degree 0");
  VolumeStructure out;
  out.density = [V, logf](const Point& m) -> double {
    return V.density(m) * std::exp(logf.coeff(m).c[0]);
  };
  out.ddensity = [V, logf](const Point& m, int dir) -> double {
    const double s = std::exp(logf.coeff(m).c[0]);
    return s * (V.ddensity(m, dir) + V.density(m) * logf.dcoeff(m, dir).c[0]);
  };
  out.exact = V.exact && logf.exact;
  return out;
}

MultiVectorField log_trace_gauge(const ModelSpace& S, int factor) {
  const Factor& f = S.factors.at(factor);
  if (f.is_algebra)
    throw std::invalid_argument("log_trace_gauge: factor " + std::to_string(factor) +
                                " is not group-valued");
  const int D = S.D;
  MultiVectorField u;
  u.deg = 0;
  u.exact = true;
  u.coeff = [factor, D](const Point& m) -> AltTensor {
    return AltTensor::scalar(D, m.p[factor].g.trace().real());
  };
  auto G = f.model;
  const int off = f.offset;
  u.dcoeff = [factor, D, G, off](const Point& m, int dir) -> AltTensor {
    if (dir < off || dir >= off + G->d) return AltTensor(D, 0);
    const CMat v = m.p[factor].g * G->basis[dir - off];
    return AltTensor::scalar(D, v.trace().real());
  };
  return u;
}

AltTensor algebra_boundary(const GroupModel& G, const AltTensor& beta) {
  const int d = beta.dim, k = beta.deg;
  if (k <= 1) return AltTensor(d, 0);
  AltTensor out(d, k - 1);
  int idx[16], rest[16];
  const int nk = static_cast<int>(beta.c.size());
  for (int r = 0; r < nk; ++r) {
    const double cA = beta.c[r];
    if (cA == 0.0) continue;
    combo_unrank(r, k, idx);
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        int t = 1;
        for (int q = 0; q < k; ++q)
          if (q != i && q != j) rest[t++] = idx[q];
        // [e_p, e_q] = sum_c f(c, p, q) e_c with the stored convention
        // f(a, b, c) = <e_a, [e_b, e_c]>.
        for (int c = 0; c < d; ++c) {
          const double fv = G.fc(c, idx[i], idx[j]);
          if (fv == 0.0) continue;
          rest[0] = c;
          alt_add(out, rest, sign * cA * fv);
        }
      }
  }
  return out;
}

AltTensor bv_apply(const ModelSpace& S, const FrameAlgebra& FA, const VolumeStructure& V,
                   const MultiVectorField& u, const Point& m) {
  const int D = S.D;
  const double rho = V.density(m);
  if (!(rho > 0.0))
    throw std::domain_error("bv_apply: volume density is not positive at the evaluation point");
  if (u.deg == 0) return AltTensor(D, 0);
  DifferentialForm w;
  w.deg = D - u.deg;
  w.exact = u.exact && V.exact;
  w.coeff = [&](const Point& x) -> AltTensor { return V.density(x) * star_complement(u.coeff(x)); };
  w.dcoeff = [&](const Point& x, int dir) -> AltTensor {
    return V.ddensity(x, dir) * star_complement(u.coeff(x)) +
           V.density(x) * star_complement(u.dcoeff(x, dir));
  };
  const AltTensor dw = exterior_derivative(S, FA, w, m);
  // star_complement contracts in front-slot order; the (-1)^{deg+1} factor
  // normalizes the operator so that it generates the Schouten bracket with
  // the classical signs (pinned numerically across degree pairs).
  const double sgn = (u.deg % 2 == 0) ? -1.0 : 1.0;
  return (sgn * -1.0 / rho) * star_complement_inv(dw);
}

AltTensor bv_apply(const ModelSpace& S, const VolumeStructure& V, const MultiVectorField& u,
                   const Point& m) {
  return bv_apply(S, frame_algebra(S), V, u, m);
}

MultiVectorField bv_field(const ModelSpace& S, const VolumeStructure& V,
                          const MultiVectorField& u) {
  const FrameAlgebra FA = frame_algebra(S);
  return with_fd_derivative(S, u.deg > 0 ? u.deg - 1 : 0,
                            [S, FA, V, u](const Point& m) -> AltTensor {
                              return bv_apply(S, FA, V, u, m);
                            });
}

MultiVectorField modular_field(const QuasiPoissonSpace& X, const VolumeStructure& V) {
  return bv_field(X.S, V, X.P);
}

ModularReport modular_residuals(const QuasiPoissonSpace& X, const VolumeStructure& V,
                                std::mt19937_64& rng, int npoints) {
  const FrameAlgebra FA = frame_algebra(X.S);
  const MultiVectorField Xmu = modular_field(X, V);
  ModularReport rep;
  for (int p = 0; p < npoints; ++p) {
    const Point m = X.sample(rng);
    for (size_t s = 0; s < X.A.slots.size(); ++s) {
      const RVec xi = random_algebra(*X.A.slots[s].group, rng);
      const MultiVectorField gen =
          generated_field(X.S, X.A, static_cast<int>(s), AltTensor::vector(xi));
      // del_mu(xi_M) is the negated divergence of xi_M, which vanishes iff
      // the volume is invariant along the generated flow.
      if (bv_apply(X.S, FA, V, gen, m).norm() > 1e-6)
        throw std::invalid_argument(
            "modular_residuals: volume is not invariant under the action");
      rep.invariance = std::max(rep.invariance, schouten(X.S, gen, Xmu, m).norm());
    }
    rep.cocycle = std::max(rep.cocycle, schouten(X.S, X.P, Xmu, m).norm());
  }
  return rep;
}

double invariance_residual(const QuasiPoissonSpace& X, const MultiVectorField& u,
                           std::mt19937_64& rng, int npoints) {
  double worst = 0.0;
  for (int p = 0; p < npoints; ++p) {
    const Point m = X.sample(rng);
    for (size_t s = 0; s < X.A.slots.size(); ++s) {
      const RVec xi = random_algebra(*X.A.slots[s].group, rng);
      const MultiVectorField gen =
          generated_field(X.S, X.A, static_cast<int>(s), AltTensor::vector(xi));
      worst = std::max(worst, schouten(X.S, gen, u, m).norm());
    }
  }
  return worst;
}

}  // namespace qpl
