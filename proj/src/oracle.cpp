#include "qpl/oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpl {

namespace {

// Oracle-local step sizes: matrix-valued chart derivatives (h_g) and outer
// component derivatives (h_c). Both 4th-order central stencils.
constexpr double kHg = 2e-3;
constexpr double kHc = 1e-3;

size_t ipow(int D, int k) {
  size_t r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<size_t>(D);
  return r;
}

size_t flat(int D, int k, const int* idx) {
  size_t r = 0;
  for (int i = 0; i < k; ++i) r = r * static_cast<size_t>(D) + static_cast<size_t>(idx[i]);
  return r;
}

Point chart_point(const ModelSpace& S, const Point& m0, const RVec& x) {
  Point m = m0;
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    if (f.is_algebra)
      m.p[j].xi = m0.p[j].xi + x.segment(f.offset, f.model->d);
    else
      m.p[j].g = m0.p[j].g * f.model->exp_coords(x.segment(f.offset, f.model->d));
  }
  return m;
}

// Columns: left-frame coefficients of the chart coordinate fields, obtained
// from matrix-entry differences of the chart map (no logarithms involved).
RMat chart_jacobian(const ModelSpace& S, const Point& m0, const RVec& x) {
  RMat J = RMat::Zero(S.D, S.D);
  Point at = chart_point(S, m0, x);
  for (size_t j = 0; j < S.factors.size(); ++j) {
    const Factor& f = S.factors[j];
    const int d = f.model->d, off = f.offset;
    if (f.is_algebra) {
      J.block(off, off, d, d) = RMat::Identity(d, d);
      continue;
    }
    CMat gi = at.p[j].g.adjoint();
    for (int b = 0; b < d; ++b) {
      auto gat = [&](double t) {
        RVec xs = x;
        xs[off + b] += t;
        return chart_point(S, m0, xs).p[j].g;
      };
      CMat dg = (8.0 * (gat(kHg) - gat(-kHg)) - (gat(2 * kHg) - gat(-2 * kHg))) / (12 * kHg);
      J.block(off, off, d, d).col(b) = f.model->coords_of(gi * dg);
    }
  }
  return J;
}

// Dense expansion of a compressed value (input decode only).
DenseTensor densify(const AltTensor& t) {
  DenseTensor out{t.dim, t.deg, std::vector<double>(ipow(t.dim, t.deg), 0.0)};
  if (t.deg == 0) {
    out.a[0] = t.c[0];
    return out;
  }
  int idx[8];
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == t.deg) {
      double v = alt_get(t, idx);
      if (v == 0.0) return;
      int perm[8];
      std::copy(idx, idx + t.deg, perm);
      std::sort(perm, perm + t.deg);
      do {
        int inv = 0;
        for (int i = 0; i < t.deg; ++i)
          for (int j = i + 1; j < t.deg; ++j)
            if (perm[i] > perm[j]) ++inv;
        double s = (inv & 1) ? -1.0 : 1.0;
        out.a[flat(t.dim, t.deg, perm)] = s * alt_get(t, idx);
      } while (std::next_permutation(perm, perm + t.deg));
      return;
    }
    for (int a = start; a < t.dim; ++a) {
      idx[pos] = a;
      rec(pos + 1, a + 1);
    }
  };
  rec(0, 0);
  return out;
}

// Apply M to every tensor slot: w[j...] = prod_s M(j_s, i_s) t[i...].
DenseTensor apply_all_slots(const DenseTensor& t, const RMat& M) {
  DenseTensor cur = t;
  const int D = t.D, k = t.k;
  for (int s = 0; s < k; ++s) {
    DenseTensor nxt{D, k, std::vector<double>(cur.a.size(), 0.0)};
    size_t hi = ipow(D, s), lo = ipow(D, k - s - 1);
    for (size_t h = 0; h < hi; ++h)
      for (int jn = 0; jn < D; ++jn)
        for (size_t l = 0; l < lo; ++l) {
          double acc = 0;
          for (int i = 0; i < D; ++i)
            acc += M(jn, i) * cur.a[(h * D + i) * lo + l];
          nxt.a[(h * D + jn) * lo + l] = acc;
        }
    cur = std::move(nxt);
  }
  return cur;
}

// Shuffle-sum wedge on dense arrays.
DenseTensor wedge_dense(const DenseTensor& u, const DenseTensor& v) {
  const int D = u.D, p = u.k, q = v.k, k = p + q;
  DenseTensor out{D, k, std::vector<double>(ipow(D, k), 0.0)};
  if (p == 0) {
    for (size_t r = 0; r < out.a.size(); ++r) out.a[r] = u.a[0] * v.a[r];
    return out;
  }
  if (q == 0) {
    for (size_t r = 0; r < out.a.size(); ++r) out.a[r] = v.a[0] * u.a[r];
    return out;
  }
  // position subsets of size p, with the inversion sign against the rest
  std::vector<std::pair<std::vector<int>, double>> shuffles;
  for (int mask = 0; mask < (1 << k); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) != p) continue;
    std::vector<int> sel;
    for (int i = 0; i < k; ++i)
      if (mask & (1 << i)) sel.push_back(i);
    int inv = 0;
    for (int s : sel)
      for (int t = 0; t < k; ++t)
        if (!(mask & (1 << t)) && s > t) ++inv;
    shuffles.push_back({sel, (inv & 1) ? -1.0 : 1.0});
  }
  int idx[8], iu[8], iv[8];
  for (size_t r = 0; r < out.a.size(); ++r) {
    size_t rem = r;
    for (int i = k - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % D);
      rem /= D;
    }
    double acc = 0;
    for (const auto& sh : shuffles) {
      int a = 0, b = 0;
      for (int i = 0, si = 0; i < k; ++i) {
        if (si < p && sh.first[si] == i) {
          iu[a++] = idx[i];
          ++si;
        } else {
          iv[b++] = idx[i];
        }
      }
      acc += sh.second * u.a[flat(D, p, iu)] * v.a[flat(D, q, iv)];
    }
    out.a[r] = acc;
  }
  return out;
}

// Front-slot Grassmann derivative; right variant carries (-1)^{k-1}.
DenseTensor dl_front(const DenseTensor& t, int b) {
  const int D = t.D, k = t.k;
  DenseTensor out{D, k - 1, std::vector<double>(ipow(D, k - 1), 0.0)};
  size_t lo = ipow(D, k - 1);
  for (size_t r = 0; r < lo; ++r) out.a[r] = t.a[static_cast<size_t>(b) * lo + r];
  return out;
}
DenseTensor dr_front(const DenseTensor& t, int b) {
  DenseTensor out = dl_front(t, b);
  if ((t.k - 1) & 1)
    for (auto& v : out.a) v = -v;
  return out;
}

DenseTensor lin_comb(double a, const DenseTensor& x, double b, const DenseTensor& y) {
  DenseTensor out = x;
  for (size_t r = 0; r < out.a.size(); ++r) out.a[r] = a * x.a[r] + b * y.a[r];
  return out;
}

// Chart components of a multivector field at chart coordinates x.
DenseTensor chart_components(const ModelSpace& S, const MultiVectorField& u, const Point& m0,
                             const RVec& x) {
  DenseTensor raw = densify(u.coeff(chart_point(S, m0, x)));
  if (u.deg == 0) return raw;
  RMat J = chart_jacobian(S, m0, x);
  return apply_all_slots(raw, J.inverse());
}

// Chart components of a form (coframe transforms with J^T).
DenseTensor chart_form_components(const ModelSpace& S, const DifferentialForm& w, const Point& m0,
                                  const RVec& x) {
  DenseTensor raw = densify(w.coeff(chart_point(S, m0, x)));
  if (w.deg == 0) return raw;
  RMat J = chart_jacobian(S, m0, x);
  return apply_all_slots(raw, J.transpose());
}

DenseTensor fd_dir(const std::function<DenseTensor(const RVec&)>& f, int D, int b) {
  RVec e = RVec::Zero(D);
  e[b] = 1.0;
  DenseTensor p1 = f(kHc * e), m1 = f(-kHc * e), p2 = f(2 * kHc * e), m2 = f(-2 * kHc * e);
  DenseTensor out = p1;
  for (size_t r = 0; r < out.a.size(); ++r)
    out.a[r] = (8.0 * (p1.a[r] - m1.a[r]) - (p2.a[r] - m2.a[r])) / (12 * kHc);
  return out;
}

}  // namespace

double DenseTensor::at(const int* idx) const { return a[flat(D, k, idx)]; }
double DenseTensor::at(std::initializer_list<int> idx) const {
  return at(std::data(idx));
}

DenseTensor oracle_schouten(const ModelSpace& S, const MultiVectorField& u,
                            const MultiVectorField& v, const Point& m0) {
  const int D = S.D, p = u.deg, q = v.deg;
  const int k = std::max(p + q - 1, 0);
  DenseTensor out{D, k, std::vector<double>(ipow(D, k), 0.0)};
  if (p == 0 && q == 0) return out;

  auto uc = [&](const RVec& x) { return chart_components(S, u, m0, x); };
  auto vc = [&](const RVec& x) { return chart_components(S, v, m0, x); };
  DenseTensor U = uc(RVec::Zero(D)), V = vc(RVec::Zero(D));
  const double sign = (((p - 1) * (q - 1)) % 2 != 0) ? -1.0 : 1.0;

  // Coordinate frame: no algebraic term.
  for (int b = 0; b < D; ++b) {
    if (p >= 1) out = lin_comb(1.0, out, 1.0, wedge_dense(dr_front(U, b), fd_dir(vc, D, b)));
    if (q >= 1) out = lin_comb(1.0, out, -sign, wedge_dense(dr_front(V, b), fd_dir(uc, D, b)));
  }
  if (k == 0) return out;
  return apply_all_slots(out, chart_jacobian(S, m0, RVec::Zero(D)));
}

DenseTensor oracle_exterior_derivative(const ModelSpace& S, const DifferentialForm& w,
                                       const Point& m0) {
  const int D = S.D, k = w.deg;
  auto wc = [&](const RVec& x) { return chart_form_components(S, w, m0, x); };

  // T[j0 j1..jk] = d_{j0} w[j1..jk], then (k+1) Alt(T).
  std::vector<DenseTensor> dW(D);
  for (int b = 0; b < D; ++b) dW[b] = fd_dir(wc, D, b);
  DenseTensor out{D, k + 1, std::vector<double>(ipow(D, k + 1), 0.0)};
  int idx[8], perm[8];
  for (size_t r = 0; r < out.a.size(); ++r) {
    size_t rem = r;
    for (int i = k; i >= 0; --i) {
      idx[i] = static_cast<int>(rem % D);
      rem /= D;
    }
    // Alternate over which slot carries the derivative: standard expansion
    // sum_i (-1)^i d_{j_i} w[j_0.. omit i ..j_k].
    double acc = 0;
    for (int i = 0; i <= k; ++i) {
      int kk = 0;
      for (int j = 0; j <= k; ++j)
        if (j != i) perm[kk++] = idx[j];
      double s = (i & 1) ? -1.0 : 1.0;
      acc += s * dW[idx[i]].a[flat(D, k, perm)];
    }
    out.a[r] = acc;
  }
  RMat J0T = chart_jacobian(S, m0, RVec::Zero(D)).transpose();
  return apply_all_slots(out, J0T.inverse());
}

RVec oracle_vector_bracket(const ModelSpace& S, const MultiVectorField& x,
                           const MultiVectorField& y, const Point& m0) {
  const int D = S.D;
  auto xc = [&](const RVec& z) { return chart_components(S, x, m0, z); };
  auto yc = [&](const RVec& z) { return chart_components(S, y, m0, z); };
  DenseTensor X = xc(RVec::Zero(D)), Y = yc(RVec::Zero(D));
  RVec out = RVec::Zero(D);
  for (int b = 0; b < D; ++b) {
    DenseTensor dY = fd_dir(yc, D, b), dX = fd_dir(xc, D, b);
    for (int i = 0; i < D; ++i) out[i] += X.a[b] * dY.a[i] - Y.a[b] * dX.a[i];
  }
  RMat J0 = chart_jacobian(S, m0, RVec::Zero(D));
  return J0 * out;
}

double oracle_max_diff(const DenseTensor& o, const AltTensor& prod) {
  if (o.D != prod.dim || o.k != prod.deg) throw std::invalid_argument("oracle_max_diff: shape");
  if (o.k == 0) return std::abs(o.a[0] - prod.c[0]);
  double worst = 0;
  int idx[8];
  std::function<void(int, int)> rec = [&](int pos, int start) {
    if (pos == o.k) {
      worst = std::max(worst, std::abs(o.at(idx) - alt_get(prod, idx)));
      return;
    }
    for (int a = start; a < o.D; ++a) {
      idx[pos] = a;
      rec(pos + 1, a + 1);
    }
  };
  rec(0, 0);
  return worst;
}

}  // namespace qpl
