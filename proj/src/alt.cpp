#include "qpl/alt.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace qpl {

namespace {
constexpr int kMaxN = 40;
struct BinomTable {
  long long v[kMaxN + 1][kMaxN + 1];
  BinomTable() {
    for (int n = 0; n <= kMaxN; ++n) {
      v[n][0] = 1;
      for (int k = 1; k <= kMaxN; ++k)
        v[n][k] = (k > n) ? 0 : (n == 0 ? 0 : v[n - 1][k - 1] + v[n - 1][k]);
    }
  }
};
const BinomTable kBinom;
}  // namespace

long long binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (n > kMaxN) throw std::domain_error("binom: dimension too large");
  return kBinom.v[n][k];
}

int combo_rank(const int* idx, int k) {
  long long r = 0;
  for (int i = 0; i < k; ++i) r += binom(idx[i], i + 1);
  return static_cast<int>(r);
}

void combo_unrank(int r, int k, int* idx_out) {
  long long rem = r;
  for (int i = k - 1; i >= 0; --i) {
    int a = i;  // smallest candidate with C(a, i+1) <= rem
    while (binom(a + 1, i + 1) <= rem) ++a;
    idx_out[i] = a;
    rem -= binom(a, i + 1);
  }
}

namespace {
// Sort an index tuple, returning the permutation sign; 0 if repeated.
int sort_sign(int* idx, int k) {
  int sign = 1;
  for (int i = 1; i < k; ++i)
    for (int j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
      std::swap(idx[j], idx[j - 1]);
      sign = -sign;
    }
  for (int i = 1; i < k; ++i)
    if (idx[i] == idx[i - 1]) return 0;
  return sign;
}
}  // namespace

double alt_get(const AltTensor& t, const int* idx) {
  int tmp[16];
  std::memcpy(tmp, idx, sizeof(int) * t.deg);
  int s = sort_sign(tmp, t.deg);
  if (s == 0) return 0.0;
  return s * t.c[combo_rank(tmp, t.deg)];
}

void alt_add(AltTensor& t, const int* idx, double v) {
  int tmp[16];
  std::memcpy(tmp, idx, sizeof(int) * t.deg);
  int s = sort_sign(tmp, t.deg);
  if (s == 0) return;
  t.c[combo_rank(tmp, t.deg)] += s * v;
}

AltTensor wedge(const AltTensor& a, const AltTensor& b) {
  if (a.dim != b.dim) throw std::invalid_argument("wedge: dimension mismatch");
  AltTensor out(a.dim, a.deg + b.deg);
  if (a.deg + b.deg > a.dim) return out;  // identically zero
  int ia[16], ib[16], merged[16];
  const int na = static_cast<int>(a.c.size()), nb = static_cast<int>(b.c.size());
  for (int ra = 0; ra < na; ++ra) {
    if (a.c[ra] == 0.0) continue;
    combo_unrank(ra, a.deg, ia);
    for (int rb = 0; rb < nb; ++rb) {
      if (b.c[rb] == 0.0) continue;
      combo_unrank(rb, b.deg, ib);
      // merge, counting inversions (pairs with a-index > b-index)
      bool dup = false;
      {
        int i = 0, j = 0;
        while (i < a.deg && j < b.deg) {
          if (ia[i] == ib[j]) { dup = true; break; }
          if (ia[i] < ib[j]) ++i; else ++j;
        }
      }
      if (dup) continue;
      int inv = 0;
      for (int i = 0; i < a.deg; ++i)
        for (int j = 0; j < b.deg; ++j)
          if (ia[i] > ib[j]) ++inv;
      int i = 0, j = 0, k = 0;
      while (i < a.deg || j < b.deg) {
        if (j >= b.deg || (i < a.deg && ia[i] < ib[j])) merged[k++] = ia[i++];
        else merged[k++] = ib[j++];
      }
      double sgn = (inv & 1) ? -1.0 : 1.0;
      out.c[combo_rank(merged, k)] += sgn * a.c[ra] * b.c[rb];
    }
  }
  return out;
}

AltTensor interior_left(const AltTensor& t, int a) {
  if (t.deg == 0) return AltTensor(t.dim, 0);
  AltTensor out(t.dim, t.deg - 1);
  int idx[16], rest[16];
  const int n = static_cast<int>(t.c.size());
  for (int r = 0; r < n; ++r) {
    if (t.c[r] == 0.0) continue;
    combo_unrank(r, t.deg, idx);
    for (int i = 0; i < t.deg; ++i) {
      if (idx[i] != a) continue;
      int k = 0;
      for (int j = 0; j < t.deg; ++j)
        if (j != i) rest[k++] = idx[j];
      double sgn = (i & 1) ? -1.0 : 1.0;
      out.c[combo_rank(rest, t.deg - 1)] += sgn * t.c[r];
      break;
    }
  }
  return out;
}

AltTensor interior_right(const AltTensor& t, int a) {
  AltTensor out = interior_left(t, a);
  if ((t.deg - 1) & 1) out.c = -out.c;
  return out;
}

AltTensor contract_covector(const AltTensor& t, const RVec& w) {
  AltTensor out(t.dim, t.deg > 0 ? t.deg - 1 : 0);
  if (t.deg == 0) return out;
  for (int a = 0; a < t.dim; ++a) {
    if (w[a] == 0.0) continue;
    out += w[a] * interior_left(t, a);
  }
  return out;
}

namespace {
double minor_det(const RMat& J, const int* rows, const int* cols, int k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return J(rows[0], cols[0]);
    case 2:
      return J(rows[0], cols[0]) * J(rows[1], cols[1]) - J(rows[0], cols[1]) * J(rows[1], cols[0]);
    case 3: {
      double a = J(rows[0], cols[0]), b = J(rows[0], cols[1]), c = J(rows[0], cols[2]);
      double d = J(rows[1], cols[0]), e = J(rows[1], cols[1]), f = J(rows[1], cols[2]);
      double g = J(rows[2], cols[0]), h = J(rows[2], cols[1]), i = J(rows[2], cols[2]);
      return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    }
    default: {
      RMat M(k, k);
      for (int r = 0; r < k; ++r)
        for (int cc = 0; cc < k; ++cc) M(r, cc) = J(rows[r], cols[cc]);
      return M.determinant();
    }
  }
}
}  // namespace

AltTensor pushforward(const AltTensor& t, const RMat& J) {
  const int Dout = static_cast<int>(J.rows());
  if (static_cast<int>(J.cols()) != t.dim)
    throw std::invalid_argument("pushforward: shape mismatch");
  AltTensor out(Dout, t.deg);
  if (t.deg == 0) { out.c[0] = t.c[0]; return out; }
  int cols[16], rows[16];
  const int nIn = static_cast<int>(t.c.size());
  const int nOut = static_cast<int>(out.c.size());
  for (int rb = 0; rb < nOut; ++rb) {
    combo_unrank(rb, t.deg, rows);
    double acc = 0;
    for (int ra = 0; ra < nIn; ++ra) {
      if (t.c[ra] == 0.0) continue;
      combo_unrank(ra, t.deg, cols);
      acc += minor_det(J, rows, cols, t.deg) * t.c[ra];
    }
    out.c[rb] = acc;
  }
  return out;
}

AltTensor pushforward_derivative(const AltTensor& t, const RMat& J, const RMat& dJ) {
  const int Dout = static_cast<int>(J.rows());
  AltTensor out(Dout, t.deg);
  if (t.deg == 0) return out;
  int cols[16], rows[16];
  const int nIn = static_cast<int>(t.c.size());
  const int nOut = static_cast<int>(out.c.size());
  // d det(J[rows,cols]) = sum_s det with column s taken from dJ.
  for (int rb = 0; rb < nOut; ++rb) {
    combo_unrank(rb, t.deg, rows);
    double acc = 0;
    for (int ra = 0; ra < nIn; ++ra) {
      if (t.c[ra] == 0.0) continue;
      combo_unrank(ra, t.deg, cols);
      for (int s = 0; s < t.deg; ++s) {
        RMat M(t.deg, t.deg);
        for (int r = 0; r < t.deg; ++r)
          for (int cc = 0; cc < t.deg; ++cc)
            M(r, cc) = (cc == s) ? dJ(rows[r], cols[cc]) : J(rows[r], cols[cc]);
        acc += M.determinant() * t.c[ra];
      }
    }
    out.c[rb] = acc;
  }
  return out;
}

namespace {
// Permutation sign of (A, A^c) as a permutation of (0..D-1): (-1)^{#inversions},
// inversions = pairs (a in A, b in A^c) with a > b.
int complement_sign(const int* A, int k) {
  // Inversions of the concatenation (A, A^c): for each a in A, the
  // complement elements below a number a - (its index within A).
  int inv = 0;
  for (int i = 0; i < k; ++i) inv += A[i] - i;
  return (inv & 1) ? -1 : 1;
}
}  // namespace

AltTensor star_complement(const AltTensor& t) {
  AltTensor out(t.dim, t.dim - t.deg);
  int idx[16], comp[16];
  const int n = static_cast<int>(t.c.size());
  for (int r = 0; r < n; ++r) {
    if (t.c[r] == 0.0) continue;
    combo_unrank(r, t.deg, idx);
    int k = 0, p = 0;
    for (int a = 0; a < t.dim; ++a) {
      if (p < t.deg && idx[p] == a) { ++p; continue; }
      comp[k++] = a;
    }
    int sgn = complement_sign(idx, t.deg);
    out.c[combo_rank(comp, k)] += sgn * t.c[r];
  }
  return out;
}

AltTensor star_complement_inv(const AltTensor& t) {
  // star(star(u)) = (-1)^{k(D-k)} u on degree k; invert accordingly.
  AltTensor out = star_complement(t);
  const int k = out.deg, D = out.dim;
  if ((static_cast<long long>(k) * (D - k)) & 1) out.c = -out.c;
  return out;
}

RMat deg2_matrix(const AltTensor& t) {
  if (t.deg != 2) throw std::invalid_argument("deg2_matrix: degree != 2");
  RMat m = RMat::Zero(t.dim, t.dim);
  int idx[2];
  for (int r = 0; r < t.c.size(); ++r) {
    combo_unrank(r, 2, idx);
    m(idx[0], idx[1]) = t.c[r];
    m(idx[1], idx[0]) = -t.c[r];
  }
  return m;
}

AltTensor deg2_from_matrix(const RMat& m) {
  AltTensor t(static_cast<int>(m.rows()), 2);
  int idx[2];
  for (int r = 0; r < t.c.size(); ++r) {
    combo_unrank(r, 2, idx);
    t.c[r] = 0.5 * (m(idx[0], idx[1]) - m(idx[1], idx[0]));
  }
  return t;
}

double eval_on_covectors(const AltTensor& t, const RMat& W) {
  if (static_cast<int>(W.rows()) != t.deg) throw std::invalid_argument("eval_on_covectors: shape");
  AltTensor cur = t;
  for (int i = 0; i < static_cast<int>(W.rows()); ++i)
    cur = contract_covector(cur, W.row(i).transpose());
  return cur.c[0];
}

}  // namespace qpl
