#include "qpl/series.hpp"

#include <cmath>
#include <stdexcept>

namespace qpl {

namespace {

void require_off_poles(double x) {
  if (!std::isfinite(x) || std::abs(x - std::round(x)) < 1e-12)
    throw std::domain_error("cotangent series: x must stay away from the integer poles");
}

}  // namespace

double cotangent_partial_sum(double x, long N) {
  require_off_poles(x);
  if (N < 0) throw std::domain_error("cotangent series: negative window");
  const double c = 2.0 * M_PI;
  double s = 0;
  for (long j = 0; j < N; ++j) s += 1.0 / (c * (x + j)) + 1.0 / (c * (x - j - 1));
  return s + 1.0 / (c * (x + N));
}

double cotangent_limit(double x) {
  require_off_poles(x);
  return 0.5 / std::tan(M_PI * x);
}

std::vector<SeriesRow> cotangent_table(double x, long nmax) {
  const double limit = cotangent_limit(x);
  std::vector<SeriesRow> rows;
  long N = 8;
  while (N <= nmax) {
    const double v = cotangent_partial_sum(x, N);
    rows.push_back(SeriesRow{N, v, std::abs(v - limit)});
    if (N > nmax / 2) break;
    N *= 2;
  }
  if (rows.empty() || rows.back().N != nmax) {
    const double v = cotangent_partial_sum(x, nmax);
    rows.push_back(SeriesRow{nmax, v, std::abs(v - limit)});
  }
  return rows;
}

double fitted_decay_rate(const std::vector<SeriesRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.error <= 0 || r.N <= 0) continue;
    const double lx = std::log(static_cast<double>(r.N));
    const double ly = std::log(r.error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::domain_error("fitted_decay_rate: not enough usable rows");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace qpl
