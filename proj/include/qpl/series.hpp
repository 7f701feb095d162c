#pragma once

#include <vector>

namespace qpl {

// Symmetric partial sum S_N(x) = sum_{|k| <= N} 1/(2 pi (x + k)), bracketed
// as the pairs (k, -k-1) for k = 0..N-1 plus the lone k = N term. At x = 1/2
// each pair is the sum of a value and its exact floating-point negative, so
// S_N(1/2) = 1/(2 pi (N + 1/2)) exactly. Throws std::domain_error at the
// poles (integer x) or N < 0.
double cotangent_partial_sum(double x, long N);

// The limit (1/2) cot(pi x); throws std::domain_error at integer x.
double cotangent_limit(double x);

struct SeriesRow {
  long N = 0;
  double value = 0;
  double error = 0;  // |value - limit|
};

// Rows on a doubling grid 8, 16, ... capped by nmax (nmax itself appended
// when the grid does not land on it).
std::vector<SeriesRow> cotangent_table(double x, long nmax);

// Least-squares slope of log|error| against log N over the rows with
// nonzero error; the symmetric tail decays like 1/N, so the slope sits
// near -1.
double fitted_decay_rate(const std::vector<SeriesRow>& rows);

}  // namespace qpl
