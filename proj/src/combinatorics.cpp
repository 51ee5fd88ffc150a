#include "specmarkov/combinatorics.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "specmarkov/errors.hpp"

namespace specmarkov {

WideInt gen_binomial(long a, long b) {
  if (b < 0) return 0;
  WideInt result = 1;
  // Multiply-then-divide keeps every intermediate an exact binomial:
  // after step i, result = C(a, i) for the generalized coefficient.
  for (long i = 0; i < b; ++i) {
    result = result * (a - i) / (i + 1);
    if (result == 0) break;
  }
  return result;
}

WideInt u_count(int n1, int theta, int d) {
  return gen_binomial(theta, d) *
         gen_binomial(static_cast<long>(theta) + n1 - 2L * d - 1, n1 - d);
}

std::vector<WideInt> s_counts(int n1, int theta) {
  if (n1 < 0 || theta < 0) {
    throw ValidationError("s_counts: n1 and theta must be nonnegative");
  }
  std::vector<WideInt> s(static_cast<std::size_t>(n1) + 1, 0);
  for (int d = n1; d >= 0; --d) {
    WideInt value = u_count(n1, theta, d);
    if (d + 1 <= n1) value -= u_count(n1, theta, d + 1);
    for (int i = 1; i <= n1 - d; ++i) {
      value -= (gen_binomial(d + i, d) - gen_binomial(d + i, d + 1)) * s[d + i];
    }
    s[d] = value;
  }
  return s;
}

WideInt s_count(int n1, int theta, int d) {
  if (d < 0 || d > n1) return 0;
  return s_counts(n1, theta)[d];
}

long s_count_oracle(int n1, int theta, int d) {
  if (n1 < 0 || theta < 0 || n1 > 8 || theta > 8) {
    throw ValidationError("s_count_oracle: enumeration bounded to n1, theta <= 8");
  }
  if (theta == 0) return (n1 == 0 && d == 0) ? 1 : 0;
  long matches = 0;
  // Walk every vector of theta nonnegative entries summing to n1.
  std::function<void(int, int, int)> fill = [&](int channel, int left,
                                                int singles) {
    if (channel == theta - 1) {
      if (singles + (left == 1 ? 1 : 0) == d) ++matches;
      return;
    }
    for (int take = 0; take <= left; ++take) {
      fill(channel + 1, left - take, singles + (take == 1 ? 1 : 0));
    }
  };
  fill(0, n1, 0);
  return matches;
}

double t_access(int n1, int theta, int d) {
  if (n1 < 0 || theta < 0) {
    throw ValidationError("t_access: n1 and theta must be nonnegative");
  }
  if (d < 0 || d > n1) return 0.0;
  if (theta == 0 || n1 == 0) return d == 0 ? 1.0 : 0.0;
  const WideInt total = gen_binomial(static_cast<long>(theta) + n1 - 1, n1);
  return static_cast<double>(s_count(n1, theta, d)) /
         static_cast<double>(total);
}

double binomial_pmf(int n, int k, double r) {
  if (k < 0 || k > n) return 0.0;
  return static_cast<double>(gen_binomial(n, k)) * std::pow(r, k) *
         std::pow(1.0 - r, n - k);
}

} // namespace specmarkov
