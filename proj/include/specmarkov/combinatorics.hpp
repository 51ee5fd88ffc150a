#ifndef SPECMARKOV_COMBINATORICS_HPP
#define SPECMARKOV_COMBINATORICS_HPP

#include <vector>

namespace specmarkov {

/// Exact integer type for the occupancy counts; wide enough for
/// n1, theta <= 32.
using WideInt = __int128;

/// Generalized binomial coefficient: 0 for b < 0, 1 for b = 0, otherwise the
/// falling factorial a(a-1)...(a-b+1) / b!. The top may be negative.
WideInt gen_binomial(long a, long b);

/// Number of occupancy vectors (theta channels, n1 indistinguishable
/// selections) in which a fixed choice of d channels each hold exactly one
/// selection, summed over the C(theta, d) such choices.
WideInt u_count(int n1, int theta, int d);

/// S_d(n1, theta) for every d in [0, n1], computed top-down by the
/// inclusion-exclusion recursion S_d = U_d - U_{d+1} - sum_i [...] S_{d+i}.
std::vector<WideInt> s_counts(int n1, int theta);

/// Number of occupancy vectors with exactly d singleton channels.
WideInt s_count(int n1, int theta, int d);

/// Brute-force enumeration of the same count. Test oracle only: refuses
/// n1 > 8 or theta > 8.
long s_count_oracle(int n1, int theta, int d);

/// T_d(n1, theta): probability that exactly d of n1 backlogged SUs access a
/// channel alone when theta channels are available. With theta = 0 nobody
/// accesses.
double t_access(int n1, int theta, int d);

/// C(n, k) r^k (1 - r)^(n - k), with 0^0 = 1.
double binomial_pmf(int n, int k, double r);

} // namespace specmarkov

#endif // SPECMARKOV_COMBINATORICS_HPP
