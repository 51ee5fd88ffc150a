#include "specmarkov/pu_occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specmarkov/combinatorics.hpp"
#include "specmarkov/errors.hpp"

namespace specmarkov {

void PuParams::validate() const {
  if (channels < 1) throw ValidationError("M must be >= 1");
  if (!(arrival >= 0.0 && arrival <= 1.0)) {
    throw ValidationError("p must lie in [0,1]");
  }
  if (!(completion > 0.0 && completion <= 1.0)) {
    throw ValidationError("v must lie in (0,1]");
  }
}

double off_pmf(double p, long n) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ValidationError("off_pmf: p must lie in (0,1]; OFF period is unbounded at p = 0");
  }
  if (n < 0) throw ValidationError("off_pmf: n must be nonnegative");
  return p * std::pow(1.0 - p, static_cast<double>(n));
}

double busy_probability(double arrival, double completion) {
  const double leave = completion * (1.0 - arrival);
  if (arrival + leave == 0.0) return 0.0;
  return arrival / (arrival + leave);
}

chain::TransitionMatrix build_pu_chain(const PuParams& params) {
  params.validate();
  const int M = params.channels;
  chain::TransitionMatrix P = chain::TransitionMatrix::Zero(M + 1, M + 1);
  for (int a = 0; a <= M; ++a) {
    for (int b = 0; b <= M; ++b) {
      double sum = 0.0;
      for (int l = std::max(0, a - b); l <= a; ++l) {
        sum += binomial_pmf(a, l, params.completion) *
               binomial_pmf(M - a + l, b - a + l, params.arrival);
      }
      P(a, b) = sum;
    }
  }
  return P;
}

Eigen::VectorXd occupancy_distribution(const PuParams& params) {
  return chain::stationary_distribution(build_pu_chain(params));
}

Availability availability(const PuParams& params) {
  const Eigen::VectorXd g = occupancy_distribution(params);
  const int M = params.channels;
  Availability out;
  out.u = g.head(M).sum();
  out.pr_theta = g.reverse();
  return out;
}

} // namespace specmarkov
