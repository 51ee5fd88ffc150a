#ifndef SPECMARKOV_PU_OCCUPANCY_HPP
#define SPECMARKOV_PU_OCCUPANCY_HPP

#include <Eigen/Dense>

#include "specmarkov/chain.hpp"

namespace specmarkov {

/// Homogeneous PU traffic: every channel runs the same ON/OFF process.
struct PuParams {
  int channels = 10;           // M
  double arrival = 0.05;       // p, OFF -> ON per slot
  double completion = 0.1;     // v = 1 / mean PU packet length in slots

  void validate() const;
};

/// Geometric OFF-period pmf p (1 - p)^n.
double off_pmf(double p, long n);

/// Probability that one channel is busy in steady state. Finish-then-arrive
/// ordering gives ON -> OFF with v (1 - p).
double busy_probability(double arrival, double completion);

/// (M+1)x(M+1) chain over the number of busy channels. Entry (a, b) sums over
/// the l of a busy channels that finish and lets the M - a + l idle ones
/// start b - a + l new transmissions.
chain::TransitionMatrix build_pu_chain(const PuParams& params);

/// g: stationary probability of i busy channels, i = 0..M.
Eigen::VectorXd occupancy_distribution(const PuParams& params);

struct Availability {
  double u = 0.0;               // at least one channel idle
  Eigen::VectorXd pr_theta;     // pr_theta[t] = Pr(t idle channels) = g[M - t]
};

Availability availability(const PuParams& params);

} // namespace specmarkov

#endif // SPECMARKOV_PU_OCCUPANCY_HPP
