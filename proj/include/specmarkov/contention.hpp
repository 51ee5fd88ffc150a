#ifndef SPECMARKOV_CONTENTION_HPP
#define SPECMARKOV_CONTENTION_HPP

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "specmarkov/chain.hpp"

namespace specmarkov {

/// How a backlogged pair picks a data channel among the available ones.
enum class Scheme { random, greedy, pseudorandom };

std::string_view to_string(Scheme scheme);
/// Throws ValidationError on an unknown name.
Scheme parse_scheme(std::string_view name);

struct ContentionParams {
  int pairs = 2;               // N
  int channels = 10;           // M
  int slots_per_frame = 10;    // c
  int frames_per_packet = 1;   // h
  double pu_arrival = 0.05;    // p
  Eigen::VectorXd pr_theta;    // Pr(theta idle channels), length M + 1

  /// sigma = 1 / (c h): fixed-length packets finish at this per-slot rate.
  double packet_end_rate() const {
    return 1.0 / (static_cast<double>(slots_per_frame) * frames_per_packet);
  }
  /// p_f = 1 / c.
  double frame_end_rate() const { return 1.0 / slots_per_frame; }

  void validate() const;
};

/// Flattened index of system state (n1 backlogged, n3 collided).
inline int system_state_index(int pairs, int backlogged, int collided) {
  return (2 * pairs - backlogged + 3) * backlogged / 2 + collided;
}

inline int system_state_count(int pairs) {
  return (pairs + 1) * (pairs + 2) / 2;
}

/// Saturated (backlogged, collided) population chain, flattened. The access
/// kernel is the random-selection one unless `scheme` says otherwise:
/// pseudorandom gives every backlogged pair its own channel while channels
/// last, greedy lets a lone selector through and blocks two or more.
chain::TransitionMatrix system_chain(const ContentionParams& params,
                                     Scheme scheme = Scheme::random);

struct ContentionResult {
  chain::StationaryDistribution pi;  // over flattened states
  Eigen::VectorXd rho;               // rho[k] = Pr(k pairs backlogged)
  double q = 0.0;                    // SU-SU selection collision probability
};

ContentionResult contention_result(const ContentionParams& params,
                                   Scheme scheme);

/// Weight (k - 1) / (theta + k - 2) of the random-selection collision
/// probability; zero when k = 1.
double selection_collision_weight(int backlogged, int theta);

} // namespace specmarkov

#endif // SPECMARKOV_CONTENTION_HPP
