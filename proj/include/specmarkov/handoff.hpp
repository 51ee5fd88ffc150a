#ifndef SPECMARKOV_HANDOFF_HPP
#define SPECMARKOV_HANDOFF_HPP

// The per-SU spectrum handoff chain over (transmitted slots, collided slots,
// frame index), its closed-form and numeric stationary solutions, and the
// metrics read off it.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "specmarkov/chain.hpp"
#include "specmarkov/contention.hpp"

namespace specmarkov {

struct ModelParams {
  int channels = 10;            // M
  int pairs = 2;                // N
  int slots_per_frame = 10;     // c
  int frames_per_packet = 1;    // h
  double pu_arrival = 0.05;     // p
  double su_arrival = 1.0;      // s
  double pu_completion = 0.1;   // v
  int sensing_delay = 10;       // T_s, overlap slots before a collision is noticed
  Scheme scheme = Scheme::random;

  void validate() const;
  bool full_frame_detection() const { return sensing_delay == slots_per_frame; }
};

enum class Status { idle, transmitting, collided, backlogged };

std::string_view to_string(Status status);

struct HandoffState {
  int transmitted = 0;  // successful slots so far in the current frame
  int collided = 0;     // collided slots so far in the current frame
  int frame = 0;        // current frame, 1..h; 0 only for Idle

  Status status() const;
  friend bool operator==(const HandoffState&, const HandoffState&) = default;
};

/// Enumerates the valid states for (c, h, T_s) and maps them to dense
/// indices. Index 0 is Idle; each frame tier then lists its Backlogged state,
/// the c Transmitting states and the Collided runs, whose length is capped at
/// min(T_s, c - transmitted).
class StateIndex {
public:
  StateIndex(int slots_per_frame, int frames_per_packet, int sensing_delay);

  std::size_t size() const { return states_.size(); }
  const HandoffState& state(std::size_t index) const { return states_.at(index); }
  /// Throws ValidationError for a state outside the space.
  std::size_t index(const HandoffState& state) const;
  bool contains(const HandoffState& state) const;
  std::size_t count(Status status) const;

  int slots_per_frame() const { return c_; }
  int frames_per_packet() const { return h_; }
  int sensing_delay() const { return ts_; }
  /// Longest collided run that starts after `transmitted` clean slots.
  int collided_cap(int transmitted) const;

private:
  long key(const HandoffState& s) const;

  int c_;
  int h_;
  int ts_;
  std::vector<HandoffState> states_;
  std::vector<long> lookup_;
};

/// Number of Collided states, sum over frames of sum_i min(T_s, c - i).
std::size_t collided_state_count(int slots_per_frame, int frames_per_packet,
                                 int sensing_delay);

struct HandoffDistribution {
  StateIndex index;
  Eigen::VectorXd probs;

  double at(const HandoffState& state) const {
    return index.contains(state) ? probs(static_cast<Eigen::Index>(index.index(state)))
                                 : 0.0;
  }
  double mass(Status status) const;
};

struct HandoffChain {
  StateIndex index;
  chain::TransitionMatrix transitions;
};

/// Balance-equation solution for the base model (T_s = c, random or
/// pseudorandom selection), every state expressed through the first-tier
/// Backlogged state and then normalized.
HandoffDistribution closed_form_stationary(const ModelParams& params, double q,
                                           double u);

/// One-step transitions for any variant: sensing delay caps the collided run,
/// greedy selection lets the end of a collided run jump straight back to data
/// with probability u.
HandoffChain build_full_chain(const ModelParams& params, double q, double u);

/// Direct solve of build_full_chain.
HandoffDistribution numeric_stationary(const ModelParams& params, double q,
                                       double u);

/// Normalized throughput: mass of all Transmitting states.
double throughput(const HandoffDistribution& dist);

/// SU-PU collision probability: mass of all Collided states.
double collision_probability(const HandoffDistribution& dist);

/// Per-slot probability of staying Backlogged, q u + (1 - u).
double backlog_stay_probability(double q, double u);

/// Mean Backlogged dwell 1 / (1 - p_d). Throws InfiniteDelayError at p_d = 1.
double handoff_delay(double q, double u);

struct DerivedMetrics {
  double theta = 0.0;
  double pr_collision = 0.0;
  double ds = 0.0;   // +inf when p_d = 1
  double pd = 0.0;
};

DerivedMetrics derive_metrics(const HandoffDistribution& dist, double q,
                              double u);

/// Full analytic pipeline: PU availability, SU contention, handoff chain.
struct AnalyticResult {
  double u = 0.0;
  double q = 0.0;
  DerivedMetrics metrics;
  HandoffDistribution distribution;
};

AnalyticResult analyze(const ModelParams& params);

} // namespace specmarkov

#endif // SPECMARKOV_HANDOFF_HPP
