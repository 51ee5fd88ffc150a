#ifndef SPECMARKOV_SIM_HPP
#define SPECMARKOV_SIM_HPP

// Slot-level Monte Carlo simulator of N SU pairs sharing M ON/OFF PU
// channels through a common hopping sequence.

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "specmarkov/handoff.hpp"

namespace specmarkov::sim {

/// Portable random stream. Bits come from std::mt19937_64, whose output
/// sequence is fixed by the standard; conversions to doubles and bounded
/// integers are done here so results do not depend on the standard library.
///
/// Stream splitting: stream `id` of a run with seed `seed` is seeded with
/// std::seed_seq{seed_lo32, seed_hi32, id}. A run uses ids 0..M-1 for the PU
/// channels, M..M+N-1 for the SU pairs' channel picks and M+N for packet
/// arrivals.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint32_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double prob) { return uniform() < prob; }
  /// Uniform on [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

private:
  std::mt19937_64 engine_;
};

/// M independent two-state PU processes. Each slot boundary a busy channel
/// first finishes with probability v, then any idle channel (including one
/// that just finished) starts a packet with probability p.
class PuChannels {
public:
  PuChannels(int channels, double arrival, double completion,
             std::uint64_t seed);

  void step();
  bool busy(int channel) const { return busy_[channel] != 0; }
  int busy_count() const;
  int channels() const { return static_cast<int>(busy_.size()); }

private:
  double arrival_;
  double completion_;
  std::vector<Rng> rngs_;
  std::vector<char> busy_;
};

struct SimConfig {
  ModelParams params;
  long slots = 1'000'000;
  long warmup = 100'000;
  std::uint64_t seed = 1;
  /// Channels held by other pairs are not offered for selection.
  bool exclude_su_occupied = true;
  /// Packets are always waiting: s is treated as 1.
  bool saturated = false;

  void validate() const;
};

struct StatusCounts {
  long idle = 0;
  long transmitting = 0;
  long collided = 0;
  long backlogged = 0;

  long total() const { return idle + transmitting + collided + backlogged; }
  void add(Status status);
  friend bool operator==(const StatusCounts&, const StatusCounts&) = default;
};

struct SimResult {
  std::uint64_t seed = 0;
  long counted_slots = 0;
  std::vector<StatusCounts> per_pair;
  StatusCounts aggregate;

  /// Frames that completed all c slots without a PU collision, and the
  /// Transmitting slots credited to them when they completed.
  long delivered_frames = 0;
  long delivered_slots = 0;

  /// Maximal Backlogged runs that ended inside the counting window.
  long backlog_runs = 0;
  long backlog_run_slots = 0;

  /// Channel-selection attempts by backlogged pairs and how many of them
  /// shared their channel with another selector.
  long selections = 0;
  long selection_collisions = 0;
  /// Sum over counted slots of (collided selectors / backlogged pairs).
  double selection_collision_fraction_sum = 0.0;

  /// Busy slots per PU channel and the histogram of busy-channel counts.
  std::vector<long> channel_busy_slots;
  std::vector<long> busy_count_histogram;

  /// Transmitting slots per pair-slot (the chain's Transmitting mass).
  double theta = 0.0;
  /// Collided slots per pair-slot.
  double pr_collision = 0.0;
  /// Mean Backlogged run length; NaN when no run ended.
  double ds = 0.0;
  /// Mean per-slot fraction of backlogged pairs whose pick collided.
  double q_hat = 0.0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Picks a data channel. `available` is the list every selector in this slot
/// sees; `rank` is this pair's position among the slot's selectors (oldest
/// backlog first). Random: uniform pick. Greedy: lowest index. Pseudorandom:
/// the available list shuffled by a permutation seeded from the slot index,
/// entry `rank`, or none when the list is exhausted.
std::optional<int> select_channel(Scheme scheme, std::span<const int> available,
                                  Rng& rng, std::int64_t slot, int rank);

SimResult run(const SimConfig& config);
/// Same run, additionally writing one CSV line per pair and slot:
/// slot,su,status,channel.
SimResult run(const SimConfig& config, std::ostream& trace);

/// Independent runs executed concurrently; results keep input order.
std::vector<SimResult> run_many(std::span<const SimConfig> configs);

} // namespace specmarkov::sim

#endif // SPECMARKOV_SIM_HPP
