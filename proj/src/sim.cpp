#include "specmarkov/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "specmarkov/errors.hpp"
#include "specmarkov/pu_occupancy.hpp"

namespace specmarkov::sim {

Rng::Rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  engine_.seed(seq);
}

PuChannels::PuChannels(int channels, double arrival, double completion,
                       std::uint64_t seed)
    : arrival_(arrival), completion_(completion), busy_(channels, 0) {
  rngs_.reserve(channels);
  const double start_busy = busy_probability(arrival, completion);
  for (int m = 0; m < channels; ++m) {
    rngs_.emplace_back(seed, static_cast<std::uint32_t>(m));
    busy_[m] = rngs_[m].bernoulli(start_busy) ? 1 : 0;
  }
}

void PuChannels::step() {
  for (std::size_t m = 0; m < busy_.size(); ++m) {
    Rng& rng = rngs_[m];
    if (busy_[m] && rng.bernoulli(completion_)) busy_[m] = 0;
    if (!busy_[m] && rng.bernoulli(arrival_)) busy_[m] = 1;
  }
}

int PuChannels::busy_count() const {
  return static_cast<int>(std::count(busy_.begin(), busy_.end(), 1));
}

void SimConfig::validate() const {
  params.validate();
  if (slots < 1) throw ValidationError("slots must be >= 1");
  if (warmup < 0 || warmup >= slots) {
    throw ValidationError("warmup must lie in [0, slots)");
  }
}

void StatusCounts::add(Status status) {
  switch (status) {
    case Status::idle: ++idle; break;
    case Status::transmitting: ++transmitting; break;
    case Status::collided: ++collided; break;
    case Status::backlogged: ++backlogged; break;
  }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Pair {
  Status status = Status::idle;
  int transmitted = 0;
  int collided = 0;
  int frame = 0;
  int channel = -1;       // data channel while Transmitting/Collided
  int granted = -1;       // channel won in the current slot, used next slot
  long backlog_since = 0;
  long run_length = 0;    // slots in the current Backlogged run
  long pending_slots = 0; // Transmitting slots of the frame in progress
};

class Simulation {
public:
  Simulation(const SimConfig& config, std::ostream* trace)
      : cfg_(config),
        mp_(config.params),
        s_(config.saturated ? 1.0 : config.params.su_arrival),
        trace_(trace),
        pu_(mp_.channels, mp_.pu_arrival, mp_.pu_completion, config.seed),
        arrivals_(config.seed,
                  static_cast<std::uint32_t>(mp_.channels + mp_.pairs)),
        pairs_(mp_.pairs),
        held_(mp_.channels, 0) {
    for (int n = 0; n < mp_.pairs; ++n) {
      picks_.emplace_back(config.seed,
                          static_cast<std::uint32_t>(mp_.channels + n));
    }
    result_.seed = config.seed;
    result_.per_pair.assign(mp_.pairs, {});
    result_.channel_busy_slots.assign(mp_.channels, 0);
    result_.busy_count_histogram.assign(mp_.channels + 1, 0);
  }

  SimResult run() {
    for (long t = 0; t < cfg_.slots; ++t) {
      if (t > 0) pu_.step();
      const bool counting = t >= cfg_.warmup;
      for (auto& pair : pairs_) advance(pair, t, counting);
      if (counting) record();
      if (trace_) write_trace(t);
      select(t, counting);
    }
    finish();
    return std::move(result_);
  }

private:
  int cap(int transmitted) const {
    return std::min(mp_.sensing_delay, mp_.slots_per_frame - transmitted);
  }

  void enter_backlog(Pair& x, int frame, long t) {
    x.status = Status::backlogged;
    x.transmitted = x.collided = 0;
    x.frame = frame;
    x.channel = -1;
    x.pending_slots = 0;
    x.backlog_since = t;
    x.run_length = 0;
  }

  // First data slot of a frame on `channel`.
  void start_frame(Pair& x, int channel) {
    x.channel = channel;
    x.transmitted = x.collided = 0;
    x.pending_slots = 0;
    if (pu_.busy(channel)) {
      x.status = Status::collided;
      x.collided = 1;
    } else {
      x.status = Status::transmitting;
      x.transmitted = 1;
    }
  }

  void leave_backlog(Pair& x, long t) {
    if (t - 1 >= cfg_.warmup) {
      ++result_.backlog_runs;
      result_.backlog_run_slots += x.run_length;
    }
  }

  void advance(Pair& x, long t, bool counting) {
    switch (x.status) {
      case Status::idle:
        if (arrivals_.bernoulli(s_)) enter_backlog(x, 1, t);
        break;
      case Status::backlogged:
        if (x.granted >= 0) {
          leave_backlog(x, t);
          start_frame(x, x.granted);
          x.granted = -1;
        }
        break;
      case Status::transmitting:
        if (x.transmitted < mp_.slots_per_frame) {
          if (pu_.busy(x.channel)) {
            x.status = Status::collided;
            x.collided = 1;
            x.pending_slots = 0;
          } else {
            ++x.transmitted;
          }
          break;
        }
        // A clean frame just ended.
        if (counting) {
          ++result_.delivered_frames;
          result_.delivered_slots += x.pending_slots;
        }
        if (x.frame < mp_.frames_per_packet) {
          ++x.frame;
          start_frame(x, x.channel);
        } else if (arrivals_.bernoulli(s_)) {
          enter_backlog(x, 1, t);
        } else {
          x = Pair{};
        }
        break;
      case Status::collided:
        if (x.collided < cap(x.transmitted)) {
          ++x.collided;
        } else if (x.granted >= 0) {
          // Greedy: straight back to data without a Backlogged slot.
          const int frame = x.frame;
          start_frame(x, x.granted);
          x.frame = frame;
          x.granted = -1;
        } else {
          enter_backlog(x, x.frame, t);
        }
        break;
    }
    if (x.status == Status::transmitting) ++x.pending_slots;
    if (x.status == Status::backlogged) ++x.run_length;
  }

  void record() {
    ++result_.counted_slots;
    for (int n = 0; n < mp_.pairs; ++n) {
      result_.per_pair[n].add(pairs_[n].status);
      result_.aggregate.add(pairs_[n].status);
    }
    for (int m = 0; m < mp_.channels; ++m) {
      if (pu_.busy(m)) ++result_.channel_busy_slots[m];
    }
    ++result_.busy_count_histogram[pu_.busy_count()];
  }

  void write_trace(long t) {
    for (int n = 0; n < mp_.pairs; ++n) {
      const Pair& x = pairs_[n];
      const bool on_data = x.status == Status::transmitting ||
                           x.status == Status::collided;
      const long channel = on_data ? x.channel : t % mp_.channels;
      *trace_ << t << ',' << n << ',' << to_string(x.status) << ','
              << channel << '\n';
    }
  }

  // Whether the pair still occupies its data channel in the next slot.
  bool holds_next_slot(const Pair& x) const {
    if (x.status == Status::transmitting) {
      return !(x.transmitted == mp_.slots_per_frame &&
               x.frame == mp_.frames_per_packet);
    }
    if (x.status == Status::collided) return x.collided < cap(x.transmitted);
    return false;
  }

  void select(long t, bool counting) {
    std::fill(held_.begin(), held_.end(), 0);
    if (cfg_.exclude_su_occupied) {
      for (const auto& x : pairs_) {
        if (holds_next_slot(x)) held_[x.channel] = 1;
      }
    }
    available_.clear();
    for (int m = 0; m < mp_.channels; ++m) {
      if (!pu_.busy(m) && !held_[m]) available_.push_back(m);
    }

    if (mp_.scheme == Scheme::greedy) {
      for (auto& x : pairs_) {
        if (x.status != Status::collided || x.collided < cap(x.transmitted)) continue;
        if (available_.empty()) break;
        x.granted = available_.front();
        if (cfg_.exclude_su_occupied) available_.erase(available_.begin());
      }
    }

    selectors_.clear();
    for (int n = 0; n < mp_.pairs; ++n) {
      if (pairs_[n].status == Status::backlogged) selectors_.push_back(n);
    }
    if (selectors_.empty()) return;
    std::stable_sort(selectors_.begin(), selectors_.end(), [this](int a, int b) {
      return pairs_[a].backlog_since < pairs_[b].backlog_since;
    });

    choice_.assign(mp_.pairs, -1);
    count_.assign(mp_.channels, 0);
    for (std::size_t r = 0; r < selectors_.size(); ++r) {
      const int n = selectors_[r];
      const auto pick = select_channel(mp_.scheme, available_, picks_[n], t,
                                       static_cast<int>(r));
      if (pick) {
        choice_[n] = *pick;
        ++count_[*pick];
      }
    }

    long attempts = 0;
    long collisions = 0;
    for (const int n : selectors_) {
      if (choice_[n] < 0) continue;
      ++attempts;
      if (count_[choice_[n]] == 1) {
        pairs_[n].granted = choice_[n];
      } else {
        ++collisions;
      }
    }
    if (counting) {
      result_.selections += attempts;
      result_.selection_collisions += collisions;
      result_.selection_collision_fraction_sum +=
          static_cast<double>(collisions) / static_cast<double>(selectors_.size());
    }
  }

  void finish() {
    const double pair_slots =
        static_cast<double>(result_.counted_slots) * mp_.pairs;
    result_.theta = result_.aggregate.transmitting / pair_slots;
    result_.pr_collision = result_.aggregate.collided / pair_slots;
    result_.ds = result_.backlog_runs > 0
                     ? static_cast<double>(result_.backlog_run_slots) /
                           static_cast<double>(result_.backlog_runs)
                     : std::numeric_limits<double>::quiet_NaN();
    result_.q_hat = result_.selection_collision_fraction_sum /
                    static_cast<double>(result_.counted_slots);
  }

  const SimConfig& cfg_;
  const ModelParams& mp_;
  double s_;
  std::ostream* trace_;
  PuChannels pu_;
  Rng arrivals_;
  std::vector<Rng> picks_;
  std::vector<Pair> pairs_;
  std::vector<char> held_;
  std::vector<int> available_;
  std::vector<int> selectors_;
  std::vector<int> choice_;
  std::vector<int> count_;
  SimResult result_;
};

} // namespace

std::optional<int> select_channel(Scheme scheme, std::span<const int> available,
                                  Rng& rng, std::int64_t slot, int rank) {
  if (available.empty()) return std::nullopt;
  switch (scheme) {
    case Scheme::random:
      return available[rng.below(available.size())];
    case Scheme::greedy:
      return *std::min_element(available.begin(), available.end());
    case Scheme::pseudorandom: {
      if (rank < 0 || static_cast<std::size_t>(rank) >= available.size()) {
        return std::nullopt;
      }
      std::vector<int> order(available.begin(), available.end());
      std::uint64_t state = static_cast<std::uint64_t>(slot);
      for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(
            (static_cast<unsigned __int128>(splitmix64(state)) * i) >> 64);
        std::swap(order[i - 1], order[j]);
      }
      return order[rank];
    }
  }
  return std::nullopt;
}

SimResult run(const SimConfig& config) {
  config.validate();
  return Simulation(config, nullptr).run();
}

SimResult run(const SimConfig& config, std::ostream& trace) {
  config.validate();
  trace << "slot,su,status,channel\n";
  return Simulation(config, &trace).run();
}

std::vector<SimResult> run_many(std::span<const SimConfig> configs) {
  std::vector<std::future<SimResult>> jobs;
  jobs.reserve(configs.size());
  for (const auto& cfg : configs) {
    jobs.push_back(std::async(std::launch::async,
                              [&cfg] { return run(cfg); }));
  }
  std::vector<SimResult> out;
  out.reserve(jobs.size());
  for (auto& job : jobs) out.push_back(job.get());
  return out;
}

} // namespace specmarkov::sim
