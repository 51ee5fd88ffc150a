#include "specmarkov/handoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specmarkov/errors.hpp"
#include "specmarkov/pu_occupancy.hpp"

namespace specmarkov {

namespace {

void check_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream msg;
    msg << name << " = " << x << " outside [0,1]";
    throw ValidationError(msg.str());
  }
}

// All mass on one state: Idle when no packet ever arrives, otherwise the
// first-tier Backlogged state that a pair can never leave.
HandoffDistribution degenerate_distribution(StateIndex index, double su_arrival) {
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  const HandoffState sink = su_arrival == 0.0 ? HandoffState{0, 0, 0}
                                              : HandoffState{0, 0, 1};
  probs(static_cast<Eigen::Index>(index.index(sink))) = 1.0;
  return {std::move(index), std::move(probs)};
}

} // namespace

void ModelParams::validate() const {
  if (channels < 1) throw ValidationError("M must be >= 1");
  if (pairs < 1) throw ValidationError("N must be >= 1");
  if (slots_per_frame < 1) throw ValidationError("c must be >= 1");
  if (frames_per_packet < 1) throw ValidationError("h must be >= 1");
  check_probability(pu_arrival, "p");
  check_probability(su_arrival, "s");
  if (!(pu_completion > 0.0 && pu_completion <= 1.0)) {
    throw ValidationError("v must lie in (0,1]");
  }
  if (sensing_delay < 1 || sensing_delay > slots_per_frame) {
    throw ValidationError("Ts must lie in [1, c]");
  }
}

std::string_view to_string(Status status) {
  switch (status) {
    case Status::idle: return "idle";
    case Status::transmitting: return "transmitting";
    case Status::collided: return "collided";
    case Status::backlogged: return "backlogged";
  }
  return "unknown";
}

Status HandoffState::status() const {
  if (frame == 0) return Status::idle;
  if (collided > 0) return Status::collided;
  if (transmitted > 0) return Status::transmitting;
  return Status::backlogged;
}

StateIndex::StateIndex(int slots_per_frame, int frames_per_packet,
                       int sensing_delay)
    : c_(slots_per_frame), h_(frames_per_packet), ts_(sensing_delay) {
  if (c_ < 1 || h_ < 1 || ts_ < 1 || ts_ > c_) {
    throw ValidationError("state space needs c >= 1, h >= 1, 1 <= Ts <= c");
  }
  lookup_.assign(static_cast<std::size_t>(h_ + 1) * (c_ + 1) * (c_ + 1), -1);
  auto add = [this](HandoffState s) {
    lookup_[key(s)] = static_cast<long>(states_.size());
    states_.push_back(s);
  };
  add({0, 0, 0});
  for (int k = 1; k <= h_; ++k) {
    add({0, 0, k});
    for (int i = 1; i <= c_; ++i) add({i, 0, k});
    for (int i = 0; i < c_; ++i) {
      for (int j = 1; j <= collided_cap(i); ++j) add({i, j, k});
    }
  }
}

int StateIndex::collided_cap(int transmitted) const {
  return std::min(ts_, c_ - transmitted);
}

long StateIndex::key(const HandoffState& s) const {
  return (static_cast<long>(s.frame) * (c_ + 1) + s.transmitted) * (c_ + 1) +
         s.collided;
}

bool StateIndex::contains(const HandoffState& s) const {
  if (s.transmitted < 0 || s.transmitted > c_ || s.collided < 0 ||
      s.collided > c_ || s.frame < 0 || s.frame > h_) {
    return false;
  }
  return lookup_[key(s)] >= 0;
}

std::size_t StateIndex::index(const HandoffState& s) const {
  if (!contains(s)) {
    std::ostringstream msg;
    msg << "state (" << s.transmitted << ", " << s.collided << ", " << s.frame
        << ") is not in the chain";
    throw ValidationError(msg.str());
  }
  return static_cast<std::size_t>(lookup_[key(s)]);
}

std::size_t StateIndex::count(Status status) const {
  return static_cast<std::size_t>(
      std::count_if(states_.begin(), states_.end(),
                    [status](const HandoffState& s) { return s.status() == status; }));
}

std::size_t collided_state_count(int slots_per_frame, int frames_per_packet,
                                 int sensing_delay) {
  return StateIndex(slots_per_frame, frames_per_packet, sensing_delay)
      .count(Status::collided);
}

double HandoffDistribution::mass(Status status) const {
  double sum = 0.0;
  for (std::size_t n = 0; n < index.size(); ++n) {
    if (index.state(n).status() == status) sum += probs(static_cast<Eigen::Index>(n));
  }
  return sum;
}

HandoffDistribution closed_form_stationary(const ModelParams& params, double q,
                                           double u) {
  params.validate();
  check_probability(q, "q");
  check_probability(u, "u");
  if (!params.full_frame_detection() || params.scheme == Scheme::greedy) {
    throw ValidationError(
        "closed form covers Ts = c with random or pseudorandom selection only");
  }
  const int c = params.slots_per_frame;
  const int h = params.frames_per_packet;
  const double p = params.pu_arrival;
  const double s = params.su_arrival;
  const double access = u * (1.0 - q);

  StateIndex index(c, h, c);
  if (s == 0.0 || access == 0.0) return degenerate_distribution(std::move(index), s);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index.size()));
  auto at = [&](int i, int j, int k) -> double& {
    return x(static_cast<Eigen::Index>(index.index({i, j, k})));
  };

  // Every probability below is relative to P(0,0,1) = 1.
  at(0, 0, 1) = 1.0;
  if (p == 0.0) {
    // No PU: no Collided mass and no Backlogged mass beyond the first tier.
    for (int k = 1; k <= h; ++k) {
      for (int i = 1; i <= c; ++i) at(i, 0, k) = access;
    }
    at(0, 0, 0) = (1.0 - s) * access / s;
  } else {
    const double clean_frame = std::pow(1.0 - p, c);
    for (int i = 1; i <= c; ++i) at(i, 0, 1) = access * std::pow(1.0 - p, i);
    for (int j = 1; j <= c; ++j) at(0, j, 1) = access * p;
    for (int i = 1; i < c; ++i) {
      const double run = access * p * std::pow(1.0 - p, i);
      for (int j = 1; j <= c - i; ++j) at(i, j, 1) = run;
    }

    // End-of-frame mass P(c,0,k) is the same in every tier.
    const double frame_end = access * clean_frame;
    if (frame_end > 0.0) {
      for (int k = 2; k <= h; ++k) {
        const double first_clean = frame_end / std::pow(1.0 - p, c - 1);
        const double first_collided = p * frame_end / clean_frame;
        at(0, 0, k) = (1.0 - clean_frame) * frame_end / (access * clean_frame);
        for (int i = 1; i <= c; ++i) {
          at(i, 0, k) = std::pow(1.0 - p, i - 1) * first_clean;
        }
        for (int j = 1; j <= c; ++j) at(0, j, k) = first_collided;
        for (int i = 1; i < c; ++i) {
          const double run = p * std::pow(1.0 - p, i - 1) * first_clean;
          for (int j = 1; j <= c - i; ++j) at(i, j, k) = run;
        }
      }
    }
    at(0, 0, 0) = (1.0 - s) / s * frame_end;
  }

  x /= x.sum();
  return {std::move(index), std::move(x)};
}

HandoffChain build_full_chain(const ModelParams& params, double q, double u) {
  params.validate();
  check_probability(q, "q");
  check_probability(u, "u");
  const int c = params.slots_per_frame;
  const int h = params.frames_per_packet;
  const double p = params.pu_arrival;
  const double s = params.su_arrival;
  const bool greedy = params.scheme == Scheme::greedy;

  StateIndex index(c, h, params.sensing_delay);
  const auto n = static_cast<Eigen::Index>(index.size());
  chain::TransitionMatrix P = chain::TransitionMatrix::Zero(n, n);
  auto add = [&](const HandoffState& from, const HandoffState& to, double prob) {
    P(static_cast<Eigen::Index>(index.index(from)),
      static_cast<Eigen::Index>(index.index(to))) += prob;
  };

  const HandoffState idle{0, 0, 0};
  add(idle, idle, 1.0 - s);
  add(idle, {0, 0, 1}, s);

  for (int k = 1; k <= h; ++k) {
    const HandoffState backlog{0, 0, k};
    add(backlog, backlog, q * u + (1.0 - u));
    add(backlog, {1, 0, k}, u * (1.0 - p) * (1.0 - q));
    add(backlog, {0, 1, k}, u * p * (1.0 - q));

    for (int i = 1; i < c; ++i) {
      add({i, 0, k}, {i + 1, 0, k}, 1.0 - p);
      add({i, 0, k}, {i, 1, k}, p);
    }
    if (k < h) {
      add({c, 0, k}, {1, 0, k + 1}, 1.0 - p);
      add({c, 0, k}, {0, 1, k + 1}, p);
    } else {
      add({c, 0, k}, idle, 1.0 - s);
      add({c, 0, k}, {0, 0, 1}, s);
    }

    for (int i = 0; i < c; ++i) {
      const int cap = index.collided_cap(i);
      for (int j = 1; j < cap; ++j) add({i, j, k}, {i, j + 1, k}, 1.0);
      const HandoffState last{i, cap, k};
      if (greedy) {
        add(last, backlog, 1.0 - u);
        add(last, {1, 0, k}, u * (1.0 - p));
        add(last, {0, 1, k}, u * p);
      } else {
        add(last, backlog, 1.0);
      }
    }
  }

  for (Eigen::Index r = 0; r < n; ++r) {
    const double sum = P.row(r).sum();
    if (std::abs(sum - 1.0) > chain::kRowSumTolerance) {
      const auto& st = index.state(static_cast<std::size_t>(r));
      std::ostringstream msg;
      msg.precision(17);
      msg << "handoff chain row (" << st.transmitted << ", " << st.collided
          << ", " << st.frame << ") sums to " << sum;
      throw StructuralError(msg.str());
    }
  }
  return {std::move(index), std::move(P)};
}

HandoffDistribution numeric_stationary(const ModelParams& params, double q,
                                       double u) {
  HandoffChain built = build_full_chain(params, q, u);
  Eigen::VectorXd probs = chain::stationary_distribution(built.transitions);
  return {std::move(built.index), std::move(probs)};
}

double throughput(const HandoffDistribution& dist) {
  return dist.mass(Status::transmitting);
}

double collision_probability(const HandoffDistribution& dist) {
  return dist.mass(Status::collided);
}

double backlog_stay_probability(double q, double u) {
  check_probability(q, "q");
  check_probability(u, "u");
  return q * u + (1.0 - u);
}

double handoff_delay(double q, double u) {
  const double pd = backlog_stay_probability(q, u);
  if (pd >= 1.0) {
    throw InfiniteDelayError("backlog stay probability is 1; handoff delay is unbounded");
  }
  return 1.0 / (1.0 - pd);
}

DerivedMetrics derive_metrics(const HandoffDistribution& dist, double q,
                              double u) {
  DerivedMetrics m;
  m.theta = throughput(dist);
  m.pr_collision = collision_probability(dist);
  m.pd = backlog_stay_probability(q, u);
  m.ds = m.pd >= 1.0 ? std::numeric_limits<double>::infinity()
                     : handoff_delay(q, u);
  return m;
}

AnalyticResult analyze(const ModelParams& params) {
  params.validate();
  const Availability avail = availability(
      PuParams{params.channels, params.pu_arrival, params.pu_completion});

  ContentionParams contention;
  contention.pairs = params.pairs;
  contention.channels = params.channels;
  contention.slots_per_frame = params.slots_per_frame;
  contention.frames_per_packet = params.frames_per_packet;
  contention.pu_arrival = params.pu_arrival;
  contention.pr_theta = avail.pr_theta;
  const ContentionResult cr = contention_result(contention, params.scheme);

  const double q = cr.q;
  const double u = avail.u;
  HandoffDistribution dist = [&] {
    if (params.su_arrival == 0.0 || u * (1.0 - q) == 0.0) {
      return degenerate_distribution(
          StateIndex(params.slots_per_frame, params.frames_per_packet,
                     params.sensing_delay),
          params.su_arrival);
    }
    if (params.full_frame_detection() && params.scheme != Scheme::greedy) {
      return closed_form_stationary(params, q, u);
    }
    return numeric_stationary(params, q, u);
  }();

  AnalyticResult out{u, q, derive_metrics(dist, q, u), std::move(dist)};
  return out;
}

} // namespace specmarkov
