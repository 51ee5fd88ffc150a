#include "specmarkov/contention.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "specmarkov/combinatorics.hpp"
#include "specmarkov/errors.hpp"

namespace specmarkov {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::random: return "random";
    case Scheme::greedy: return "greedy";
    case Scheme::pseudorandom: return "pseudorandom";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "random") return Scheme::random;
  if (name == "greedy") return Scheme::greedy;
  if (name == "pseudorandom") return Scheme::pseudorandom;
  throw ValidationError("scheme must be one of random, greedy, pseudorandom; got '" +
                        std::string(name) + "'");
}

void ContentionParams::validate() const {
  if (pairs < 1) throw ValidationError("N must be >= 1");
  if (channels < 1) throw ValidationError("M must be >= 1");
  if (slots_per_frame < 1) throw ValidationError("c must be >= 1");
  if (frames_per_packet < 1) throw ValidationError("h must be >= 1");
  if (!(pu_arrival >= 0.0 && pu_arrival <= 1.0)) {
    throw ValidationError("p must lie in [0,1]");
  }
  if (pr_theta.size() != channels + 1) {
    throw ValidationError("pr_theta must have M + 1 entries");
  }
  if (pr_theta.minCoeff() < 0.0 ||
      std::abs(pr_theta.sum() - 1.0) > chain::kRowSumTolerance) {
    throw ValidationError("pr_theta must be a probability vector");
  }
}

namespace {

// access[n1][theta][d]: probability that exactly d of n1 selectors get a
// channel to themselves.
using AccessTable = std::vector<std::vector<std::vector<double>>>;

AccessTable access_table(int pairs, int channels, Scheme scheme) {
  AccessTable table(pairs + 1, std::vector<std::vector<double>>(channels + 1));
  for (int n1 = 0; n1 <= pairs; ++n1) {
    for (int theta = 0; theta <= channels; ++theta) {
      auto& row = table[n1][theta];
      row.assign(n1 + 1, 0.0);
      switch (scheme) {
        case Scheme::random:
          for (int d = 0; d <= n1; ++d) row[d] = t_access(n1, theta, d);
          break;
        case Scheme::pseudorandom:
          row[std::min(n1, theta)] = 1.0;
          break;
        case Scheme::greedy:
          row[(n1 == 1 && theta >= 1) ? 1 : 0] = 1.0;
          break;
      }
    }
  }
  return table;
}

} // namespace

chain::TransitionMatrix system_chain(const ContentionParams& params,
                                     Scheme scheme) {
  params.validate();
  const int N = params.pairs;
  const int M = params.channels;
  const double sigma = params.packet_end_rate();
  const double pf = params.frame_end_rate();
  const double p = params.pu_arrival;
  const AccessTable access = access_table(N, M, scheme);

  const int n_states = system_state_count(N);
  chain::TransitionMatrix H = chain::TransitionMatrix::Zero(n_states, n_states);

  for (int n1 = 0; n1 <= N; ++n1) {
    for (int n3 = 0; n1 + n3 <= N; ++n3) {
      const int n2 = N - n1 - n3;
      const int from = system_state_index(N, n1, n3);
      for (int theta = 0; theta <= M; ++theta) {
        const double pr = params.pr_theta(theta);
        if (pr == 0.0) continue;
        for (int e = 0; e <= n3; ++e) {
          const double z = binomial_pmf(n3, e, pf);
          for (int w = 0; w <= n2; ++w) {
            const double x = binomial_pmf(n2, w, sigma);
            for (int d = 0; d <= n1; ++d) {
              const double t = access[n1][theta][d];
              if (t == 0.0) continue;
              for (int r = 0; r <= n2 - w; ++r) {
                const double y = binomial_pmf(n2 - w, r, p);
                const int to =
                    system_state_index(N, n1 - d + w + e, n3 - e + r);
                H(from, to) += t * y * x * z * pr;
              }
            }
          }
        }
      }
    }
  }

  for (int m = 0; m < n_states; ++m) {
    const double sum = H.row(m).sum();
    if (std::abs(sum - 1.0) > chain::kRowSumTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "system chain row " << m << " sums to " << sum;
      throw StructuralError(msg.str());
    }
  }
  return H;
}

double selection_collision_weight(int backlogged, int theta) {
  if (backlogged <= 1) return 0.0;
  return static_cast<double>(backlogged - 1) / (theta + backlogged - 2);
}

ContentionResult contention_result(const ContentionParams& params,
                                   Scheme scheme) {
  const int N = params.pairs;
  ContentionResult out;
  out.pi = chain::stationary_distribution(system_chain(params, scheme));
  out.rho = Eigen::VectorXd::Zero(N + 1);
  for (int k = 0; k <= N; ++k) {
    const int first = system_state_index(N, k, 0);
    out.rho(k) = out.pi.segment(first, N - k + 1).sum();
  }

  switch (scheme) {
    case Scheme::random: {
      double q = 0.0;
      for (int theta = 1; theta <= params.channels; ++theta) {
        for (int k = 1; k <= N; ++k) {
          q += selection_collision_weight(k, theta) * out.rho(k) *
               params.pr_theta(theta);
        }
      }
      out.q = std::clamp(q, 0.0, 1.0);
      break;
    }
    case Scheme::greedy:
      out.q = N == 1 ? 0.0 : 1.0;
      break;
    case Scheme::pseudorandom:
      out.q = 0.0;
      break;
  }
  return out;
}

} // namespace specmarkov
