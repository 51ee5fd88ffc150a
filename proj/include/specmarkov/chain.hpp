#ifndef SPECMARKOV_CHAIN_HPP
#define SPECMARKOV_CHAIN_HPP

// Finite discrete-time Markov chains: stochasticity checks, closed-class
// detection and the stationary distribution. Everything here is templated on
// the scalar type and accepts any dense Eigen expression.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specmarkov/errors.hpp"

namespace specmarkov::chain {

/// Every row of a transition matrix must sum to one within this bound.
inline constexpr double kRowSumTolerance = 1e-12;
/// Bound on ||pi P - pi||_inf for a solved stationary distribution.
inline constexpr double kBalanceTolerance = 1e-9;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using TransitionMatrix = Matrix<double>;
using StationaryDistribution = Vector<double>;

template <typename Derived>
void validate_stochastic(const Eigen::MatrixBase<Derived>& P,
                         double tolerance = kRowSumTolerance) {
  using std::abs;
  if (P.rows() != P.cols() || P.rows() == 0) {
    throw ValidationError("transition matrix must be square and non-empty");
  }
  for (Eigen::Index r = 0; r < P.rows(); ++r) {
    for (Eigen::Index c = 0; c < P.cols(); ++c) {
      const auto x = P(r, c);
      if (!(x >= -tolerance && x <= 1 + tolerance)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "transition entry (" << r << ", " << c << ") = " << x
            << " outside [0,1]";
        throw ValidationError(msg.str());
      }
    }
    const auto sum = P.row(r).sum();
    if (abs(sum - 1) > tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << r << " sums to " << sum << ", not 1";
      throw ValidationError(msg.str());
    }
  }
}

/// Strongly connected components of the transition graph that have no
/// outgoing edge. Each class is returned sorted; classes are ordered by their
/// smallest state.
template <typename Derived>
std::vector<std::vector<Eigen::Index>> closed_classes(
    const Eigen::MatrixBase<Derived>& P) {
  const Eigen::Index n = P.rows();
  std::vector<Eigen::Index> index(n, -1), low(n, 0), component(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<Eigen::Index> stack;
  std::vector<std::vector<Eigen::Index>> components;
  Eigen::Index counter = 0;

  std::function<void(Eigen::Index)> visit = [&](Eigen::Index v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (Eigen::Index w = 0; w < n; ++w) {
      if (!(P(v, w) > 0)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<Eigen::Index> members;
      Eigen::Index w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        component[w] = static_cast<Eigen::Index>(components.size());
        members.push_back(w);
      } while (w != v);
      components.push_back(std::move(members));
    }
  };
  for (Eigen::Index v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }

  std::vector<std::vector<Eigen::Index>> closed;
  for (std::size_t c = 0; c < components.size(); ++c) {
    bool leaks = false;
    for (auto v : components[c]) {
      for (Eigen::Index w = 0; w < n && !leaks; ++w) {
        leaks = P(v, w) > 0 && component[w] != static_cast<Eigen::Index>(c);
      }
      if (leaks) break;
    }
    if (!leaks) {
      auto members = components[c];
      std::sort(members.begin(), members.end());
      closed.push_back(std::move(members));
    }
  }
  std::sort(closed.begin(), closed.end());
  return closed;
}

namespace detail {

inline std::string describe_classes(
    const std::vector<std::vector<Eigen::Index>>& classes) {
  std::ostringstream msg;
  msg << "chain has " << classes.size()
      << " closed classes, stationary distribution is not unique:";
  for (const auto& members : classes) {
    msg << " {";
    const std::size_t shown = std::min<std::size_t>(members.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
      msg << (i ? ", " : "") << members[i];
    }
    if (shown < members.size()) msg << ", ...";
    msg << "}";
  }
  return msg.str();
}

} // namespace detail

/// Solves pi P = pi, sum(pi) = 1 by a dense LU solve of (P^T - I) with the
/// last equation replaced by the normalization. Requires exactly one closed
/// class; periodic chains are fine.
template <typename Derived>
Vector<typename Derived::Scalar> stationary_distribution(
    const Eigen::MatrixBase<Derived>& P) {
  using Scalar = typename Derived::Scalar;
  validate_stochastic(P);
  const auto classes = closed_classes(P);
  if (classes.size() != 1) {
    throw StructuralError(detail::describe_classes(classes));
  }

  const Eigen::Index n = P.rows();
  Matrix<Scalar> A = P.transpose() - Matrix<Scalar>::Identity(n, n);
  A.row(n - 1).setOnes();
  Vector<Scalar> rhs = Vector<Scalar>::Zero(n);
  rhs(n - 1) = Scalar(1);

  const Eigen::FullPivLU<Matrix<Scalar>> lu(A);
  if (!lu.isInvertible()) {
    throw StructuralError("stationary system is singular");
  }
  Vector<Scalar> pi = lu.solve(rhs);
  // Round-off can leave transient states at -1e-17 or so.
  pi = pi.cwiseMax(Scalar(0));
  pi /= pi.sum();
  return pi;
}

/// Power iteration on the lazy chain (P + I) / 2, which has the same
/// stationary distribution and is aperiodic. Kept as an independent
/// cross-check of the direct solve.
template <typename Derived>
Vector<typename Derived::Scalar> stationary_distribution_power(
    const Eigen::MatrixBase<Derived>& P, double tolerance = 1e-15,
    long max_iterations = 5'000'000) {
  using Scalar = typename Derived::Scalar;
  validate_stochastic(P);
  const Eigen::Index n = P.rows();
  const Matrix<Scalar> lazy =
      (P + Matrix<Scalar>::Identity(n, n)) * Scalar(0.5);
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> x =
      Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Constant(n, Scalar(1) / n);
  for (long it = 0; it < max_iterations; ++it) {
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> next = x * lazy;
    next /= next.sum();
    const Scalar change = (next - x).cwiseAbs().sum();
    x = std::move(next);
    if (change < tolerance) return x.transpose();
  }
  throw StructuralError("power iteration did not converge");
}

/// ||pi P - pi||_inf.
template <typename DerivedP, typename DerivedPi>
typename DerivedP::Scalar balance_residual(
    const Eigen::MatrixBase<DerivedP>& P,
    const Eigen::MatrixBase<DerivedPi>& pi) {
  return (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff();
}

} // namespace specmarkov::chain

#endif // SPECMARKOV_CHAIN_HPP
