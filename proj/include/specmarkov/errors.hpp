#ifndef SPECMARKOV_ERRORS_HPP
#define SPECMARKOV_ERRORS_HPP

#include <stdexcept>

namespace specmarkov {

/// A parameter or input record violates its documented range.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A model could not be assembled or solved (non-stochastic rows,
/// ambiguous stationary distribution, singular system).
class StructuralError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The backlog stay probability is one, so the mean dwell is unbounded.
class InfiniteDelayError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace specmarkov

#endif // SPECMARKOV_ERRORS_HPP
