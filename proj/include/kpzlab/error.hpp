#pragma once

#include <stdexcept>
#include <string>

namespace kpzlab {

/// Invalid arguments or violated preconditions.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested storage exceeds the configured cap.
class SizingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical procedure failed to produce a result (stalled sampler,
/// non-converged eigensolver, ...).
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kpzlab
