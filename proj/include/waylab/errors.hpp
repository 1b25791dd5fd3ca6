#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace waylab {

// Input violates an operation's mathematical precondition (zero vector,
// non-normalized state, negative squared norm, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed value: dimension mismatch, wrong sector window, bad shape.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An iterative method stopped without meeting its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ConvergenceError that carries the best iterate reached.
template <typename Iterate>
class ConvergenceErrorWith : public ConvergenceError {
 public:
  ConvergenceErrorWith(const std::string& what, Iterate best)
      : ConvergenceError(what), best_(std::move(best)) {}

  const Iterate& best_iterate() const noexcept { return best_; }

 private:
  Iterate best_;
};

}  // namespace waylab
