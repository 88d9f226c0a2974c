#pragma once

#include <stdexcept>

namespace cyslag {

/// A point or vector violates the defining equations of the space it claims to live on.
class ConstraintError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed arguments: wrong dimensions, non-orthogonal group elements, mismatched base points.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the domain of a function (r² < 1, τ beyond the tabulated range, apex of the cone).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A multivalued function (arccos on the quadric) was evaluated on its branch cut.
class BranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cyslag
