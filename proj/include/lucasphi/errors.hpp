#pragma once

#include <stdexcept>
#include <string>

namespace lucasphi {

/// Precondition violation: the inputs are outside an operation's domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Requested work exceeds a hard resource limit (sieve size, exponent range).
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An operation that requires a complete factorization received an
/// incomplete one.
struct IncompleteFactorizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Persistent state (checkpoint stream) failed a consistency check.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An internal invariant failed; indicates a bug, not bad input.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace lucasphi
