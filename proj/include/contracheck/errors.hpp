#pragma once

#include <stdexcept>
#include <string>

namespace contracheck {

/// Base for failures raised while talking to a model backend.
struct BackendError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network/HTTP failure; retryable.
struct TransportError : BackendError {
  using BackendError::BackendError;
};

/// Missing or rejected credentials; not retryable.
struct AuthError : BackendError {
  using BackendError::BackendError;
};

/// The scripted replay fixture has no entry for a prompt digest.
struct ReplayMissError : BackendError {
  using BackendError::BackendError;
};

/// No JSON object with the required keys could be extracted from a response.
struct VerdictParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A dataset or fixture file violates its schema.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Traces and documents do not line up by id.
struct AlignmentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace contracheck
