#pragma once

#include <stdexcept>

namespace quotecross {

// Unrecoverable input problem: unreadable file, ambiguous ground truth,
// corrupt artifact. The CLI reports it and exits nonzero.
struct FatalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration (exit code 2).
struct ConfigError : FatalError {
    using FatalError::FatalError;
};

// A required upstream artifact is missing (exit code 3).
struct MissingArtifactError : FatalError {
    using FatalError::FatalError;
};

}  // namespace quotecross
