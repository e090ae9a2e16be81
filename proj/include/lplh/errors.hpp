#pragma once

#include <stdexcept>
#include <string>

namespace lplh {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A model response that does not contain the expected marker block.
struct MalformedResponse : Error {
    using Error::Error;
};

// Environment process could not be launched or stopped responding.
struct EnvUnavailable : Error {
    using Error::Error;
};

// step() called after the episode reached a terminal state.
struct EpisodeOver : Error {
    using Error::Error;
};

// Operation not supported by this environment implementation.
struct Unsupported : Error {
    using Error::Error;
};

// Scripted gateway has no canned response for this request.
struct ScriptMiss : Error {
    using Error::Error;
};

// Remote model endpoint failed after all retries.
struct ModelUnavailable : Error {
    using Error::Error;
};

// Per-run token or call budget exhausted.
struct BudgetExceeded : Error {
    using Error::Error;
};

// Record rejected by the experience store (e.g. dimension mismatch).
struct StoreRejected : Error {
    using Error::Error;
};

} // namespace lplh
