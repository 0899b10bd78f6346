#pragma once

// Error taxonomy shared by every module. All failures thrown by this library
// derive from uq::Error so callers can catch library errors without catching
// unrelated std exceptions. The CLI maps these onto distinct exit codes.

#include <stdexcept>
#include <string>

namespace uq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Precondition or postcondition breach inside this library's own contracts
// (out-of-range scores, invalid thresholds, malformed partitions).
struct ContractViolation : Error {
    using Error::Error;
};

// Weight vector is not on the probability simplex.
struct SimplexViolation : ContractViolation {
    using ContractViolation::ContractViolation;
};

// Caller-supplied data is invalid for the requested operation.
struct InputError : Error {
    using Error::Error;
};

// Invalid or inconsistent configuration (unknown scorer names, missing
// providers, bad flag combinations).
struct ConfigError : Error {
    using Error::Error;
};

// A provider call failed. retryable distinguishes transport-level faults
// (worth retrying with backoff) from permanent rejections.
struct ProviderError : Error {
    explicit ProviderError(const std::string& what, bool retryable_ = true)
        : Error(what), retryable(retryable_) {}
    bool retryable;
};

// Persisted data is malformed, duplicated, or otherwise unloadable.
struct DataError : Error {
    using Error::Error;
};

// A record file carries a schema version this build does not understand.
struct MigrationError : DataError {
    using DataError::DataError;
};

// An objective cannot be optimized on the given labels (e.g. a single class).
struct DegenerateObjective : Error {
    using Error::Error;
};

// Free-text parsing found no usable value (judge replies).
struct ParseError : Error {
    using Error::Error;
};

// A requested dataset split cannot be constructed (stratification impossible).
struct SplitError : Error {
    using Error::Error;
};

}  // namespace uq
