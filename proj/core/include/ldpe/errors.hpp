#pragma once

#include <stdexcept>
#include <string>

namespace ldpe {

// Raised when a user pool cannot supply the number of unconsumed users a
// query batch needs. Protocol runs treat this as an aborted trial, never as
// something to retry silently.
struct InsufficientUsers : std::runtime_error {
    explicit InsufficientUsers(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an estimator is configured with an accuracy target outside the
// range its guarantees cover (the plug-in estimators require 0 < epsilon <= 1/2).
struct InvalidEpsilon : std::invalid_argument {
    explicit InvalidEpsilon(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by the chain estimator when the seeding tests find no dependence
// above the threshold, i.e. the data shows no usable chain signal. Reported,
// not guessed around.
struct ChainAssumptionViolated : std::runtime_error {
    explicit ChainAssumptionViolated(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a non-interactive pool is queried after its single round closed,
// or on other protocol-contract violations.
struct ProtocolViolation : std::logic_error {
    explicit ProtocolViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ldpe
