#pragma once

#include <stdexcept>
#include <string>

namespace csdnls {

/// Two states (or a state and an operator) disagree on the retained band.
class TruncationMismatch : public std::invalid_argument {
public:
    TruncationMismatch(long lhs, long rhs)
        : std::invalid_argument("truncation mismatch: N=" + std::to_string(lhs) +
                                " vs N=" + std::to_string(rhs)) {}
};

/// Integration or eigensolve produced non-finite values, or a spectral
/// precondition (e.g. positivity of a shifted operator) failed.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csdnls
