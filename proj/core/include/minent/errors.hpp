#pragma once

#include <stdexcept>
#include <string>

namespace minent {

/// A caller-supplied parameter is outside its admissible range.
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A structural precondition failed; the message carries the diagnostic.
struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation outside a domain.
struct OutOfRange : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// A requested target is not attainable; carries the achievable range.
struct NoSolution : std::runtime_error {
    double achievable_lo;
    double achievable_hi;
    NoSolution(const std::string& msg, double lo, double hi)
        : std::runtime_error(msg), achievable_lo(lo), achievable_hi(hi) {}
};

/// An iterative construction exhausted its budget without meeting its checks.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace minent
