#pragma once

#include <stdexcept>
#include <string>

namespace lbsieve {

// Bad argument values (violated preconditions, malformed inputs).
struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation outside the supported domain (no silent extrapolation).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Request exceeds a hard resource guard (range too large, partition blowup).
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numeric reproduction target failed; carries the offending components.
struct reproduction_failure : std::runtime_error {
    double first = 0, second = 0, imported = 0;
    reproduction_failure(const std::string& msg, double i1, double i2, double imp)
        : std::runtime_error(msg), first(i1), second(i2), imported(imp) {}
};

// Decomposition structure outside the supported theory (role-reversal terms).
struct unsupported_structure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sampling-based classification could not decide (boundary-heavy region).
struct undetermined_classification : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lbsieve
