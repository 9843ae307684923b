#pragma once

#include <stdexcept>
#include <string>

namespace ple {

/// Parameter vector violates a family's domain constraints.
struct param_domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Dataset violates an operation's precondition (wrong support, too few points).
struct data_domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration (estimator/family mismatch, bad grid spec).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Candidate (or every candidate) is infeasible for the constrained fit.
struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grid too coarse for a density operation.
struct resolution_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Map handed to a pushforward is not strictly monotone or not an inverse pair.
struct invalid_map_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Training or a summary statistic produced a non-finite value.
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ple
