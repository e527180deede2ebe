#pragma once

#include <stdexcept>
#include <string>

namespace dual {

// Precondition or shape violation on a public operation.
struct ContractViolation : std::invalid_argument {
    explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// A numeric stage produced non-finite values; the message names the stage.
struct NumericFailure : std::runtime_error {
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dual
