#pragma once

#include <stdexcept>
#include <string>

namespace zerotemp {

/// Bad input: violated precondition or malformed data.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to produce a trustworthy result.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}

    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

}  // namespace zerotemp
