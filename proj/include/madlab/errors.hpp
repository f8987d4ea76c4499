#pragma once

#include <stdexcept>
#include <string>

namespace madlab {

// Rejected configuration (bad delta exponent, inconsistent arm count, ...).
// The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation called with inputs outside its precondition.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// CSV / schema problems while loading external data.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

// An internal guarantee was broken (e.g. a zero assignment probability
// reached the estimator).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Units or batches fed to an accumulator out of order.
class SequencingError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// File system failures. The CLI maps this to exit code 2.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace madlab
