#pragma once

#include <stdexcept>
#include <string>

namespace vrin {

// Operand shapes do not conform for the requested op.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A forward value or loss term became NaN/Inf.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input files, configs, or inconsistent data.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Checkpoint or data dimensions disagree with the model.
class MismatchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vrin
