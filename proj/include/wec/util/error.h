#pragma once

#include <stdexcept>
#include <string>

namespace wec {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (files, records, matrices).
class InputError : public Error {
public:
    using Error::Error;
};

/// A caller violated an operation's precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

} // namespace wec
