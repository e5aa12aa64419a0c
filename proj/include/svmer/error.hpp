#pragma once

#include <stdexcept>
#include <string>

namespace svmer {

/// Base of every exception thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad CSV rows, label values, arity).
class data_error : public error {
  public:
    using error::error;
};

/// Invalid parameters or configuration documents.
class config_error : public error {
  public:
    using error::error;
};

/// File could not be opened, read or written.
class io_error : public error {
  public:
    using error::error;
};

/// Non-finite kernel values or weight updates.
class numeric_error : public error {
  public:
    using error::error;
};

/// Evidence sources that cannot be combined (normalisation denominator <= 0).
class conflict_error : public error {
  public:
    using error::error;
};

}  // namespace svmer
