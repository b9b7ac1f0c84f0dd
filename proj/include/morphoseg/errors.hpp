#pragma once

#include <stdexcept>
#include <string>

namespace morphoseg {

/// Base of every exception thrown by the toolkit.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class io_error : public error {
public:
    using error::error;
};

/// File contents do not follow the expected on-disk layout.
class format_error : public error {
public:
    using error::error;
};

/// Caller violated an operation's input contract.
class precondition_error : public error {
public:
    using error::error;
};

} // namespace morphoseg
