#pragma once

#include <stdexcept>
#include <string>

namespace qrng {

// Precondition violated on a numeric argument (bad coefficient, negative variance, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The measured noise budget leaves no positive quantum variance.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Request would exceed the configured in-memory sample cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Extraction would claim more output than the certified min-entropy allows.
class SecurityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace qrng
