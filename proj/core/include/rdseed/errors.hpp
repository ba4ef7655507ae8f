#pragma once

#include <stdexcept>
#include <string>

namespace rdseed {

// Invalid parameters or inconsistent inputs, detected before any solve starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values, blow-up, or a violated numerical contract during a solve.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rdseed
