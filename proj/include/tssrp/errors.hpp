#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tssrp {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. Carries every violation found.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& message) : Error(message), violations_{message} {}
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

  private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out;
        for (const auto& item : items) {
            if (!out.empty()) out += "; ";
            out += item;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

/// A single observation the caller passed in is unusable (non-finite, out of domain).
class InputError : public Error {
  public:
    using Error::Error;
};

/// Operation not allowed in the current detector state (e.g. stepping after an alarm).
class StateError : public Error {
  public:
    using Error::Error;
};

/// Data supply problems: a source ran dry or a requested value is missing.
class DataError : public Error {
  public:
    using Error::Error;
};

/// Live-monitoring record stream violated the pull protocol.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

class CalibrationError : public Error {
  public:
    using Error::Error;
};

}  // namespace tssrp
