#pragma once

#include <stdexcept>
#include <string>

namespace dobkit {

/// Invalid scenario or model configuration. `where` is a JSON-pointer-style
/// location when the error originates from a scenario document, or a short
/// context tag for programmatic construction.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what),
          where_(std::move(where)) {}

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

}  // namespace dobkit
