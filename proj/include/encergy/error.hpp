#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace encergy {

// Library failures carry a stable machine-readable kind next to the
// human-readable message. The CLI prints "<kind>: <message>" on stderr
// and maps kinds to exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, std::string message)
        : std::runtime_error(kind + ": " + message),
          kind_(std::move(kind)),
          message_(std::move(message)) {}

    const std::string& kind() const noexcept { return kind_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string kind_;
    std::string message_;
};

[[noreturn]] inline void fail(std::string kind, const std::string& message) {
    throw Error(std::move(kind), message);
}

} // namespace encergy
