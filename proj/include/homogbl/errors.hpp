#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace homogbl {

// Runtime failure carrying a stable machine-readable code alongside the
// human-readable message.  Codes in use: invalid-resolution,
// interface-misalignment, missing-scale, bad-constraint, incompatible-rhs,
// no-convergence, numerical-breakdown, unsupported-scale,
// grid-incompatibility, insufficient-data, inconsistency, config-error.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw error(std::move(code), message);
}

} // namespace homogbl
