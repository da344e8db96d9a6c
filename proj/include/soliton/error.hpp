#pragma once

#include <stdexcept>
#include <string>

namespace soliton {

// Every failure carries a short machine-readable code (NonEisenstein, CapTooSmall, ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

} // namespace soliton
