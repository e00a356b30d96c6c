#pragma once

#include <stdexcept>
#include <string>

namespace dlss {

enum class ErrorCode {
    InvalidArgument = 1,
    Domain = 2,
    Solver = 3,
    Shooting = 4,
    Quadrature = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace dlss
