#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace eventalpha {

// Failure classes map 1:1 onto C API status codes and CLI exit codes.
enum class ErrClass { validation = 1, io = 2, upstream = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrClass cls, std::string kind, const std::string& message)
        : std::runtime_error(message), cls_(cls), kind_(std::move(kind)) {}

    ErrClass cls() const { return cls_; }

    // Machine-readable kind, e.g. "BadTimestamp", "DuplicateDate".
    const std::string& kind() const { return kind_; }

private:
    ErrClass cls_;
    std::string kind_;
};

[[noreturn]] inline void fail_validation(std::string kind, const std::string& msg) {
    throw Error(ErrClass::validation, std::move(kind), msg);
}

[[noreturn]] inline void fail_io(std::string kind, const std::string& msg) {
    throw Error(ErrClass::io, std::move(kind), msg);
}

[[noreturn]] inline void fail_upstream(std::string kind, const std::string& msg) {
    throw Error(ErrClass::upstream, std::move(kind), msg);
}

} // namespace eventalpha
