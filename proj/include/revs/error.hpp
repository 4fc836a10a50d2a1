#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace revs {

enum class ErrorKind {
    domain,
    config,
    data,
    numeric,
    contract,
    corrupt_checkpoint,
    io,
    digest_mismatch,
    memorization,
    selection,
    missing_artifact,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when training hits its epoch budget before every target is reproduced.
class MemorizationError : public Error {
public:
    MemorizationError(const std::string& message, std::vector<std::string> unmemorized)
        : Error(ErrorKind::memorization, message), unmemorized_(std::move(unmemorized)) {}

    const std::vector<std::string>& unmemorized_targets() const noexcept { return unmemorized_; }

private:
    std::vector<std::string> unmemorized_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

}  // namespace revs
