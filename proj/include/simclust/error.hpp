#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace simclust {

/// Base for every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary or text input. `offset` is the byte position at which
/// parsing failed (or 0 when not meaningful).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

/// Structurally valid input that breaks a domain invariant
/// (duplicate class, ragged rows, cluster id out of range, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Mathematical precondition violated, e.g. a zero-norm vector handed to a
/// cosine computation.
class DomainError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical failure during training (NaN or Inf in the parameters).
class TrainingError : public Error {
public:
    using Error::Error;
};

}  // namespace simclust
