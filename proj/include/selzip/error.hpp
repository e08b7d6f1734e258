#pragma once

#include <stdexcept>
#include <string>

namespace selzip {

/// Base for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI's error line.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidModelError : public Error {
public:
    explicit InvalidModelError(const std::string& what) : Error("invalid-model", what) {}
};

class InvalidArgumentError : public Error {
public:
    explicit InvalidArgumentError(const std::string& what) : Error("invalid-argument", what) {}
};

class DegenerateFitError : public Error {
public:
    explicit DegenerateFitError(const std::string& what) : Error("degenerate-fit", what) {}
};

class CodecError : public Error {
public:
    explicit CodecError(const std::string& what) : Error("codec", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io", what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error("format", what) {}
};

class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what) : Error("precondition", what) {}
};

}  // namespace selzip
