#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hmil_ted {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or rejected input document. `offset()` is the byte position
/// reported by the tokenizer when one is known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message, std::size_t offset = npos)
        : Error(message), offset_(offset) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t offset() const noexcept { return offset_; }
    bool has_offset() const noexcept { return offset_ != npos; }

private:
    std::size_t offset_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A configured limit (nesting depth, oracle size bound, ...) was exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition.
class ContractError : public Error {
public:
    using Error::Error;
};

} // namespace hmil_ted
