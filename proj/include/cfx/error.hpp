#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfx {

/// Base of every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidState : public Error {
public:
    using Error::Error;
};

/// pickup/drop whose preconditions do not hold.
class IllegalAction : public Error {
public:
    using Error::Error;
};

class InvalidTrajectory : public Error {
public:
    InvalidTrajectory(std::size_t index, const std::string& why)
        : Error("illegal action at index " + std::to_string(index) + ": " + why), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class Unsatisfiable : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    enum class Reason { unknown_token, structural };

    static ParseError unknown_token(std::string token, std::size_t position) {
        std::string msg = "unknown token \"" + token + "\"";
        return ParseError(Reason::unknown_token, std::move(token), position, msg);
    }
    static ParseError structural(std::size_t position, const std::string& detail) {
        return ParseError(Reason::structural, {}, position,
                          "unexpected input at token " + std::to_string(position) + ": " + detail);
    }

    Reason reason() const noexcept { return reason_; }
    const std::string& token() const noexcept { return token_; }
    std::size_t position() const noexcept { return position_; }

private:
    ParseError(Reason r, std::string token, std::size_t pos, const std::string& msg)
        : Error(msg), reason_(r), token_(std::move(token)), position_(pos) {}

    Reason reason_;
    std::string token_;
    std::size_t position_;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ServiceUnreachable : public Error {
public:
    using Error::Error;
};

class MalformedResponse : public Error {
public:
    using Error::Error;
};

class NoValidExplanation : public Error {
public:
    using Error::Error;
};

class GenerationFailed : public Error {
public:
    using Error::Error;
};

} // namespace cfx
