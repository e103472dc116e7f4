#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifd6 {

enum class ErrorKind {
    Domain,
    DivisionByZeroConstantTerm,
    NonzeroCurveOrigin,
    Syntax,
    UnknownIdentifier,
    BasePointNotFound,
    BasePointAmbiguous,
    DegenerateGradient,
    SingularTransmission,
    NonConvergence,
    Io,
    MissingKey,
};

/// Base of every library error. `kind()` identifies the failure without RTTI,
/// `is_numerical()` separates numerical breakdowns from bad input.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    bool is_numerical() const noexcept;

private:
    ErrorKind kind_;
};

#define IFD6_DECLARE_ERROR(Name, Base, Kind)                                   \
    class Name : public Base {                                                 \
    public:                                                                    \
        explicit Name(const std::string& what) : Base(ErrorKind::Kind, what) {} \
                                                                               \
    protected:                                                                 \
        Name(ErrorKind kind, const std::string& what) : Base(kind, what) {}    \
    };

IFD6_DECLARE_ERROR(DomainError, Error, Domain)
IFD6_DECLARE_ERROR(DivisionByZeroConstantTerm, DomainError, DivisionByZeroConstantTerm)
IFD6_DECLARE_ERROR(NonzeroCurveOrigin, Error, NonzeroCurveOrigin)
IFD6_DECLARE_ERROR(BasePointNotFound, Error, BasePointNotFound)
IFD6_DECLARE_ERROR(BasePointAmbiguous, Error, BasePointAmbiguous)
IFD6_DECLARE_ERROR(DegenerateGradient, Error, DegenerateGradient)
IFD6_DECLARE_ERROR(SingularTransmission, Error, SingularTransmission)
IFD6_DECLARE_ERROR(NonConvergence, Error, NonConvergence)
IFD6_DECLARE_ERROR(IoError, Error, Io)

#undef IFD6_DECLARE_ERROR

class SyntaxError : public Error {
public:
    /// `position` is a 0-based character offset; `line` is 1-based, 0 when unknown.
    SyntaxError(const std::string& message, std::size_t position, std::size_t line = 0);
    std::size_t position() const noexcept { return position_; }
    std::size_t line() const noexcept { return line_; }

protected:
    SyntaxError(ErrorKind kind, const std::string& what, std::size_t position, std::size_t line)
        : Error(kind, what), position_(position), line_(line) {}

private:
    std::size_t position_;
    std::size_t line_;
};

class UnknownIdentifier : public SyntaxError {
public:
    UnknownIdentifier(const std::string& name, std::size_t position, std::size_t line = 0);
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class MissingKey : public Error {
public:
    explicit MissingKey(const std::string& key);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Rethrows `e` as the same error kind with `context` prepended to the message.
[[noreturn]] void rethrow_with_context(const Error& e, std::string_view context);

}  // namespace ifd6
