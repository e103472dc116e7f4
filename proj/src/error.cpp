#include "ifd6/error.hpp"

namespace ifd6 {

bool Error::is_numerical() const noexcept
{
    switch (kind_) {
    case ErrorKind::Syntax:
    case ErrorKind::UnknownIdentifier:
    case ErrorKind::Io:
    case ErrorKind::MissingKey:
        return false;
    default:
        return true;
    }
}

SyntaxError::SyntaxError(const std::string& message, std::size_t position, std::size_t line)
    : Error(ErrorKind::Syntax,
            (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + message +
                " (at offset " + std::to_string(position) + ")"),
      position_(position),
      line_(line)
{
}

UnknownIdentifier::UnknownIdentifier(const std::string& name, std::size_t position, std::size_t line)
    : SyntaxError(ErrorKind::UnknownIdentifier,
                  (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                      "unknown identifier '" + name + "' (at offset " + std::to_string(position) + ")",
                  position, line),
      name_(name)
{
}

MissingKey::MissingKey(const std::string& key)
    : Error(ErrorKind::MissingKey, "missing key '" + key + "'"), key_(key)
{
}

void rethrow_with_context(const Error& e, std::string_view context)
{
    const std::string msg = std::string(context) + ": " + e.what();
    switch (e.kind()) {
    case ErrorKind::Domain: throw DomainError(msg);
    case ErrorKind::DivisionByZeroConstantTerm: throw DivisionByZeroConstantTerm(msg);
    case ErrorKind::NonzeroCurveOrigin: throw NonzeroCurveOrigin(msg);
    case ErrorKind::BasePointNotFound: throw BasePointNotFound(msg);
    case ErrorKind::BasePointAmbiguous: throw BasePointAmbiguous(msg);
    case ErrorKind::DegenerateGradient: throw DegenerateGradient(msg);
    case ErrorKind::SingularTransmission: throw SingularTransmission(msg);
    case ErrorKind::NonConvergence: throw NonConvergence(msg);
    case ErrorKind::Io: throw IoError(msg);
    case ErrorKind::MissingKey: throw MissingKey(static_cast<const MissingKey&>(e).key());
    case ErrorKind::UnknownIdentifier: {
        const auto& u = static_cast<const UnknownIdentifier&>(e);
        throw UnknownIdentifier(u.name(), u.position(), u.line());
    }
    case ErrorKind::Syntax: {
        const auto& s = static_cast<const SyntaxError&>(e);
        throw SyntaxError(msg, s.position(), s.line());
    }
    }
    throw Error(e.kind(), msg);
}

}  // namespace ifd6
