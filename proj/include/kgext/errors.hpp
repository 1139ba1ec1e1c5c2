#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgext {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 1 (validation) and anything else to exit code 2.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define KGEXT_DEFINE_ERROR(Name)                                                \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& message) : Error(#Name, message) {}    \
    }

KGEXT_DEFINE_ERROR(CycleError);
KGEXT_DEFINE_ERROR(DanglingRefError);
KGEXT_DEFINE_ERROR(DuplicateIdError);
KGEXT_DEFINE_ERROR(UnknownIdError);
KGEXT_DEFINE_ERROR(UnknownPrefixError);
KGEXT_DEFINE_ERROR(EmptyPropertySetError);
KGEXT_DEFINE_ERROR(EmptyGraphError);
KGEXT_DEFINE_ERROR(TooManySetsError);
KGEXT_DEFINE_ERROR(DegenerateDataError);
KGEXT_DEFINE_ERROR(NonFiniteError);
KGEXT_DEFINE_ERROR(LayoutMismatchError);
KGEXT_DEFINE_ERROR(LengthMismatchError);
KGEXT_DEFINE_ERROR(MissingSimError);
KGEXT_DEFINE_ERROR(ConflictError);
KGEXT_DEFINE_ERROR(ConfigError);
KGEXT_DEFINE_ERROR(IoError);
KGEXT_DEFINE_ERROR(FormatError);
KGEXT_DEFINE_ERROR(InvalidArgumentError);

#undef KGEXT_DEFINE_ERROR

/// Syntax error in an RDF input, with 1-based position.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message)
        : Error("ParseError", "line " + std::to_string(line) + ", column " +
                                  std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace kgext
