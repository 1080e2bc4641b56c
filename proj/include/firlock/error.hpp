#pragma once

#include <stdexcept>
#include <string>

namespace firlock {

/// Base class for every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FIRLOCK_DEFINE_ERROR(Name)          \
    class Name : public Error {             \
    public:                                 \
        using Error::Error;                 \
    }

FIRLOCK_DEFINE_ERROR(CycleError);
FIRLOCK_DEFINE_ERROR(IncompleteAssignment);
FIRLOCK_DEFINE_ERROR(HasStateError);
FIRLOCK_DEFINE_ERROR(ConflictError);
FIRLOCK_DEFINE_ERROR(UnsupportedGate);
FIRLOCK_DEFINE_ERROR(WidthError);
FIRLOCK_DEFINE_ERROR(SpecError);
FIRLOCK_DEFINE_ERROR(ExhaustedError);
FIRLOCK_DEFINE_ERROR(ArchMismatch);
FIRLOCK_DEFINE_ERROR(ConfigError);
FIRLOCK_DEFINE_ERROR(TooManyKeys);
FIRLOCK_DEFINE_ERROR(OracleMismatch);
FIRLOCK_DEFINE_ERROR(InconsistentOracle);
FIRLOCK_DEFINE_ERROR(KeyLengthError);

#undef FIRLOCK_DEFINE_ERROR

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    int line() const { return line_; }

private:
    int line_;
};

} // namespace firlock
