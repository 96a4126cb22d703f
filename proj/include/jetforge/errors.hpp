#ifndef JETFORGE_ERRORS_HPP
#define JETFORGE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetforge {

// Base class for everything the engine can throw. exit codes in the CLI are
// derived from the category, so new error types should pick one of the two
// subtrees below.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input problems: malformed text, unknown names, schema violations.
struct InputError : Error {
    using Error::Error;
};

// Mathematical domain problems: poles, irrational values, singular data.
struct DomainError : Error {
    using Error::Error;
};

struct SyntaxError : InputError {
    std::size_t position;
    SyntaxError(const std::string& msg, std::size_t pos)
        : InputError(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct UnknownSymbol : InputError {
    std::string name;
    explicit UnknownSymbol(const std::string& sym)
        : InputError("unknown symbol '" + sym + "'"), name(sym) {}
};

struct SchemaError : InputError {
    using InputError::InputError;
};

struct OrderMismatch : InputError {
    using InputError::InputError;
};

struct BasePointMismatch : InputError {
    using InputError::InputError;
};

struct DivisionByZero : DomainError {
    DivisionByZero() : DomainError("division by zero") {}
    explicit DivisionByZero(const std::string& msg) : DomainError(msg) {}
};

struct NegativeBaseFractionalPower : DomainError {
    NegativeBaseFractionalPower()
        : DomainError("fractional power of a base not flagged positive") {}
    explicit NegativeBaseFractionalPower(const std::string& msg) : DomainError(msg) {}
};

struct IrrationalValue : DomainError {
    IrrationalValue() : DomainError("evaluation left the rational field") {}
    explicit IrrationalValue(const std::string& msg) : DomainError(msg) {}
};

struct SingularLinearPart : DomainError {
    SingularLinearPart() : DomainError("jet has a singular linear part") {}
};

struct DegenerateFlag : DomainError {
    DegenerateFlag() : DomainError("flag is degenerate for this symbol") {}
};

struct AllSamplesSingular : DomainError {
    AllSamplesSingular()
        : DomainError("no regular sample point found (32 attempts)") {}
};

struct BracketClosureViolation : DomainError {
    explicit BracketClosureViolation(const std::string& msg) : DomainError(msg) {}
};

struct PrerequisiteNotAutomorphism : DomainError {
    PrerequisiteNotAutomorphism()
        : DomainError("jet does not preserve the structure at the previous order") {}
};

struct NumericOverflow : DomainError {
    NumericOverflow() : DomainError("numeric integration overflowed") {}
};

} // namespace jetforge

#endif
