#ifndef FLOWTREE_ERRORS_HPP
#define FLOWTREE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace flowtree {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A set required by the operation is clipped by the window truncation.
struct OutOfWindow : Error {
    using Error::Error;
};

struct InvalidTrapezoid : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

/// No admissible trapezoid of the required mass contains `certificate`.
struct WindowTooSmall : Error {
    std::uint32_t certificate;
    WindowTooSmall(const std::string& msg, std::uint32_t v) : Error(msg), certificate(v) {}
};

struct MissingLeaf : Error {
    using Error::Error;
};
struct NonPositiveMass : Error {
    using Error::Error;
};
struct AlphaTooSmall : Error {
    using Error::Error;
};
struct NonIntegerExponent : Error {
    using Error::Error;
};
struct ConstantFunction : Error {
    using Error::Error;
};
struct EmptyCorpus : Error {
    using Error::Error;
};
struct NotRebaseNeeded : Error {
    using Error::Error;
};
struct SharpVanishes : Error {
    using Error::Error;
};
struct InvalidParams : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

} // namespace flowtree

#endif
