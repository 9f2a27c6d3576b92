#ifndef MSH_ERRORS_HPP
#define MSH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msh {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct CapExceeded : Error {
    using Error::Error;
};

struct ParseError : Error {
    std::size_t pos;
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at position " + std::to_string(position) + ")"), pos(position) {}
};
struct PeriodicityViolation : Error {
    using Error::Error;
};
struct DegenerateMatrix : Error {
    using Error::Error;
};

struct NonElliptic : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct UnresolvedScale : Error {
    using Error::Error;
};

struct DegenerateFit : Error {
    using Error::Error;
};
struct WindowEmpty : Error {
    using Error::Error;
};

/// Config-file violations carry the path to the offending field.
struct SchemaError : Error {
    SchemaError(const std::string& path, const std::string& what)
        : Error("config error at '" + path + "': " + what) {}
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace msh

#endif
