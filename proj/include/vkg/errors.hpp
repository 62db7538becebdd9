#pragma once

#include <stdexcept>
#include <string>

namespace vkg {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
    using Error::Error;
};
struct SingularSymbolError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};
struct DegenerateInputError : Error {
    using Error::Error;
};
struct SupportViolationError : Error {
    using Error::Error;
};
struct MissingHistoryError : Error {
    using Error::Error;
};
struct StencilError : Error {
    using Error::Error;
};
struct OrderingError : Error {
    using Error::Error;
};
struct DependencyError : Error {
    using Error::Error;
};
struct InsufficientDataError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct LookupError : Error {
    using Error::Error;
};
struct UsageError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct WrapError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace vkg
