#ifndef LABELCUT_ERRORS_HPP
#define LABELCUT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace labelcut {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A constructor argument is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A penalty sample table failed monotonicity/concavity/finiteness checks.
class ValidationError : public Error {
public:
    enum class Kind { Monotonicity, Concavity, NonFinite };

    ValidationError(std::size_t index, Kind kind, const std::string& what)
        : Error(what), index(index), kind(kind) {}

    std::size_t index; ///< sample index at which validation failed
    Kind kind;
};

/// An index or size argument is out of bounds for the given object.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Two label vectors of different length were combined.
class LengthMismatch : public Error {
public:
    using Error::Error;
};

/// A truncation cap exceeds half the hyperedge size.
class CapTooLarge : public Error {
public:
    using Error::Error;
};

/// A problem is too large for the brute-force path.
class TooLarge : public Error {
public:
    using Error::Error;
};

/// A scaled capacity left the representable integer range.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// A document could not be parsed at all.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A document parsed but describes an invalid instance.
class SemanticError : public Error {
public:
    explicit SemanticError(const std::string& what, long hyperedge = -1)
        : Error(what), hyperedge(hyperedge) {}

    long hyperedge; ///< offending hyperedge index, or -1 if not edge-specific
};

} // namespace labelcut

#endif
