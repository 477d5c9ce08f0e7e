#pragma once

#include <stdexcept>
#include <string>

namespace perilat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a transformation (or an infinite limit).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Result is not representable, e.g. a divergent density at the boundary.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Enumeration would exceed a configured cardinality cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Lattice search hit its size cap without finding a reconstructing lattice.
class SearchExhausted : public Error {
public:
    using Error::Error;
};

class NotReconstructing : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Malformed text input (transform strings, serialized sets, config files).
class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace perilat
