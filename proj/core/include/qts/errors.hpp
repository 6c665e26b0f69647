#pragma once

#include <stdexcept>
#include <string>

namespace qts {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operand dimensions do not conform.
class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& what) : Error(what) {}
};

/// Inversion of a zero quaternion.
class ZeroDivision : public Error {
public:
    explicit ZeroDivision(const std::string& what) : Error(what) {}
};

/// A complex matrix claimed to be an adjoint image lacks the block symmetry.
class StructureViolation : public Error {
public:
    explicit StructureViolation(const std::string& what) : Error(what) {}
};

/// SVD iteration did not converge within the sweep budget.
class ConvergenceFailure : public Error {
public:
    explicit ConvergenceFailure(const std::string& what) : Error(what) {}
};

/// Inverse requested for a tensor that fails the invertibility check.
class Singular : public Error {
public:
    explicit Singular(const std::string& what) : Error(what) {}
};

/// Nested solves produced contradictory values for a shared unknown.
class InternalInconsistency : public Error {
public:
    explicit InternalInconsistency(const std::string& what) : Error(what) {}
};

/// Oracle problem exceeds the real-dimension guard.
class SizeExceeded : public Error {
public:
    explicit SizeExceeded(const std::string& what) : Error(what) {}
};

/// Instance generator could not produce the requested instance.
class GenerationFailure : public Error {
public:
    explicit GenerationFailure(const std::string& what) : Error(what) {}
};

/// Malformed input file.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

} // namespace qts
