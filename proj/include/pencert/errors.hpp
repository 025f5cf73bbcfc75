#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pencert {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A sum of extended reals produced (+inf) + (-inf). The multiplier rules
/// (zero multipliers on -inf components) make this unreachable in certificate
/// pairings, so hitting it signals a bug in the caller.
struct IndeterminateSum : Error {
  using Error::Error;
};

/// Real arithmetic left the reals: sqrt/log of a negative number, division
/// by zero, a non-real power, or any NaN/overflow produced during evaluation.
struct DomainError : Error {
  using Error::Error;
};

/// Parse failure; `offset` is the byte position in the input text.
struct ParseError : Error {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t offset_)
      : Error(what + " (at byte " + std::to_string(offset_) + ")"), offset(offset_) {}
};

struct SyntaxError : ParseError {
  using ParseError::ParseError;
};

struct UnknownIdentifier : ParseError {
  using ParseError::ParseError;
};

struct VariableOutOfRange : ParseError {
  using ParseError::ParseError;
};

struct IoError : Error {
  using Error::Error;
};

/// Problem file is readable but malformed: missing section/field, wrong
/// array length, infeasible candidate, unknown key.
struct FormatError : Error {
  using Error::Error;
};

/// A point handed to a penalty evaluation is not in the inequality-feasible
/// set G.
struct NotInG : Error {
  using Error::Error;
};

/// The search lattice contains no point of G.
struct EmptyFeasibleGrid : Error {
  using Error::Error;
};

/// Sampling found no feasible point off the equality-feasible set S
/// (e.g. the problem has no equality constraints, so S = G).
struct NoOffSPoints : Error {
  using Error::Error;
};

}  // namespace pencert
