#pragma once

#include <stdexcept>
#include <string>

namespace mortgeom {

/// Base of every error raised by the library. The CLI maps the three
/// families below onto its exit codes (parse 2, geometry 3, analytics 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- ingest ---------------------------------------------------------------
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Malformed text (bad header, non-numeric field, ragged row).
class FormatError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Well-formed rows that do not assemble into a rectangular, contiguous grid.
class StructuralError : public ParseError {
 public:
  using ParseError::ParseError;
};

// --- geometry -------------------------------------------------------------
class GeometryError : public Error {
 public:
  using Error::Error;
};

class DegenerateStencilError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class AmbiguousNormalError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class QuadratureError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// --- analytics ------------------------------------------------------------
class AnalyticsError : public Error {
 public:
  using Error::Error;
};

}  // namespace mortgeom
