#pragma once

#include <stdexcept>
#include <string>

namespace coarsekit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied instance violates a documented precondition.
/// Kept distinct from a negative verdict so harnesses can tell the two apart.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or search exceeded its configured budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// The truncation in use is too small to produce any evidence.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

enum class Verdict { kYes, kNo, kInconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kYes:
      return "yes";
    case Verdict::kNo:
      return "no";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

}  // namespace coarsekit
