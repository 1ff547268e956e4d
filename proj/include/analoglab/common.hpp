#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace analoglab {

using Natural = std::uint64_t;

/// Base of every error the library throws on a broken precondition or a
/// budgeted search that cannot complete.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class ScheduleExhausted : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

class NonConvergentQuadrature : public Error {
 public:
  using Error::Error;
};

class NotInSetWithinBudget : public Error {
 public:
  using Error::Error;
};

class NotInTree : public Error {
 public:
  using Error::Error;
};

class RequiresSyntheticGroundTruth : public Error {
 public:
  using Error::Error;
};

enum class Answer { No, Yes };

inline const char* to_string(Answer a) { return a == Answer::Yes ? "YES" : "NO"; }

}  // namespace analoglab
