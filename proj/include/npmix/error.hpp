#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace npmix {

enum class ErrorKind {
  DomainError,
  DegenerateDenominator,
  EmptyWindow,
  OverflowBudget,
  BranchAmbiguity,
  ParallelSlopes,
  SeriesBudget,
  SingularSystem,
  IllConditioned,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace npmix
