#include "npmix/error.hpp"

namespace npmix {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::OverflowBudget: return "OverflowBudget";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::ParallelSlopes: return "ParallelSlopes";
    case ErrorKind::SeriesBudget: return "SeriesBudget";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace npmix
