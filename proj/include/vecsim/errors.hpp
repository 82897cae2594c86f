#pragma once

#include <stdexcept>
#include <string>

namespace vecsim {

// Invalid or infeasible configuration (geometry, budgets, unknown names).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Arguments outside an operation's mathematical domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A caller broke a documented precondition between modules.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what),
        row_(row) {}

  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

class TrainingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SimulationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vecsim
