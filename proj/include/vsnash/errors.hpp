#pragma once

#include <stdexcept>
#include <string>

namespace vsnash {

// Invalid user input: bad dimensions, unknown keys, out-of-range parameters.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A numeric utility was called outside its mathematical domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Batch or communication schedule produced an invalid value.
class ScheduleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A certified problem property (monotonicity, contraction) does not hold.
class PreconditionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The ground-truth oracle did not reach its tolerance.
class OracleError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A run left the region where its iterates stay finite and bounded.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsnash
