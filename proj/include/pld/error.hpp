#ifndef PLD_ERROR_HPP
#define PLD_ERROR_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace pld {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised by the optimizer when an objective evaluation is not finite.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string format_arg(const char* op, const char* name, long double value) {
  std::ostringstream os;
  os.precision(17);
  os << op << ": invalid " << name << " = " << value;
  return os.str();
}

}  // namespace detail
}  // namespace pld

#endif  // PLD_ERROR_HPP
