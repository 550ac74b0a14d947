#ifndef SHAPCRED_ERRORS_HPP
#define SHAPCRED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace shapcred {

/// A documented precondition of an operation does not hold (e.g. i not in S).
struct PreconditionError : std::invalid_argument {
   using std::invalid_argument::invalid_argument;
};

/// An agent/player index is outside [0, n).
struct IndexError : std::out_of_range {
   using std::out_of_range::out_of_range;
};

/// Problem too large for an exhaustive method (exact Shapley above the cap).
struct SizeError : std::length_error {
   using std::length_error::length_error;
};

/// A numeric parameter is outside its admissible range (M <= 0, empty batch, ...).
struct ParameterError : std::invalid_argument {
   using std::invalid_argument::invalid_argument;
};

/// Vector/matrix dimensions disagree.
struct ShapeError : std::invalid_argument {
   using std::invalid_argument::invalid_argument;
};

/// Call out of order: step after done, backward without forward.
struct LifecycleError : std::logic_error {
   using std::logic_error::logic_error;
};

/// A malformed joint action or environment input.
struct ValidationError : std::invalid_argument {
   using std::invalid_argument::invalid_argument;
};

/// Configuration problem. `field()` names the offending key.
class ConfigError : public std::invalid_argument {
  public:
   ConfigError(std::string field, const std::string& what)
       : std::invalid_argument(field + ": " + what), field_(std::move(field))
   {
   }
   [[nodiscard]] const std::string& field() const noexcept { return field_; }

  private:
   std::string field_;
};

}  // namespace shapcred

#endif  // SHAPCRED_ERRORS_HPP
