#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace radopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/** Input has the wrong shape for the operation. */
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/** A point violates its manifold's defining constraint. */
struct FeasibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A decomposition or iteration produced unusable numbers (NaN/Inf,
 *  rank-deficient factor). Reported, never silently repaired. */
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** Caller broke an API contract (bad argument range, mismatched state). */
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/** A file does not conform to its declared format. */
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** A file ended before the declared payload was complete. */
struct LengthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace radopt
