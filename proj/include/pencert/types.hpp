#pragma once

#include <Eigen/Core>

#include <functional>

namespace pencert {

using Vec = Eigen::VectorXd;

/// Scalar field evaluated at a point; must be pure and return finite values
/// (throw DomainError otherwise).
using ScalarFn = std::function<double(const Vec&)>;

/// Membership predicate of a set; must be pure.
using SetOracle = std::function<bool(const Vec&)>;

}  // namespace pencert
