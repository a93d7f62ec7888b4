#pragma once

#include <Eigen/Core>

namespace corrcmp {

/// Minimum observations per group. Keeps the Fisher-Z weights (n - 3)
/// positive and the chi-square degrees of freedom (n - 1, n - 2) at least 2,
/// so every test in the library is defined for every accepted group.
inline constexpr Eigen::Index kMinGroupSize = 4;

/// Paired observations (x_j, y_j), j = 1..n, of one group.
struct BivariateData {
  Eigen::VectorXd xs;
  Eigen::VectorXd ys;

  Eigen::Index size() const { return xs.size(); }
};

/// Sufficient statistics of one group. Variances carry divisor n (maximum
/// likelihood convention); the correlation is the usual product-moment r,
/// which no divisor choice affects.
struct GroupSummary {
  Eigen::Index n = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;  ///< strictly positive
  double var_y = 0.0;  ///< strictly positive
  double r = 0.0;      ///< strictly inside (-1, 1)
};

/// Parameters of one bivariate normal population.
struct BivariateParams {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;  ///< > 0
  double sigma_y = 1.0;  ///< > 0
  double rho = 0.0;      ///< strictly inside (-1, 1)
};

/// Throws ValidationError (or a subclass) unless the summary satisfies the
/// GroupSummary invariants.
void validate(const GroupSummary& g);

/// Throws ValidationError unless sigmas are positive, |rho| < 1 and all
/// fields are finite.
void validate(const BivariateParams& p);

}  // namespace corrcmp
