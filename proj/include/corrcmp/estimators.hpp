#pragma once

#include <Eigen/Core>

#include "corrcmp/errors.hpp"
#include "corrcmp/types.hpp"

namespace corrcmp {

namespace detail {
GroupSummary summarize_columns(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys);
}

/// Sufficient statistics of paired columns. Works on any dense Eigen
/// expression with a scalar convertible to double. Throws
/// TooFewObservationsError for n < 4 and DegenerateDataError when a column is
/// constant or the columns are perfectly collinear (|r| = 1).
template <typename DerivedX, typename DerivedY>
GroupSummary summarize(const Eigen::MatrixBase<DerivedX>& xs, const Eigen::MatrixBase<DerivedY>& ys) {
  const Eigen::VectorXd x = xs.derived().template cast<double>();
  const Eigen::VectorXd y = ys.derived().template cast<double>();
  return detail::summarize_columns(x, y);
}

GroupSummary summarize(const BivariateData& data);

/// A summary carrying only the information the tests in this library use:
/// sample size and correlation. Means are set to 0 and variances to 1; every
/// test's p-value depends on the data through (n, r) alone, so this is the
/// entry point for published summary statistics.
GroupSummary summary_from_r(Eigen::Index n, double r);

/// Fisher's variance-stabilizing transform, atanh(r). Requires |r| < 1.
double fisher_z(double r);

/// Inverse Fisher transform, tanh(z).
double inv_fisher_z(double z);

/// Pooled correlation estimate: tanh of the (n_i - 3)-weighted mean of the
/// groups' Fisher z values. Requires n_i >= 4 so both weights are positive.
double donner_rosner_rf(Eigen::Index n1, double r1, Eigen::Index n2, double r2);
double donner_rosner_rf(const GroupSummary& g1, const GroupSummary& g2);

/// Maximum-likelihood estimate of the common correlation under rho_1 = rho_2:
/// the root of
///
///   n1 (r1 - rho) / (1 - rho r1) + n2 (r2 - rho) / (1 - rho r2) = 0
///
/// inside [min(r1, r2), max(r1, r2)]. The equation expands to the quadratic
/// (n1 r2 + n2 r1) rho^2 - (n1 + n2)(1 + r1 r2) rho + (n1 r1 + n2 r2) = 0;
/// the bracketed root is selected (solving linearly when the leading
/// coefficient vanishes) and polished by safeguarded Newton on the original
/// equation, with bisection as fallback.
double pearson_common_rho(Eigen::Index n1, double r1, Eigen::Index n2, double r2);
double pearson_common_rho(const GroupSummary& g1, const GroupSummary& g2);

/// Which estimator produced a common-correlation value.
enum class RhoProvenance { pearson_mle, donner_rosner };

/// Constrained MLEs of one group's remaining parameters given the common rho.
struct GroupFit {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma2_x = 0.0;
  double sigma2_y = 0.0;
};

struct ConstrainedFit {
  double rho_common = 0.0;
  RhoProvenance provenance = RhoProvenance::pearson_mle;
  GroupFit group1;
  GroupFit group2;
};

/// Constrained MLEs under the common-correlation hypothesis: means stay at
/// the sample means and each variance is rescaled,
/// sigma~^2 = s^2 (1 - rho r) / (1 - rho^2). Requires |rho_common| < 1.
ConstrainedFit constrained_mles(const GroupSummary& g1, const GroupSummary& g2,
                                double rho_common, RhoProvenance provenance);

/// Bivariate normal log-likelihood of one group, evaluated from its summary.
/// Exact: the likelihood depends on the data only through the summary.
/// Includes the -n log(2 pi) normalizing constant.
double bivariate_loglik(const GroupSummary& g, const BivariateParams& params);

/// Unconstrained per-group MLE as a parameter vector.
BivariateParams mle_params(const GroupSummary& g);

/// Parameter vector of group 1 or group 2 (`group` is 1 or 2) of a
/// constrained fit.
BivariateParams constrained_params(const ConstrainedFit& fit, int group);

}  // namespace corrcmp
