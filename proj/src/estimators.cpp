#include "corrcmp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "corrcmp/errors.hpp"

namespace corrcmp {

void validate(const GroupSummary& summary) {
  if (summary.n < kMinGroupSize) {
    throw TooFewObservationsError("group size must be at least " +
                                  std::to_string(kMinGroupSize) + ", got " +
                                  std::to_string(summary.n));
  }
  if (!std::isfinite(summary.mean_x) || !std::isfinite(summary.mean_y)) {
    throw ValidationError("group means must be finite");
  }
  if (!std::isfinite(summary.var_x) || !std::isfinite(summary.var_y) ||
      summary.var_x <= 0.0 || summary.var_y <= 0.0) {
    throw DegenerateDataError("group variances must be finite and positive");
  }
  if (!std::isfinite(summary.r) || std::abs(summary.r) >= 1.0) {
    throw DegenerateDataError("sample correlation must lie strictly inside (-1, 1), got " +
                              std::to_string(summary.r));
  }
}

void validate(const BivariateParams& params) {
  if (!std::isfinite(params.mu_x) || !std::isfinite(params.mu_y)) {
    throw ValidationError("population means must be finite");
  }
  if (!std::isfinite(params.sigma_x) || !std::isfinite(params.sigma_y) ||
      params.sigma_x <= 0.0 || params.sigma_y <= 0.0) {
    throw ValidationError("population standard deviations must be finite and positive");
  }
  if (!std::isfinite(params.rho) || std::abs(params.rho) >= 1.0) {
    throw ValidationError("population correlation must lie strictly inside (-1, 1), got " +
                          std::to_string(params.rho));
  }
}

namespace detail {

GroupSummary summarize_columns(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) {
  if (xs.size() != ys.size()) {
    throw ValidationError("paired columns must have equal length, got " +
                          std::to_string(xs.size()) + " and " + std::to_string(ys.size()));
  }
  const Eigen::Index n = xs.size();
  if (n < kMinGroupSize) {
    throw TooFewObservationsError("group size must be at least " +
                                  std::to_string(kMinGroupSize) + ", got " +
                                  std::to_string(n));
  }
  if (!xs.allFinite() || !ys.allFinite()) {
    throw ValidationError("observations must be finite");
  }

  GroupSummary summary;
  summary.n = n;
  summary.mean_x = xs.mean();
  summary.mean_y = ys.mean();
  const Eigen::VectorXd dx = xs.array() - summary.mean_x;
  const Eigen::VectorXd dy = ys.array() - summary.mean_y;
  const double inv_n = 1.0 / static_cast<double>(n);
  summary.var_x = dx.squaredNorm() * inv_n;
  summary.var_y = dy.squaredNorm() * inv_n;
  if (summary.var_x <= 0.0 || summary.var_y <= 0.0) {
    throw DegenerateDataError("a column is constant; the sample correlation is undefined");
  }
  summary.r = dx.dot(dy) * inv_n / std::sqrt(summary.var_x * summary.var_y);
  if (std::abs(summary.r) >= 1.0) {
    throw DegenerateDataError(
        "columns are perfectly collinear; the likelihood is degenerate at |r| = 1");
  }
  return summary;
}

}  // namespace detail

GroupSummary summarize(const BivariateData& data) { return summarize(data.xs, data.ys); }

GroupSummary summary_from_r(Eigen::Index n, double r) {
  GroupSummary summary;
  summary.n = n;
  summary.mean_x = 0.0;
  summary.mean_y = 0.0;
  summary.var_x = 1.0;
  summary.var_y = 1.0;
  summary.r = r;
  validate(summary);
  return summary;
}

double fisher_z(double r) {
  if (!std::isfinite(r) || std::abs(r) >= 1.0) {
    throw ValidationError("fisher_z requires a correlation strictly inside (-1, 1), got " +
                          std::to_string(r));
  }
  return std::atanh(r);
}

double inv_fisher_z(double z) {
  if (!std::isfinite(z)) {
    throw ValidationError("inv_fisher_z requires a finite argument");
  }
  return std::tanh(z);
}

double donner_rosner_rf(Eigen::Index n1, double r1, Eigen::Index n2, double r2) {
  if (n1 < kMinGroupSize || n2 < kMinGroupSize) {
    throw TooFewObservationsError("group sizes must be at least " +
                                  std::to_string(kMinGroupSize));
  }
  const double w1 = static_cast<double>(n1 - 3);
  const double w2 = static_cast<double>(n2 - 3);
  return std::tanh((w1 * fisher_z(r1) + w2 * fisher_z(r2)) / (w1 + w2));
}

double donner_rosner_rf(const GroupSummary& g1, const GroupSummary& g2) {
  validate(g1);
  validate(g2);
  return donner_rosner_rf(g1.n, g1.r, g2.n, g2.r);
}

namespace {

// Residual of the pooled-correlation score equation at rho:
//   g(rho) = n1 (r1 - rho) / (1 - rho r1) + n2 (r2 - rho) / (1 - rho r2).
double pooled_score(double rho, double n1, double r1, double n2, double r2) {
  return n1 * (r1 - rho) / (1.0 - rho * r1) + n2 * (r2 - rho) / (1.0 - rho * r2);
}

// Derivative of the score in rho; strictly negative on (-1, 1) whenever
// |r_i| < 1, which makes the root unique.
double pooled_score_derivative(double rho, double n1, double r1, double n2, double r2) {
  const double d1 = 1.0 - rho * r1;
  const double d2 = 1.0 - rho * r2;
  return n1 * (r1 * r1 - 1.0) / (d1 * d1) + n2 * (r2 * r2 - 1.0) / (d2 * d2);
}

}  // namespace

double pearson_common_rho(Eigen::Index n1, double r1, Eigen::Index n2, double r2) {
  if (n1 < kMinGroupSize || n2 < kMinGroupSize) {
    throw TooFewObservationsError("group sizes must be at least " +
                                  std::to_string(kMinGroupSize));
  }
  if (std::abs(r1) >= 1.0 || std::abs(r2) >= 1.0) {
    throw DegenerateDataError("sample correlations must lie strictly inside (-1, 1)");
  }
  if (r1 == r2) {
    return r1;
  }

  const double fn1 = static_cast<double>(n1);
  const double fn2 = static_cast<double>(n2);

  // Clearing denominators in the score equation yields the quadratic
  //   A rho^2 + B rho + C = 0 with
  //   A = n1 r2 + n2 r1,  B = -(n1 + n2)(1 + r1 r2),  C = n1 r1 + n2 r2.
  const double a = fn1 * r2 + fn2 * r1;
  const double b = -(fn1 + fn2) * (1.0 + r1 * r2);
  const double c = fn1 * r1 + fn2 * r2;

  double lo = std::min(r1, r2);
  double hi = std::max(r1, r2);

  double rho = std::numeric_limits<double>::quiet_NaN();
  if (a == 0.0) {
    // Degenerate linear case (e.g. r2 = -n2 r1 / n1): B is bounded away
    // from zero, so the root is -C / B.
    rho = -c / b;
  } else {
    // Stable quadratic roots via the q formula; pick the root inside the
    // bracket [min(r1, r2), max(r1, r2)], which always contains the score
    // root because g(r1) and g(r2) have opposite signs.
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double root1 = q / a;
      const double root2 = c / q;
      if (root1 >= lo && root1 <= hi) {
        rho = root1;
      } else if (root2 >= lo && root2 <= hi) {
        rho = root2;
      }
    }
  }

  if (!std::isfinite(rho) || rho < lo || rho > hi) {
    // Fall back to bisection on the original score, which brackets the root.
    double flo = pooled_score(lo, fn1, r1, fn2, r2);
    if (flo == 0.0) return lo;
    if (pooled_score(hi, fn1, r1, fn2, r2) == 0.0) return hi;
    double blo = lo;
    double bhi = hi;
    for (int it = 0; it < 200 && bhi - blo > 1e-16; ++it) {
      const double mid = 0.5 * (blo + bhi);
      const double fmid = pooled_score(mid, fn1, r1, fn2, r2);
      if (fmid == 0.0) return mid;
      // Score is strictly decreasing: positive residual means the root is
      // to the right.
      if ((fmid > 0.0) == (flo > 0.0)) {
        blo = mid;
        flo = fmid;
      } else {
        bhi = mid;
      }
    }
    rho = 0.5 * (blo + bhi);
  }

  // Safeguarded Newton polish: the score is smooth and strictly decreasing
  // on the bracket, so one or two steps reach machine precision.
  for (int it = 0; it < 8; ++it) {
    const double f = pooled_score(rho, fn1, r1, fn2, r2);
    if (f == 0.0) break;
    const double fp = pooled_score_derivative(rho, fn1, r1, fn2, r2);
    const double step = f / fp;
    double next = rho - step;
    if (!(next >= lo && next <= hi)) {
      break;
    }
    if (next == rho) break;
    rho = next;
  }
  return std::clamp(rho, lo, hi);
}

double pearson_common_rho(const GroupSummary& g1, const GroupSummary& g2) {
  validate(g1);
  validate(g2);
  return pearson_common_rho(g1.n, g1.r, g2.n, g2.r);
}

ConstrainedFit constrained_mles(const GroupSummary& g1, const GroupSummary& g2,
                                double rho_common, RhoProvenance provenance) {
  validate(g1);
  validate(g2);
  if (!std::isfinite(rho_common) || std::abs(rho_common) >= 1.0) {
    throw ValidationError("common correlation must lie strictly inside (-1, 1), got " +
                          std::to_string(rho_common));
  }

  ConstrainedFit fit;
  fit.rho_common = rho_common;
  fit.provenance = provenance;
  const double denom = 1.0 - rho_common * rho_common;
  for (const auto* g : {&g1, &g2}) {
    GroupFit gf;
    gf.mu_x = g->mean_x;
    gf.mu_y = g->mean_y;
    // Profile maximizer of the likelihood in the scale parameters at fixed
    // rho: sigma^2 = s^2 (1 - rho r) / (1 - rho^2), identical factor for
    // both coordinates.
    const double scale = (1.0 - rho_common * g->r) / denom;
    gf.sigma2_x = g->var_x * scale;
    gf.sigma2_y = g->var_y * scale;
    if (g == &g1) {
      fit.group1 = gf;
    } else {
      fit.group2 = gf;
    }
  }
  return fit;
}

double bivariate_loglik(const GroupSummary& summary, const BivariateParams& params) {
  validate(summary);
  validate(params);

  const double n = static_cast<double>(summary.n);
  const double rho = params.rho;
  const double one_minus_rho2 = 1.0 - rho * rho;
  const double dx = summary.mean_x - params.mu_x;
  const double dy = summary.mean_y - params.mu_y;
  const double sxy = summary.r * std::sqrt(summary.var_x * summary.var_y);

  // Quadratic form of the exponent accumulated from the sufficient
  // statistics alone: sum over observations of the Mahalanobis term equals
  // n / (1 - rho^2) * [ (s_x^2 + dx^2)/sigma_x^2
  //                     - 2 rho (s_xy + dx dy)/(sigma_x sigma_y)
  //                     + (s_y^2 + dy^2)/sigma_y^2 ].
  const double q =
      n / one_minus_rho2 *
      ((summary.var_x + dx * dx) / (params.sigma_x * params.sigma_x) -
       2.0 * rho * (sxy + dx * dy) / (params.sigma_x * params.sigma_y) +
       (summary.var_y + dy * dy) / (params.sigma_y * params.sigma_y));

  return -n * (std::log(params.sigma_x) + std::log(params.sigma_y) +
               0.5 * std::log(one_minus_rho2) + std::numbers::ln2 +
               std::log(std::numbers::pi)) -
         0.5 * q;
}

BivariateParams mle_params(const GroupSummary& summary) {
  validate(summary);
  BivariateParams params;
  params.mu_x = summary.mean_x;
  params.mu_y = summary.mean_y;
  params.sigma_x = std::sqrt(summary.var_x);
  params.sigma_y = std::sqrt(summary.var_y);
  params.rho = summary.r;
  return params;
}

BivariateParams constrained_params(const ConstrainedFit& fit, int group) {
  if (group != 1 && group != 2) {
    throw ValidationError("group selector must be 1 or 2, got " + std::to_string(group));
  }
  const GroupFit& gf = group == 1 ? fit.group1 : fit.group2;
  BivariateParams params;
  params.mu_x = gf.mu_x;
  params.mu_y = gf.mu_y;
  params.sigma_x = std::sqrt(gf.sigma2_x);
  params.sigma_y = std::sqrt(gf.sigma2_y);
  params.rho = fit.rho_common;
  return params;
}

}  // namespace corrcmp
