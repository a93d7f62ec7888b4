#pragma once

#include <optional>
#include <string_view>
#include <variant>

#include "corrcmp/estimators.hpp"
#include "corrcmp/rng.hpp"
#include "corrcmp/types.hpp"

namespace corrcmp {

enum class Method { mslr, slr, fisher_z, gv };

std::string_view method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

/// Settings of the parametric bootstrap behind the MSLR test.
struct BootstrapSettings {
  int replications = 10000;  ///< >= 100
  RngStream seed;
};

struct MslrDetail {
  double mean_slr = 0.0;  ///< bootstrap mean of the replicate statistics
  double var_slr = 0.0;   ///< bootstrap variance, strictly positive
  int replications = 0;
  RngStream seed;
  int redraws = 0;  ///< replicates redrawn because |r*| reached 1 numerically
};

struct GvDetail {
  int draws = 0;
  double p_less = 0.0;     ///< estimated P(G < 0)
  double p_greater = 0.0;  ///< estimated P(G > 0)
};

struct FisherZDetail {
  double z1 = 0.0;
  double z2 = 0.0;
};

struct SlrDetail {
  double rho_common = 0.0;
  RhoProvenance provenance = RhoProvenance::pearson_mle;
};

/// Result of one two-sided test of equal correlations.
struct TestOutcome {
  Method method = Method::fisher_z;
  std::optional<double> statistic;  ///< absent for the generalized-variable test
  double p_value = 1.0;
  std::variant<std::monostate, MslrDetail, GvDetail, FisherZDetail, SlrDetail> detail;
};

/// t / sqrt(t^2 + w^2): maps a signed component and an orthogonal magnitude
/// to a correlation-like value, strictly inside (-1, 1) for w != 0 and
/// shrinking toward 0 as |w| grows. Shared by the sample-correlation sampler
/// and the generalized pivot.
double correlation_projection(double t, double w);

/// Two-sided p-value of an asymptotically standard normal statistic:
/// 2 (1 - Phi(|z|)).
double slr_p_value(double z);

/// Signed log-likelihood-ratio statistic for a supplied common-correlation
/// estimate:
///
///   sign(r1 - r2) * sqrt( sum_i n_i log( (1 - rho r_i)^2 /
///                                        ((1 - r_i^2)(1 - rho^2)) ) )
///
/// Each log term is nonnegative for any rho in (-1, 1); the radicand is
/// clamped to zero only when rounding leaves it within 1e-12 of zero, and a
/// larger negative value raises NumericError.
double slr_statistic(const GroupSummary& g1, const GroupSummary& g2, double rho_common);

/// One draw of the sample correlation of n bivariate-normal observations
/// with population correlation rho, through the triangular-factor
/// representation
///
///   R = (rho* V + N) / sqrt((rho* V + N)^2 + W^2),  rho* = rho/sqrt(1-rho^2)
///
/// with V^2 ~ chi2(n-1), W^2 ~ chi2(n-2), N ~ N(0,1) drawn in that order.
/// Requires n >= 4. The result is strictly inside (-1, 1).
double sample_r_given_rho(Eigen::Index n, double rho, RngEngine& rng);

/// Plain signed log-likelihood-ratio test with the asymptotic N(0,1)
/// p-value. The common correlation comes from the selected estimator.
TestOutcome slr_test(const GroupSummary& g1, const GroupSummary& g2,
                     RhoProvenance estimator = RhoProvenance::pearson_mle);

/// Modified signed log-likelihood-ratio test. The observed statistic is
/// recentred and rescaled by the mean and variance of replicate statistics
/// from a parametric bootstrap at the pooled correlation estimate; the
/// p-value is the two-sided normal tail of the result. Deterministic given
/// the settings, and invariant under swapping the two groups (the statistic
/// changes sign, the p-value is unchanged bit-for-bit).
TestOutcome mslr_test(const GroupSummary& g1, const GroupSummary& g2,
                      const BootstrapSettings& boot,
                      RhoProvenance estimator = RhoProvenance::donner_rosner);

/// Two-sample Fisher Z test: FZ = (z1 - z2) / sqrt(1/(n1-3) + 1/(n2-3)),
/// compared against the standard normal.
TestOutcome fisher_z_test(const GroupSummary& g1, const GroupSummary& g2);

/// Generalized-test-variable test. Each draw builds per-group pivots
///
///   G_i = (r_i* W_i - Z_i) / sqrt((r_i* W_i - Z_i)^2 + V_i^2),
///   r_i* = r_i / sqrt(1 - r_i^2),
///
/// with V_i^2 ~ chi2(n_i-1), W_i^2 ~ chi2(n_i-2), Z_i ~ N(0,1) drawn in that
/// order, and the p-value is 2 min{P(G < 0), P(G > 0)} for G = G_1 - G_2
/// (draws landing exactly on 0 count to neither side). Requires
/// draws >= 1000. Deterministic given the stream and group-order invariant
/// in the same sense as mslr_test.
TestOutcome gv_test(const GroupSummary& g1, const GroupSummary& g2, int draws, RngStream stream);

}  // namespace corrcmp
