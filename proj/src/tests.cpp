#include "corrcmp/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "corrcmp/errors.hpp"

namespace corrcmp {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::mslr:
      return "mslr";
    case Method::slr:
      return "slr";
    case Method::fisher_z:
      return "fisher_z";
    case Method::gv:
      return "gv";
  }
  throw ValidationError("unknown method");
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "mslr") return Method::mslr;
  if (name == "slr") return Method::slr;
  if (name == "fisher_z" || name == "fisher-z") return Method::fisher_z;
  if (name == "gv") return Method::gv;
  return std::nullopt;
}

double correlation_projection(double t, double w) {
  return t / std::hypot(t, w);
}

double slr_p_value(double z) {
  if (!std::isfinite(z)) {
    throw ValidationError("test statistic must be finite");
  }
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

double slr_statistic(const GroupSummary& g1, const GroupSummary& g2, double rho_common) {
  validate(g1);
  validate(g2);
  if (!std::isfinite(rho_common) || std::abs(rho_common) >= 1.0) {
    throw ValidationError("common correlation must lie strictly inside (-1, 1), got " +
                          std::to_string(rho_common));
  }

  const double one_minus_rho2 = 1.0 - rho_common * rho_common;
  double radicand = 0.0;
  for (const auto* g : {&g1, &g2}) {
    const double num = 1.0 - rho_common * g->r;
    // (1 - rho r)^2 - (1 - r^2)(1 - rho^2) = (rho - r)^2 >= 0, so each term
    // is nonnegative up to rounding.
    const double term = std::log(num * num / ((1.0 - g->r * g->r) * one_minus_rho2));
    radicand += static_cast<double>(g->n) * term;
  }
  if (radicand < 0.0) {
    if (radicand < -1e-12) {
      throw NumericError("negative likelihood-ratio deviance " + std::to_string(radicand));
    }
    radicand = 0.0;
  }
  const double sign = g1.r > g2.r ? 1.0 : (g1.r < g2.r ? -1.0 : 0.0);
  return sign * std::sqrt(radicand);
}

double sample_r_given_rho(Eigen::Index n, double rho, RngEngine& rng) {
  if (n < kMinGroupSize) {
    throw TooFewObservationsError("sample size must be at least " +
                                  std::to_string(kMinGroupSize) + ", got " +
                                  std::to_string(n));
  }
  if (!std::isfinite(rho) || std::abs(rho) >= 1.0) {
    throw ValidationError("population correlation must lie strictly inside (-1, 1), got " +
                          std::to_string(rho));
  }
  const double rho_star = rho / std::sqrt(1.0 - rho * rho);
  const double v = std::sqrt(draw_chi_square(static_cast<int>(n) - 1, rng));
  const double w = std::sqrt(draw_chi_square(static_cast<int>(n) - 2, rng));
  const double z = draw_standard_normal(rng);
  return correlation_projection(rho_star * v + z, w);
}

TestOutcome slr_test(const GroupSummary& g1, const GroupSummary& g2, RhoProvenance estimator) {
  validate(g1);
  validate(g2);
  const double rho = estimator == RhoProvenance::pearson_mle
                         ? pearson_common_rho(g1, g2)
                         : donner_rosner_rf(g1, g2);
  TestOutcome out;
  out.method = Method::slr;
  out.statistic = slr_statistic(g1, g2, rho);
  out.p_value = slr_p_value(*out.statistic);
  out.detail = SlrDetail{rho, estimator};
  return out;
}

namespace {

// Lexicographic key used to run order-sensitive Monte Carlo work on a
// canonical arrangement of the two groups, so that swapping the arguments
// cannot change any drawn variate.
bool canonical_order(const GroupSummary& a, const GroupSummary& b) {
  return std::tie(a.n, a.r, a.mean_x, a.mean_y, a.var_x, a.var_y) <=
         std::tie(b.n, b.r, b.mean_x, b.mean_y, b.var_x, b.var_y);
}

double estimate_common_rho(Eigen::Index n1, double r1, Eigen::Index n2, double r2,
                           RhoProvenance estimator) {
  return estimator == RhoProvenance::pearson_mle ? pearson_common_rho(n1, r1, n2, r2)
                                                 : donner_rosner_rf(n1, r1, n2, r2);
}

// Draws one group's replicate correlation, retrying while rounding lands it
// on +-1 (summaries with |r| = 1 are outside every estimator's domain).
// Retries continue the same engine, so the procedure stays deterministic.
double sample_replicate_r(Eigen::Index n, double rho, RngEngine& rng, int& redraws) {
  constexpr int kMaxRedraws = 1000;
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const double r = sample_r_given_rho(n, rho, rng);
    if (1.0 - std::abs(r) >= 1e-12) {
      return r;
    }
    ++redraws;
  }
  throw NumericError("bootstrap sampler kept producing |r| = 1");
}

}  // namespace

TestOutcome mslr_test(const GroupSummary& g1, const GroupSummary& g2,
                      const BootstrapSettings& boot, RhoProvenance estimator) {
  validate(g1);
  validate(g2);
  if (boot.replications < 100) {
    throw ValidationError("bootstrap replications must be at least 100, got " +
                          std::to_string(boot.replications));
  }

  const bool keep_order = canonical_order(g1, g2);
  const GroupSummary& a = keep_order ? g1 : g2;
  const GroupSummary& b = keep_order ? g2 : g1;

  const double rho_hat = estimate_common_rho(a.n, a.r, b.n, b.r, estimator);
  const double slr0 = slr_statistic(a, b, rho_hat);

  // Parametric bootstrap at the pooled estimate: each replicate draws one
  // correlation per group, re-estimates the pooled value, and recomputes the
  // statistic. Mean and variance are accumulated by Welford's recurrence in
  // replicate order.
  int redraws = 0;
  double mean = 0.0;
  double m2 = 0.0;
  for (int rep = 0; rep < boot.replications; ++rep) {
    RngEngine rng(boot.seed.substream(static_cast<std::uint64_t>(rep)));
    const double ra = sample_replicate_r(a.n, rho_hat, rng, redraws);
    const double rb = sample_replicate_r(b.n, rho_hat, rng, redraws);
    const double rho_rep = estimate_common_rho(a.n, ra, b.n, rb, estimator);
    const double slr =
        slr_statistic(summary_from_r(a.n, ra), summary_from_r(b.n, rb), rho_rep);
    const double delta = slr - mean;
    mean += delta / static_cast<double>(rep + 1);
    m2 += delta * (slr - mean);
  }
  const double var = m2 / static_cast<double>(boot.replications - 1);
  if (!(var > 0.0)) {
    throw NumericError("bootstrap variance of the statistic is not positive");
  }

  const double standardized = (slr0 - mean) / std::sqrt(var);
  TestOutcome out;
  out.method = Method::mslr;
  // The canonical arrangement only ever flips the sign of every statistic in
  // sight, so the user-order result is the sign-restored standardization.
  out.statistic = keep_order ? standardized : -standardized;
  out.p_value = slr_p_value(standardized);
  out.detail = MslrDetail{mean, var, boot.replications, boot.seed, redraws};
  return out;
}

TestOutcome fisher_z_test(const GroupSummary& g1, const GroupSummary& g2) {
  validate(g1);
  validate(g2);
  const double z1 = fisher_z(g1.r);
  const double z2 = fisher_z(g2.r);
  const double se = std::sqrt(1.0 / static_cast<double>(g1.n - 3) +
                              1.0 / static_cast<double>(g2.n - 3));
  TestOutcome out;
  out.method = Method::fisher_z;
  out.statistic = (z1 - z2) / se;
  out.p_value = slr_p_value(*out.statistic);
  out.detail = FisherZDetail{z1, z2};
  return out;
}

TestOutcome gv_test(const GroupSummary& g1, const GroupSummary& g2, int draws,
                    RngStream stream) {
  validate(g1);
  validate(g2);
  if (draws < 1000) {
    throw ValidationError("generalized-variable draws must be at least 1000, got " +
                          std::to_string(draws));
  }

  const bool keep_order = canonical_order(g1, g2);
  const GroupSummary& a = keep_order ? g1 : g2;
  const GroupSummary& b = keep_order ? g2 : g1;

  const double ra_star = a.r / std::sqrt(1.0 - a.r * a.r);
  const double rb_star = b.r / std::sqrt(1.0 - b.r * b.r);

  long less = 0;
  long greater = 0;
  for (int j = 0; j < draws; ++j) {
    RngEngine rng(stream.substream(static_cast<std::uint64_t>(j)));
    double g[2];
    for (int k = 0; k < 2; ++k) {
      const Eigen::Index n = k == 0 ? a.n : b.n;
      const double r_star = k == 0 ? ra_star : rb_star;
      const double v = std::sqrt(draw_chi_square(static_cast<int>(n) - 1, rng));
      const double w = std::sqrt(draw_chi_square(static_cast<int>(n) - 2, rng));
      const double z = draw_standard_normal(rng);
      g[k] = correlation_projection(r_star * w - z, v);
    }
    const double diff = g[0] - g[1];
    if (diff < 0.0) {
      ++less;
    } else if (diff > 0.0) {
      ++greater;
    }
  }

  double p_less = static_cast<double>(less) / static_cast<double>(draws);
  double p_greater = static_cast<double>(greater) / static_cast<double>(draws);
  if (!keep_order) {
    std::swap(p_less, p_greater);
  }

  TestOutcome out;
  out.method = Method::gv;
  out.statistic = std::nullopt;
  out.p_value = 2.0 * std::min(p_less, p_greater);
  out.detail = GvDetail{draws, p_less, p_greater};
  return out;
}

}  // namespace corrcmp
