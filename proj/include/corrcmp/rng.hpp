#pragma once

#include <cstdint>
#include <random>

#include "corrcmp/types.hpp"

namespace corrcmp {

/// Identity of a reproducible random stream.
///
/// Two streams with the same (master_seed, stream_index) always produce the
/// same variate sequence for a given build. Substreams are derived by counter
/// hashing (SplitMix64), so any number of them can be spawned without
/// coordination and the results of parallel work do not depend on scheduling.
/// Streams with distinct indices are treated as statistically independent,
/// the usual guarantee for hash-derived seeds of a large-state generator.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Derives the k-th child stream. Pure; safe to call concurrently.
  [[nodiscard]] RngStream substream(std::uint64_t k) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Stateful generator bound to one stream. Cheap to construct; not shareable
/// across concurrent tasks -- derive one stream per unit of work instead.
class RngEngine {
 public:
  explicit RngEngine(RngStream stream);

  std::mt19937_64& generator() { return generator_; }
  RngStream stream() const { return stream_; }

 private:
  RngStream stream_;
  std::mt19937_64 generator_;
};

/// One N(0,1) variate.
double draw_standard_normal(RngEngine& rng);

/// One chi-square variate with df >= 1 degrees of freedom. Strictly positive.
double draw_chi_square(int df, RngEngine& rng);

/// n paired observations from the bivariate normal with the given
/// parameters, generated through the lower-triangular factor of the
/// covariance matrix:
///
///   x = mu_x + sigma_x * z1
///   y = mu_y + sigma_y * (rho * z1 + sqrt(1 - rho^2) * z2)
///
/// with z1, z2 independent N(0,1). Requires n >= 2.
BivariateData draw_bivariate_normal_sample(Eigen::Index n, const BivariateParams& params,
                                           RngEngine& rng);

}  // namespace corrcmp
