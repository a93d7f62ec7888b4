#include "corrcmp/rng.hpp"

#include <cmath>
#include <random>

#include "corrcmp/errors.hpp"

namespace corrcmp {

namespace {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). Bijective on 64-bit
// words, so distinct inputs never collide.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Combines a stream key with a child index. The +1 keeps substream(0) away
// from the identity so a stream and its first child never share a key.
std::uint64_t mix(std::uint64_t key, std::uint64_t child) {
  return splitmix64(key + 0x9e3779b97f4a7c15ull * (child + 1));
}

}  // namespace

RngStream RngStream::substream(std::uint64_t k) const {
  return RngStream{master_seed, mix(stream_index, k)};
}

RngEngine::RngEngine(RngStream stream)
    : stream_(stream), generator_(mix(splitmix64(stream.master_seed), stream.stream_index)) {}

double draw_standard_normal(RngEngine& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng.generator());
}

double draw_chi_square(int df, RngEngine& rng) {
  if (df < 1) {
    throw ValidationError("chi-square degrees of freedom must be at least 1, got " +
                          std::to_string(df));
  }
  std::chi_squared_distribution<double> chisq(static_cast<double>(df));
  return chisq(rng.generator());
}

BivariateData draw_bivariate_normal_sample(Eigen::Index n, const BivariateParams& params,
                                           RngEngine& rng) {
  if (n < 2) {
    throw TooFewObservationsError("bivariate sample size must be at least 2, got " +
                                  std::to_string(n));
  }
  validate(params);

  // Triangular factor of the covariance: X = mu_x + sigma_x * U,
  // Y = mu_y + sigma_y * (rho * U + sqrt(1 - rho^2) * V) with U, V iid N(0,1).
  const double tail = std::sqrt(1.0 - params.rho * params.rho);
  BivariateData data;
  data.xs.resize(n);
  data.ys.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = draw_standard_normal(rng);
    const double v = draw_standard_normal(rng);
    data.xs[i] = params.mu_x + params.sigma_x * u;
    data.ys[i] = params.mu_y + params.sigma_y * (params.rho * u + tail * v);
  }
  return data;
}

}  // namespace corrcmp
