#pragma once

#include <cstdint>
#include <vector>

#include "corrcmp/tests.hpp"
#include "corrcmp/types.hpp"

namespace corrcmp {

struct SampleSizes {
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
};

struct RhoPair {
  double rho1 = 0.0;
  double rho2 = 0.0;
};

/// Grid specification of a size or power study. Every (sizes x rho) cell is
/// simulated `replications` times; each replication generates two
/// independent bivariate-normal samples (means 0, unit variances -- the
/// tests depend on the data only through (n, r), so nuisance parameters are
/// without loss of generality), runs every requested method on the same
/// samples, and records rejections at level alpha.
struct StudySpec {
  std::vector<SampleSizes> sample_sizes;
  std::vector<RhoPair> rho_grid;
  int replications = 2000;
  double alpha = 0.05;
  std::vector<Method> methods{Method::mslr, Method::fisher_z, Method::gv};
  int bootstrap_replications = 2000;
  int gv_draws = 2000;
  std::uint64_t master_seed = 0;
  /// Worker threads; 0 means hardware concurrency. Results are identical
  /// for every worker count: each replication runs on its own derived
  /// stream and reduction is in replication order.
  int workers = 0;
};

struct StudyCell {
  Eigen::Index n1 = 0;
  Eigen::Index n2 = 0;
  double rho1 = 0.0;
  double rho2 = 0.0;
  Method method = Method::fisher_z;
  double rejection_rate = 0.0;
  int replications = 0;
  double standard_error = 0.0;     ///< sqrt(rate (1 - rate) / replications)
  long degenerate_redraws = 0;     ///< data redraws in this cell (shared across methods)
};

struct StudyResult {
  StudySpec spec;
  std::vector<StudyCell> cells;
};

/// Actual-size study: requires rho1 == rho2 at every grid point.
StudyResult run_size_study(const StudySpec& spec);

/// Power study over arbitrary (rho1, rho2) grid points.
StudyResult run_power_study(const StudySpec& spec);

}  // namespace corrcmp
