// Acceptance gate: one line per criterion, [PASS]/[FAIL], nonzero exit if
// any criterion fails. Tolerances and runtime limits are pinned here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "corrcmp/io.hpp"
#include "corrcmp/mcsim.hpp"
#include "corrcmp/tests.hpp"

using namespace corrcmp;

namespace {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

bool g_all_pass = true;

void report(int index, const char* name, bool pass, double seconds,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", index, name,
              seconds, detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  g_all_pass = g_all_pass && pass;
}

std::string fmt(const char* pattern, double a, double b) {
  char buffer[160];
  std::snprintf(buffer, sizeof buffer, pattern, a, b);
  return buffer;
}

struct Region {
  GroupSummary g1;
  GroupSummary g2;
};

std::vector<Region> regions() {
  std::vector<Region> out;
  for (const auto& region : blood_flow_regions()) {
    out.push_back(Region{summary_from_r(region.input.n1, region.input.r1),
                         summary_from_r(region.input.n2, region.input.r2)});
  }
  return out;
}

void criterion_1() {
  Stopwatch timer;
  const auto rs = regions();
  const double p_temporal = fisher_z_test(rs[0].g1, rs[0].g2).p_value;
  const double p_subcortical = fisher_z_test(rs[1].g1, rs[1].g2).p_value;
  const double p_frontal = fisher_z_test(rs[2].g1, rs[2].g2).p_value;
  const double seconds = timer.seconds();

  const long rounded = std::lround(p_temporal * 10000.0);
  const bool pass = (rounded == 4 || rounded == 5) &&
                    std::abs(p_subcortical - 0.6018) <= 0.0005 &&
                    std::abs(p_frontal - 0.6673) <= 0.0005 && seconds < 1.0;
  report(1, "deterministic Fisher Z on the three case summaries", pass, seconds,
         fmt("p = %.6f / %.6f", p_temporal, p_subcortical) +
             fmt(" / %.6f, limit 1 s", p_frontal, 0.0));
}

void criterion_2() {
  Stopwatch timer;
  const auto rs = regions();
  std::vector<double> p(3);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    p[i] = gv_test(rs[i].g1, rs[i].g2, 100000, RngStream{0, 1000 + i}).p_value;
  }
  const double seconds = timer.seconds();
  const bool pass = std::abs(p[0] - 0.0008) <= 0.0015 && std::abs(p[1] - 0.5948) <= 0.01 &&
                    std::abs(p[2] - 0.6682) <= 0.01 && seconds < 10.0;
  report(2, "generalized-variable p-values at 1e5 draws", pass, seconds,
         fmt("p = %.6f / %.6f", p[0], p[1]) + fmt(" / %.6f, limit 10 s", p[2], 0.0));
}

void criterion_3() {
  Stopwatch timer;
  const auto rs = regions();
  std::vector<double> p(3);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    p[i] = mslr_test(rs[i].g1, rs[i].g2, BootstrapSettings{100000, RngStream{0, 2000 + i}})
               .p_value;
  }
  const double seconds = timer.seconds();
  const bool pass = std::abs(p[0] - 0.0008) <= 0.0015 && std::abs(p[1] - 0.5978) <= 0.01 &&
                    std::abs(p[2] - 0.6677) <= 0.01 && seconds < 30.0;
  report(3, "modified-SLR p-values at 1e5 bootstrap replications", pass, seconds,
         fmt("p = %.6f / %.6f", p[0], p[1]) + fmt(" / %.6f, limit 30 s", p[2], 0.0));
}

void criterion_4() {
  struct Cell {
    Eigen::Index n1;
    Eigen::Index n2;
    double rho;
    double mslr;
    double fz;
    double gv;
  };
  const std::vector<Cell> cells{{5, 5, 0.0, 0.052, 0.046, 0.052},
                                {10, 10, 0.5, 0.049, 0.049, 0.051},
                                {5, 25, 0.3, 0.048, 0.050, 0.033}};

  bool pass = true;
  std::string detail;
  double total_seconds = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Stopwatch timer;
    StudySpec spec;
    spec.sample_sizes = {{cells[c].n1, cells[c].n2}};
    spec.rho_grid = {{cells[c].rho, cells[c].rho}};
    spec.replications = 2000;
    spec.methods = {Method::mslr, Method::fisher_z, Method::gv};
    spec.bootstrap_replications = 2000;
    spec.gv_draws = 2000;
    spec.master_seed = 9000 + c;
    const StudyResult result = run_size_study(spec);
    const double seconds = timer.seconds();
    total_seconds += seconds;
    pass = pass && seconds < 600.0;

    const double expected[3] = {cells[c].mslr, cells[c].fz, cells[c].gv};
    const char* labels[3] = {"mslr", "fz", "gv"};
    for (int m = 0; m < 3; ++m) {
      const double rate = result.cells[static_cast<std::size_t>(m)].rejection_rate;
      const double tol = 3.0 * std::sqrt(expected[m] * (1.0 - expected[m]) *
                                         (1.0 / 2000.0 + 1.0 / 10000.0));
      const bool ok = std::abs(rate - expected[m]) <= tol;
      pass = pass && ok;
      detail += labels[m];
      detail += fmt(" %.3f(ref %.3f", rate, expected[m]);
      detail += fmt("+-%.3f) ", tol, 0.0);
      if (!ok) {
        detail += "<MISS> ";
      }
    }
    detail += "| ";
  }
  report(4, "empirical sizes at three reference null cells", pass, total_seconds, detail);
}

void criterion_5() {
  Stopwatch timer;
  StudySpec spec;
  spec.sample_sizes = {{5, 25}};
  spec.rho_grid = {{0.05, 0.75}, {0.05, 0.85}, {0.05, 0.95}};
  spec.replications = 2000;
  spec.methods = {Method::mslr, Method::gv};
  spec.bootstrap_replications = 2000;
  spec.gv_draws = 2000;
  spec.master_seed = 9100;
  const StudyResult result = run_power_study(spec);
  const double seconds = timer.seconds();

  bool pass = true;
  std::string detail;
  for (std::size_t ri = 0; ri < spec.rho_grid.size(); ++ri) {
    const double mslr_rate = result.cells[ri * 2 + 0].rejection_rate;
    const double gv_rate = result.cells[ri * 2 + 1].rejection_rate;
    const bool ok = mslr_rate > gv_rate;
    pass = pass && ok;
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3f%s%.3f ", mslr_rate, ok ? ">" : "<=", gv_rate);
    detail += buffer;
  }
  report(5, "unequal-size power ordering (modified SLR above GV)", pass, seconds, detail);
}

void criterion_6() {
  Stopwatch timer;
  std::mt19937 gen(606);
  std::uniform_int_distribution<int> size_dist(4, 80);
  std::uniform_real_distribution<double> r_dist(-0.95, 0.95);
  std::uniform_real_distribution<double> mean_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> var_dist(0.3, 3.0);

  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    GroupSummary g1 = summary_from_r(size_dist(gen), r_dist(gen));
    GroupSummary g2 = summary_from_r(size_dist(gen), r_dist(gen));
    g1.mean_y = mean_dist(gen);
    g1.var_x = var_dist(gen);
    g2.mean_x = mean_dist(gen);
    g2.var_y = var_dist(gen);

    const double rho = pearson_common_rho(g1, g2);
    const double slr = slr_statistic(g1, g2, rho);

    const ConstrainedFit fit = constrained_mles(g1, g2, rho, RhoProvenance::pearson_mle);
    const double deviance =
        2.0 * (bivariate_loglik(g1, mle_params(g1)) + bivariate_loglik(g2, mle_params(g2)) -
               bivariate_loglik(g1, constrained_params(fit, 1)) -
               bivariate_loglik(g2, constrained_params(fit, 2)));
    const double err = std::abs(slr * slr - deviance) / std::max(1.0, std::abs(deviance));
    worst = std::max(worst, err);
  }
  const double seconds = timer.seconds();
  const bool pass = worst <= 1e-8 && seconds < 10.0;
  report(6, "closed-form SLR equals the log-likelihood oracle", pass, seconds,
         fmt("worst relative error %.2e, limit 1e-8 (%.0f trials)", worst, 1000));
}

void criterion_7() {
  Stopwatch timer;
  const int draws = 100000;
  const Eigen::Index n = 10;
  const double rho = 0.5;

  std::vector<double> from_sampler(draws);
  RngEngine sampler_rng(RngStream{707, 0});
  for (int i = 0; i < draws; ++i) {
    from_sampler[i] = sample_r_given_rho(n, rho, sampler_rng);
  }

  std::vector<double> from_data(draws);
  RngEngine direct_rng(RngStream{707, 1});
  BivariateParams params;
  params.rho = rho;
  for (int i = 0; i < draws; ++i) {
    from_data[i] = summarize(draw_bivariate_normal_sample(n, params, direct_rng)).r;
  }

  std::sort(from_sampler.begin(), from_sampler.end());
  std::sort(from_data.begin(), from_data.end());
  double d = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < from_sampler.size() && j < from_data.size()) {
    const double x = std::min(from_sampler[i], from_data[j]);
    while (i < from_sampler.size() && from_sampler[i] <= x) ++i;
    while (j < from_data.size() && from_data[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / draws -
                             static_cast<double>(j) / draws));
  }
  const double critical = 1.6276236307187293 * std::sqrt(2.0 / draws);
  const double seconds = timer.seconds();
  const bool pass = d <= critical && seconds < 60.0;
  report(7, "sampler indistinguishable from direct simulation (KS, alpha 0.01)", pass,
         seconds, fmt("D = %.5f, critical %.5f", d, critical));
}

void criterion_8() {
  Stopwatch timer;
  std::mt19937 gen(808);
  std::uniform_int_distribution<int> size_dist(4, 200);
  std::uniform_real_distribution<double> r_dist(-0.99, 0.99);

  double worst = 0.0;
  bool bracketed = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n1 = size_dist(gen);
    const int n2 = size_dist(gen);
    const double r1 = r_dist(gen);
    const double r2 = r_dist(gen);
    const double rho = pearson_common_rho(n1, r1, n2, r2);
    bracketed = bracketed && rho >= std::min(r1, r2) && rho <= std::max(r1, r2);
    const double residual = std::abs(n1 * (r1 - rho) / (1.0 - rho * r1) +
                                     n2 * (r2 - rho) / (1.0 - rho * r2));
    worst = std::max(worst, residual);
  }
  const double seconds = timer.seconds();
  const bool pass = worst < 1e-12 && bracketed && seconds < 5.0;
  report(8, "pooled-correlation root residual and bracket", pass, seconds,
         fmt("worst residual %.2e, limit 1e-12 (%.0f trials)", worst, 10000));
}

void criterion_9() {
  Stopwatch timer;
  bool pass = true;
  std::string detail;
  auto require = [&](bool ok, const char* what) {
    if (!ok) {
      pass = false;
      detail += what;
      detail += "; ";
    }
  };

  // Exchangeability: swapping the groups flips every statistic's sign and
  // preserves every p-value bit-for-bit.
  const GroupSummary g1 = summary_from_r(5, 0.1);
  const GroupSummary g2 = summary_from_r(25, 0.7);
  const BootstrapSettings boot{1000, RngStream{909, 0}};
  const TestOutcome ms_f = mslr_test(g1, g2, boot);
  const TestOutcome ms_b = mslr_test(g2, g1, boot);
  require(ms_f.p_value == ms_b.p_value && *ms_f.statistic == -*ms_b.statistic,
          "mslr exchangeability");
  const TestOutcome fz_f = fisher_z_test(g1, g2);
  const TestOutcome fz_b = fisher_z_test(g2, g1);
  require(fz_f.p_value == fz_b.p_value && *fz_f.statistic == -*fz_b.statistic,
          "fisher exchangeability");
  const TestOutcome sl_f = slr_test(g1, g2);
  const TestOutcome sl_b = slr_test(g2, g1);
  require(sl_f.p_value == sl_b.p_value && *sl_f.statistic == -*sl_b.statistic,
          "slr exchangeability");
  const TestOutcome gv_f = gv_test(g1, g2, 2000, RngStream{909, 1});
  const TestOutcome gv_b = gv_test(g2, g1, 2000, RngStream{909, 1});
  require(gv_f.p_value == gv_b.p_value, "gv exchangeability");

  // Affine invariance: only (n, r) matter.
  GroupSummary h1 = summary_from_r(10, 0.3);
  GroupSummary h2 = summary_from_r(15, 0.6);
  const TestOutcome base = mslr_test(h1, h2, boot);
  const TestOutcome base_gv = gv_test(h1, h2, 2000, RngStream{909, 2});
  h1.mean_x = 250.0;
  h1.var_y = 40.0;
  h2.mean_y = -3.5;
  h2.var_x = 0.01;
  const TestOutcome moved = mslr_test(h1, h2, boot);
  const TestOutcome moved_gv = gv_test(h1, h2, 2000, RngStream{909, 2});
  require(base.p_value == moved.p_value && *base.statistic == *moved.statistic,
          "mslr affine invariance");
  require(base_gv.p_value == moved_gv.p_value, "gv affine invariance");

  // p-values stay inside [0, 1].
  std::mt19937 gen(909);
  std::uniform_int_distribution<int> size_dist(4, 30);
  std::uniform_real_distribution<double> r_dist(-0.9, 0.9);
  for (int trial = 0; trial < 20; ++trial) {
    const GroupSummary a = summary_from_r(size_dist(gen), r_dist(gen));
    const GroupSummary b = summary_from_r(size_dist(gen), r_dist(gen));
    const double ps[4] = {
        fisher_z_test(a, b).p_value, slr_test(a, b).p_value,
        mslr_test(a, b, BootstrapSettings{200, RngStream{910, (std::uint64_t)trial}}).p_value,
        gv_test(a, b, 1000, RngStream{911, (std::uint64_t)trial}).p_value};
    for (double p : ps) {
      require(p >= 0.0 && p <= 1.0, "p in [0, 1]");
    }
  }

  // Equal observed correlations put the SLR statistic exactly at zero.
  const GroupSummary e1 = summary_from_r(12, 0.4);
  const GroupSummary e2 = summary_from_r(30, 0.4);
  require(slr_statistic(e1, e2, pearson_common_rho(e1, e2)) == 0.0, "r1=r2 gives SLR=0");
  require(*slr_test(e1, e2).statistic == 0.0, "r1=r2 gives SLR=0 via slr_test");

  // Determinism under fixed seeds.
  const TestOutcome again = mslr_test(g1, g2, boot);
  require(*again.statistic == *ms_f.statistic && again.p_value == ms_f.p_value,
          "mslr determinism");
  const TestOutcome gv_again = gv_test(g1, g2, 2000, RngStream{909, 1});
  require(gv_again.p_value == gv_f.p_value, "gv determinism");

  report(9, "property bundle (exchangeability, invariance, bounds, determinism)", pass,
         timer.seconds(), detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  std::printf("%s\n", g_all_pass ? "all criteria passed" : "SOME CRITERIA FAILED");
  return g_all_pass ? 0 : 1;
}
