#pragma once

#include <span>
#include <string>
#include <string_view>

#include "corrcmp/mcsim.hpp"
#include "corrcmp/tests.hpp"

namespace corrcmp {

/// Published summary statistics of two groups.
struct SummaryInput {
  Eigen::Index n1 = 0;
  double r1 = 0.0;
  Eigen::Index n2 = 0;
  double r2 = 0.0;
};

/// Reads a two-column numeric CSV (columns x,y; optional header row) into
/// paired columns. Distinct diagnostics: missing file, non-numeric cell and
/// ragged row (ParseError, naming the row), too few rows and constant
/// columns (ValidationError subclasses).
BivariateData ingest_csv(const std::string& path, bool has_header);

struct TestRequest {
  std::vector<Method> methods{Method::mslr, Method::gv, Method::fisher_z};
  double alpha = 0.05;
  int bootstrap_replications = 10000;
  int gv_draws = 10000;
  std::uint64_t seed = 0;
  /// Common-correlation estimator for the SLR-family methods; unset keeps
  /// each method's default (mslr: donner_rosner, slr: pearson_mle).
  std::optional<RhoProvenance> rho_estimator;
};

struct ReportMeta {
  std::uint64_t seed = 0;
  int bootstrap_replications = 0;
  int gv_draws = 0;
  double alpha = 0.05;
  std::string version;
  SummaryInput input;
};

/// Outcomes of the requested methods plus everything needed to reproduce
/// the run bit-for-bit.
struct Report {
  std::vector<TestOutcome> outcomes;
  ReportMeta meta;
};

Report run_test(const SummaryInput& input, const TestRequest& request);
Report run_test(const BivariateData& group1, const BivariateData& group2,
                const TestRequest& request);

/// Machine-readable rendering: one JSON object per outcome with full double
/// precision, schema {method, statistic|null, p_value, detail{...},
/// meta{seed, m, draws, version, ...}}.
std::string render_json(const Report& report);

/// Aligned text table, four decimal places, with the reject / fail-to-reject
/// decision at the report's alpha.
std::string render_text(const Report& report);

enum class ReproduceTarget { table1, table2_1, table2_2, table4 };
enum class StudyScale { desk, full };

std::optional<ReproduceTarget> reproduce_target_from_name(std::string_view name);

/// Study layout behind a grid target (table1, table2_1, table2_2): the
/// built-in sample-size pairs and correlation grid at the requested scale.
/// Desk scale: 2000 replications, 2000 bootstrap replications / GV draws;
/// full scale: 10000 of each.
StudySpec reproduce_spec(ReproduceTarget target, StudyScale scale, std::uint64_t seed,
                         int workers);

/// Runs a reproduction target and renders it as CSV (rates plus Monte Carlo
/// standard errors). table4 runs the embedded real-data summaries at 1e5
/// bootstrap replications / GV draws regardless of scale.
std::string reproduce_csv(ReproduceTarget target, StudyScale scale, std::uint64_t seed,
                          int workers);

/// CSV rendering of a finished study, one row per (sizes, method), one rate
/// column and one standard-error column per grid point.
std::string study_csv(const StudyResult& result);

/// Embedded real-data example: correlations between a verbal memory score
/// and the laterality of blood flow in three brain regions, for one group of
/// 14 men (r1) and one of 14 women (r2).
struct RegionSummary {
  std::string_view region;
  SummaryInput input;
};
std::span<const RegionSummary> blood_flow_regions();

}  // namespace corrcmp
