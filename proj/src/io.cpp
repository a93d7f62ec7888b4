#include "corrcmp/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "corrcmp/errors.hpp"
#include "corrcmp/version.hpp"

namespace corrcmp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t row, int column) {
  const std::string_view field = trim(cell);
  std::string_view digits = field;
  if (!digits.empty() && digits.front() == '+') {
    digits.remove_prefix(1);  // from_chars rejects an explicit plus sign
  }
  double value = 0.0;
  const char* end = digits.data() + digits.size();
  const auto [ptr, ec] = std::from_chars(digits.data(), end, value);
  if (ec != std::errc{} || ptr != end || digits.empty()) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                     ": cannot parse '" + std::string(field) + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column " + std::to_string(column) +
                     ": non-finite value '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

BivariateData ingest_csv(const std::string& path, bool has_header) {
  std::ifstream file(path);
  if (!file) {
    throw ParseError("cannot open '" + path + "'");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  std::string line;
  std::size_t row = 0;
  bool header_pending = has_header;
  while (std::getline(file, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) {
      continue;
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = view.find(',', start);
      if (comma == std::string_view::npos) {
        fields.push_back(view.substr(start));
        break;
      }
      fields.push_back(view.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 2) {
      throw ParseError("row " + std::to_string(row) + ": expected 2 comma-separated values, got " +
                       std::to_string(fields.size()));
    }
    xs.push_back(parse_cell(fields[0], row, 1));
    ys.push_back(parse_cell(fields[1], row, 2));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  if (n < kMinGroupSize) {
    throw TooFewObservationsError("'" + path + "' has " + std::to_string(n) +
                                  " data rows; at least " + std::to_string(kMinGroupSize) +
                                  " are required");
  }
  BivariateData data;
  data.xs = Eigen::Map<const Eigen::VectorXd>(xs.data(), n);
  data.ys = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
  return data;
}

namespace {

void validate_request(const TestRequest& request) {
  if (request.methods.empty()) {
    throw ValidationError("at least one method is required");
  }
  if (!(request.alpha > 0.0) || request.alpha > 1.0) {
    throw ValidationError("alpha must lie in (0, 1], got " + std::to_string(request.alpha));
  }
  for (Method m : request.methods) {
    if (m == Method::mslr && request.bootstrap_replications < 100) {
      throw ValidationError("bootstrap replications must be at least 100, got " +
                            std::to_string(request.bootstrap_replications));
    }
    if (m == Method::gv && request.gv_draws < 1000) {
      throw ValidationError("generalized-variable draws must be at least 1000, got " +
                            std::to_string(request.gv_draws));
    }
  }
}

Report run_test_impl(const GroupSummary& s1, const GroupSummary& s2,
                     const TestRequest& request) {
  validate_request(request);

  // Fixed substream index per role, so the bootstrap and the generalized
  // pivot draws do not depend on which other methods were also requested.
  const RngStream root{request.seed, 0};

  Report report;
  for (Method m : request.methods) {
    switch (m) {
      case Method::mslr:
        report.outcomes.push_back(
            mslr_test(s1, s2,
                      BootstrapSettings{request.bootstrap_replications, root.substream(1)},
                      request.rho_estimator.value_or(RhoProvenance::donner_rosner)));
        break;
      case Method::slr:
        report.outcomes.push_back(
            slr_test(s1, s2, request.rho_estimator.value_or(RhoProvenance::pearson_mle)));
        break;
      case Method::fisher_z:
        report.outcomes.push_back(fisher_z_test(s1, s2));
        break;
      case Method::gv:
        report.outcomes.push_back(gv_test(s1, s2, request.gv_draws, root.substream(2)));
        break;
    }
  }

  report.meta.seed = request.seed;
  report.meta.bootstrap_replications = request.bootstrap_replications;
  report.meta.gv_draws = request.gv_draws;
  report.meta.alpha = request.alpha;
  report.meta.version = kVersion;
  report.meta.input = SummaryInput{s1.n, s1.r, s2.n, s2.r};
  return report;
}

}  // namespace

Report run_test(const SummaryInput& input, const TestRequest& request) {
  return run_test_impl(summary_from_r(input.n1, input.r1), summary_from_r(input.n2, input.r2),
                       request);
}

Report run_test(const BivariateData& group1, const BivariateData& group2,
                const TestRequest& request) {
  return run_test_impl(summarize(group1), summarize(group2), request);
}

namespace {

using nlohmann::json;

json detail_json(const TestOutcome& out) {
  json j = json::object();
  if (const auto* d = std::get_if<MslrDetail>(&out.detail)) {
    j["mean_slr"] = d->mean_slr;
    j["var_slr"] = d->var_slr;
    j["replications"] = d->replications;
    j["seed"] = {{"master_seed", d->seed.master_seed},
                 {"stream_index", d->seed.stream_index}};
    j["redraws"] = d->redraws;
  } else if (const auto* g = std::get_if<GvDetail>(&out.detail)) {
    j["draws"] = g->draws;
    j["p_less"] = g->p_less;
    j["p_greater"] = g->p_greater;
  } else if (const auto* f = std::get_if<FisherZDetail>(&out.detail)) {
    j["z1"] = f->z1;
    j["z2"] = f->z2;
  } else if (const auto* s = std::get_if<SlrDetail>(&out.detail)) {
    j["rho_common"] = s->rho_common;
    j["estimator"] =
        s->provenance == RhoProvenance::pearson_mle ? "pearson_mle" : "donner_rosner";
  }
  return j;
}

}  // namespace

std::string render_json(const Report& report) {
  json arr = json::array();
  for (const auto& out : report.outcomes) {
    json j;
    j["method"] = std::string(method_name(out.method));
    if (out.statistic) {
      j["statistic"] = *out.statistic;
    } else {
      j["statistic"] = nullptr;
    }
    j["p_value"] = out.p_value;
    j["detail"] = detail_json(out);
    j["meta"] = {{"seed", report.meta.seed},
                 {"m", report.meta.bootstrap_replications},
                 {"draws", report.meta.gv_draws},
                 {"version", report.meta.version},
                 {"alpha", report.meta.alpha},
                 {"n1", report.meta.input.n1},
                 {"r1", report.meta.input.r1},
                 {"n2", report.meta.input.n2},
                 {"r2", report.meta.input.r2}};
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string render_text(const Report& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  const SummaryInput& in = report.meta.input;
  os << "group 1: n = " << in.n1 << ", r = " << in.r1 << "\n";
  os << "group 2: n = " << in.n2 << ", r = " << in.r2 << "\n";
  os << "alpha = " << report.meta.alpha << ", seed = " << report.meta.seed << "\n";
  os << "\n";
  os << std::left << std::setw(10) << "method" << std::right << std::setw(12) << "statistic"
     << std::setw(12) << "p-value"
     << "  decision\n";
  for (const auto& out : report.outcomes) {
    os << std::left << std::setw(10) << method_name(out.method) << std::right;
    if (out.statistic) {
      os << std::setw(12) << *out.statistic;
    } else {
      os << std::setw(12) << "-";
    }
    os << std::setw(12) << out.p_value << "  "
       << (out.p_value <= report.meta.alpha ? "reject" : "fail to reject") << "\n";
  }
  return os.str();
}

std::optional<ReproduceTarget> reproduce_target_from_name(std::string_view name) {
  if (name == "table1") return ReproduceTarget::table1;
  if (name == "table2_1" || name == "table2.1") return ReproduceTarget::table2_1;
  if (name == "table2_2" || name == "table2.2") return ReproduceTarget::table2_2;
  if (name == "table4") return ReproduceTarget::table4;
  return std::nullopt;
}

StudySpec reproduce_spec(ReproduceTarget target, StudyScale scale, std::uint64_t seed,
                         int workers) {
  StudySpec spec;
  spec.master_seed = seed;
  spec.workers = workers;
  const int budget = scale == StudyScale::desk ? 2000 : 10000;
  spec.replications = budget;
  spec.bootstrap_replications = budget;
  spec.gv_draws = budget;
  spec.methods = {Method::mslr, Method::fisher_z, Method::gv};

  switch (target) {
    case ReproduceTarget::table1:
      spec.sample_sizes = {{5, 5}, {5, 10}, {10, 10}, {5, 15}, {5, 25}};
      for (int i = 0; i < 10; ++i) {
        const double rho = static_cast<double>(i) / 10.0;
        spec.rho_grid.push_back({rho, rho});
      }
      break;
    case ReproduceTarget::table2_1:
    case ReproduceTarget::table2_2: {
      spec.sample_sizes = {{5, 5},  {5, 10},  {10, 10}, {15, 10},
                           {5, 15}, {5, 25}, {20, 20}, {25, 25}};
      const double sign = target == ReproduceTarget::table2_1 ? 1.0 : -1.0;
      for (int i = 0; i < 9; ++i) {
        const double rho2 = static_cast<double>(15 + 10 * i) / 100.0;
        spec.rho_grid.push_back({0.05, sign * rho2});
      }
      break;
    }
    case ReproduceTarget::table4:
      throw ValidationError("table4 reproduces the case analyses, not a simulation grid");
  }
  return spec;
}

namespace {

std::string format_rho(double value) {
  std::ostringstream os;
  os << value;  // default precision keeps grid values like 0.15 short
  return os.str();
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Monte Carlo standard error of the MSLR p-value by the delta method: the
// bootstrap mean contributes var/M and the bootstrap variance 2 var^2 / M to
// the standardized statistic, so Var(T) ~ (1 + T^2/2) / M, and the two-sided
// normal p-value has derivative 2 phi(|T|).
double mslr_p_standard_error(const TestOutcome& out) {
  const auto& d = std::get<MslrDetail>(out.detail);
  const double t = std::abs(*out.statistic);
  const double sd_t = std::sqrt((1.0 + 0.5 * t * t) / static_cast<double>(d.replications));
  return 2.0 * normal_pdf(t) * sd_t;
}

// Binomial standard error of the smaller tail, doubled like the p-value.
double gv_p_standard_error(const TestOutcome& out) {
  const auto& d = std::get<GvDetail>(out.detail);
  const double tail = std::min(d.p_less, d.p_greater);
  return 2.0 * std::sqrt(tail * (1.0 - tail) / static_cast<double>(d.draws));
}

std::string case_table_csv(std::uint64_t seed) {
  constexpr int kReplications = 100000;
  const auto regions = blood_flow_regions();
  const std::array<Method, 3> methods{Method::mslr, Method::gv, Method::fisher_z};

  struct CaseCell {
    double p = 0.0;
    double se = 0.0;
  };
  std::vector<std::array<CaseCell, 3>> rows(methods.size());

  const RngStream root{seed, 0};
  for (std::size_t ri = 0; ri < regions.size(); ++ri) {
    const SummaryInput& in = regions[ri].input;
    const GroupSummary s1 = summary_from_r(in.n1, in.r1);
    const GroupSummary s2 = summary_from_r(in.n2, in.r2);
    const RngStream region_root = root.substream(ri);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      TestOutcome out;
      double se = 0.0;
      switch (methods[mi]) {
        case Method::mslr:
          out = mslr_test(s1, s2, BootstrapSettings{kReplications, region_root.substream(1)});
          se = mslr_p_standard_error(out);
          break;
        case Method::gv:
          out = gv_test(s1, s2, kReplications, region_root.substream(2));
          se = gv_p_standard_error(out);
          break;
        default:
          out = fisher_z_test(s1, s2);
          se = 0.0;
          break;
      }
      rows[mi][ri] = CaseCell{out.p_value, se};
    }
  }

  std::ostringstream os;
  os << "method";
  for (const auto& region : regions) {
    os << "," << region.region << "," << region.region << "_se";
  }
  os << "\n" << std::fixed << std::setprecision(6);
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    os << method_name(methods[mi]);
    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
      os << "," << rows[mi][ri].p << "," << rows[mi][ri].se;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::string study_csv(const StudyResult& result) {
  const StudySpec& spec = result.spec;
  const std::size_t nsizes = spec.sample_sizes.size();
  const std::size_t nrho = spec.rho_grid.size();
  const std::size_t nmeth = spec.methods.size();
  if (result.cells.size() != nsizes * nrho * nmeth) {
    throw ValidationError("study result does not match its spec layout");
  }

  bool diagonal = true;
  bool rho1_constant = true;
  for (const auto& rhos : spec.rho_grid) {
    diagonal = diagonal && rhos.rho1 == rhos.rho2;
    rho1_constant = rho1_constant && rhos.rho1 == spec.rho_grid.front().rho1;
  }
  auto label = [&](const RhoPair& rhos) {
    if (diagonal) return "rho=" + format_rho(rhos.rho1);
    if (rho1_constant) return "rho2=" + format_rho(rhos.rho2);
    return "rho1=" + format_rho(rhos.rho1) + "/rho2=" + format_rho(rhos.rho2);
  };

  std::ostringstream os;
  os << "n1,n2,method";
  for (const auto& rhos : spec.rho_grid) {
    os << ",rate[" << label(rhos) << "],se[" << label(rhos) << "]";
  }
  os << "\n" << std::fixed << std::setprecision(6);
  for (std::size_t si = 0; si < nsizes; ++si) {
    for (std::size_t mi = 0; mi < nmeth; ++mi) {
      os << spec.sample_sizes[si].n1 << "," << spec.sample_sizes[si].n2 << ","
         << method_name(spec.methods[mi]);
      for (std::size_t ri = 0; ri < nrho; ++ri) {
        const StudyCell& cell = result.cells[(si * nrho + ri) * nmeth + mi];
        os << "," << cell.rejection_rate << "," << cell.standard_error;
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string reproduce_csv(ReproduceTarget target, StudyScale scale, std::uint64_t seed,
                          int workers) {
  if (target == ReproduceTarget::table4) {
    // The case analyses are three fixed summary pairs; they always run at
    // the full replication count and ignore scale and workers.
    return case_table_csv(seed);
  }
  const StudySpec spec = reproduce_spec(target, scale, seed, workers);
  const StudyResult result =
      target == ReproduceTarget::table1 ? run_size_study(spec) : run_power_study(spec);
  return study_csv(result);
}

std::span<const RegionSummary> blood_flow_regions() {
  static const std::array<RegionSummary, 3> regions{{
      {"temporal", {14, -0.340, 14, 0.812}},
      {"subcortical", {14, 0.641, 14, 0.491}},
      {"frontal", {14, -0.032, 14, -0.212}},
  }};
  return regions;
}

}  // namespace corrcmp
