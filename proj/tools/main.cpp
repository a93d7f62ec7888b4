#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrcmp/io.hpp"
#include "corrcmp/version.hpp"

namespace {

Eigen::Index parse_group_size(double value, const char* which) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1e9) {
    throw corrcmp::ValidationError(std::string(which) +
                                   " must be a positive integer, got " + std::to_string(value));
  }
  return static_cast<Eigen::Index>(value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tests of equality of two correlation coefficients"};
  app.set_version_flag("--version", std::string(corrcmp::kVersion));
  app.require_subcommand(1);

  std::vector<double> summary;
  std::vector<std::string> csv_paths;
  std::vector<std::string> method_names;
  double alpha = 0.05;
  int boot_m = 10000;
  int gv_draws = 10000;
  std::uint64_t seed = 0;
  std::string format = "table";
  bool header = false;
  std::string rho_estimator;

  CLI::App* test = app.add_subcommand("test", "Test one pair of groups");
  auto* opt_summary =
      test->add_option("--summary", summary,
                       "n1 r1 n2 r2: group sizes and sample correlations")
          ->expected(4);
  auto* opt_csv =
      test->add_option("--csv", csv_paths, "two CSV files, one per group, columns x,y")
          ->expected(2);
  opt_summary->excludes(opt_csv);
  opt_csv->excludes(opt_summary);
  test->add_option("--method", method_names,
                   "methods to run: mslr, slr, fisher_z, gv (repeatable or comma-separated; "
                   "default mslr,gv,fisher_z)")
      ->delimiter(',');
  test->add_option("--alpha", alpha, "significance level in (0, 1]")->capture_default_str();
  test->add_option("--boot-m", boot_m, "bootstrap replications for mslr")
      ->capture_default_str();
  test->add_option("--gv-draws", gv_draws, "Monte Carlo draws for gv")->capture_default_str();
  test->add_option("--seed", seed, "master seed")->capture_default_str();
  test->add_option("--format", format, "output format: table or json")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  test->add_flag("--header", header, "CSV files start with a header row");
  test->add_option("--rho-estimator", rho_estimator,
                   "common-correlation estimator for mslr/slr: rf (weighted Fisher average) "
                   "or mle (pooled likelihood root)")
      ->check(CLI::IsMember({"rf", "mle"}));

  std::string target_name;
  std::string scale_name = "desk";
  std::uint64_t rep_seed = 0;
  int workers = 0;
  std::string out_path;

  CLI::App* rep = app.add_subcommand("reproduce", "Re-run a built-in study grid or the case analyses");
  rep->add_option("target", target_name, "table1, table2_1, table2_2 or table4")->required();
  rep->add_option("--scale", scale_name, "desk (2000 replications) or full (10000)")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  rep->add_option("--seed", rep_seed, "master seed")->capture_default_str();
  rep->add_option("--workers", workers, "worker threads (0 = all cores)")
      ->capture_default_str();
  rep->add_option("--out", out_path, "write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (test->parsed()) {
      corrcmp::TestRequest request;
      if (!method_names.empty()) {
        request.methods.clear();
        for (const auto& name : method_names) {
          const auto m = corrcmp::method_from_name(name);
          if (!m) {
            throw corrcmp::ValidationError("unknown method '" + name + "'");
          }
          request.methods.push_back(*m);
        }
      }
      request.alpha = alpha;
      request.bootstrap_replications = boot_m;
      request.gv_draws = gv_draws;
      request.seed = seed;
      if (rho_estimator == "rf") {
        request.rho_estimator = corrcmp::RhoProvenance::donner_rosner;
      } else if (rho_estimator == "mle") {
        request.rho_estimator = corrcmp::RhoProvenance::pearson_mle;
      }

      corrcmp::Report report;
      if (opt_summary->count() > 0) {
        corrcmp::SummaryInput input;
        input.n1 = parse_group_size(summary[0], "n1");
        input.r1 = summary[1];
        input.n2 = parse_group_size(summary[2], "n2");
        input.r2 = summary[3];
        report = corrcmp::run_test(input, request);
      } else if (opt_csv->count() > 0) {
        report = corrcmp::run_test(corrcmp::ingest_csv(csv_paths[0], header),
                                   corrcmp::ingest_csv(csv_paths[1], header), request);
      } else {
        throw corrcmp::ValidationError("provide either --summary or --csv");
      }
      std::cout << (format == "json" ? corrcmp::render_json(report)
                                     : corrcmp::render_text(report));
    } else {
      const auto target = corrcmp::reproduce_target_from_name(target_name);
      if (!target) {
        throw corrcmp::ValidationError("unknown target '" + target_name + "'");
      }
      const auto scale =
          scale_name == "full" ? corrcmp::StudyScale::full : corrcmp::StudyScale::desk;
      const std::string csv = corrcmp::reproduce_csv(*target, scale, rep_seed, workers);
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(out_path);
        if (!out) {
          throw corrcmp::ValidationError("cannot write '" + out_path + "'");
        }
        out << csv;
      }
    }
    return 0;
  } catch (const corrcmp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const corrcmp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
