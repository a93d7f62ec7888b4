#include "corrcmp/mcsim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "corrcmp/errors.hpp"
#include "corrcmp/rng.hpp"

namespace corrcmp {

namespace {

void validate_spec(const StudySpec& spec) {
  if (spec.sample_sizes.empty()) {
    throw ValidationError("study needs at least one sample-size pair");
  }
  for (const auto& sizes : spec.sample_sizes) {
    if (sizes.n1 < kMinGroupSize || sizes.n2 < kMinGroupSize) {
      throw ValidationError("study sample sizes must be at least " +
                            std::to_string(kMinGroupSize));
    }
  }
  if (spec.rho_grid.empty()) {
    throw ValidationError("study needs at least one correlation grid point");
  }
  for (const auto& rhos : spec.rho_grid) {
    if (!std::isfinite(rhos.rho1) || std::abs(rhos.rho1) >= 1.0 ||
        !std::isfinite(rhos.rho2) || std::abs(rhos.rho2) >= 1.0) {
      throw ValidationError("study correlations must lie strictly inside (-1, 1)");
    }
  }
  if (spec.replications < 100) {
    throw ValidationError("study replications must be at least 100, got " +
                          std::to_string(spec.replications));
  }
  if (!(spec.alpha > 0.0) || spec.alpha > 1.0) {
    throw ValidationError("alpha must lie in (0, 1], got " + std::to_string(spec.alpha));
  }
  if (spec.methods.empty()) {
    throw ValidationError("study needs at least one method");
  }
  for (Method m : spec.methods) {
    if (m == Method::mslr && spec.bootstrap_replications < 100) {
      throw ValidationError("bootstrap replications must be at least 100, got " +
                            std::to_string(spec.bootstrap_replications));
    }
    if (m == Method::gv && spec.gv_draws < 1000) {
      throw ValidationError("generalized-variable draws must be at least 1000, got " +
                            std::to_string(spec.gv_draws));
    }
  }
  if (spec.workers < 0) {
    throw ValidationError("worker count must be nonnegative, got " +
                          std::to_string(spec.workers));
  }
}

// Runs body(0..count-1) on the requested number of threads. Tasks are handed
// out through an atomic counter; each body call writes only to its own
// output slot, so results never depend on the thread count or schedule. The
// first exception wins and is rethrown on the calling thread after join.
template <typename Body>
void parallel_for(std::size_t count, int workers, const Body& body) {
  std::size_t threads = workers == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : static_cast<std::size_t>(workers);
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

struct ReplicationRecord {
  std::vector<std::uint8_t> rejected;  // one flag per method
  int redraws = 0;
};

// One simulated replication: two independent samples, every method on the
// same pair. Degenerate samples (probability zero in exact arithmetic) are
// redrawn from the continuation of the same engine.
ReplicationRecord run_replication(const StudySpec& spec, SampleSizes sizes, RhoPair rhos,
                                  RngStream rep_stream) {
  ReplicationRecord record;
  record.rejected.assign(spec.methods.size(), 0);

  BivariateParams p1;
  p1.rho = rhos.rho1;
  BivariateParams p2;
  p2.rho = rhos.rho2;

  RngEngine data_rng(rep_stream.substream(0));
  GroupSummary s1;
  GroupSummary s2;
  constexpr int kMaxRedraws = 100;
  for (int attempt = 0;; ++attempt) {
    if (attempt > kMaxRedraws) {
      throw NumericError("simulated samples kept degenerating");
    }
    try {
      s1 = summarize(draw_bivariate_normal_sample(sizes.n1, p1, data_rng));
      s2 = summarize(draw_bivariate_normal_sample(sizes.n2, p2, data_rng));
      break;
    } catch (const DegenerateDataError&) {
      ++record.redraws;
    }
  }

  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    TestOutcome outcome;
    switch (spec.methods[mi]) {
      case Method::mslr:
        outcome = mslr_test(s1, s2,
                            BootstrapSettings{spec.bootstrap_replications,
                                              rep_stream.substream(1)});
        break;
      case Method::slr:
        outcome = slr_test(s1, s2);
        break;
      case Method::fisher_z:
        outcome = fisher_z_test(s1, s2);
        break;
      case Method::gv:
        outcome = gv_test(s1, s2, spec.gv_draws, rep_stream.substream(2));
        break;
    }
    record.rejected[mi] = outcome.p_value <= spec.alpha ? 1 : 0;
  }
  return record;
}

StudyResult run_study(const StudySpec& spec) {
  validate_spec(spec);

  StudyResult result;
  result.spec = spec;
  const RngStream root{spec.master_seed, 0};
  const std::size_t reps = static_cast<std::size_t>(spec.replications);

  std::uint64_t cell_ordinal = 0;
  for (const auto& sizes : spec.sample_sizes) {
    for (const auto& rhos : spec.rho_grid) {
      const RngStream cell_stream = root.substream(cell_ordinal++);
      std::vector<ReplicationRecord> records(reps);
      parallel_for(reps, spec.workers, [&](std::size_t j) {
        records[j] = run_replication(spec, sizes, rhos,
                                     cell_stream.substream(static_cast<std::uint64_t>(j)));
      });

      // Reduce in replication order so the totals are schedule-independent.
      std::vector<long> rejections(spec.methods.size(), 0);
      long redraws = 0;
      for (const auto& record : records) {
        for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
          rejections[mi] += record.rejected[mi];
        }
        redraws += record.redraws;
      }

      for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        StudyCell cell;
        cell.n1 = sizes.n1;
        cell.n2 = sizes.n2;
        cell.rho1 = rhos.rho1;
        cell.rho2 = rhos.rho2;
        cell.method = spec.methods[mi];
        cell.replications = spec.replications;
        cell.rejection_rate =
            static_cast<double>(rejections[mi]) / static_cast<double>(spec.replications);
        cell.standard_error = std::sqrt(cell.rejection_rate * (1.0 - cell.rejection_rate) /
                                        static_cast<double>(spec.replications));
        cell.degenerate_redraws = redraws;
        result.cells.push_back(cell);
      }
    }
  }
  return result;
}

}  // namespace

StudyResult run_size_study(const StudySpec& spec) {
  for (const auto& rhos : spec.rho_grid) {
    if (rhos.rho1 != rhos.rho2) {
      throw ValidationError("a size study requires rho1 == rho2 at every grid point");
    }
  }
  return run_study(spec);
}

StudyResult run_power_study(const StudySpec& spec) { return run_study(spec); }

}  // namespace corrcmp
