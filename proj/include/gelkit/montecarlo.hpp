#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gelkit/degree_distribution.hpp"
#include "gelkit/functionality.hpp"

namespace gelkit {

enum class FunctionalityAssignment {
  kExactQuota,   // counts round(f_m*N), largest-remainder correction
  kMultinomial,  // i.i.d. per vertex
};

struct MCConfig {
  std::int64_t n_vertices = 0;
  FunctionalityDistribution f{{{1, 1.0}}};
  double target_c = 0.0;
  int runs = 1;
  std::uint64_t seed = 0;
  FunctionalityAssignment assignment = FunctionalityAssignment::kExactQuota;
  bool reject_self_loops = true;   // resample; stubs are not consumed
  bool reject_multi_edges = false; // default off: parallel bonds allowed
  int size_histogram_max = 4096;   // component sizes tracked individually
  int threads = 0;                 // 0: hardware, capped by GELKIT_THREADS
  std::string dump_path;           // per-run component dump (gzip), "" = none
};

struct MCRunResult {
  std::vector<std::pair<std::int64_t, std::int64_t>> size_counts;  // ascending
  std::vector<std::int64_t> degree_counts;  // index = degree
  std::int64_t largest_size = 0;
  std::int64_t edges_placed = 0;
  std::int64_t total_stubs = 0;
  double actual_c = 0.0;  // edges_placed / (total_stubs/2), exact accounting
};

struct MCEnsembleResult {
  std::int64_t n_vertices = 0;
  int runs_completed = 0;
  bool giant_excluded = false;       // largest component dropped per run
  std::vector<double> size_mean;     // index n: mean fraction of vertices in
                                     // finite components of size n
  std::vector<double> size_stderr;   // per-n standard error over runs
  std::vector<double> degree_mean;   // index n: empirical u(n)
  double largest_fraction_mean = 0.0;
  double largest_fraction_stderr = 0.0;
  double actual_c_mean = 0.0;
};

MCRunResult simulate_run(const MCConfig& cfg, int run_index);
MCEnsembleResult run_ensemble(const MCConfig& cfg);

struct DegreeCheckReport {
  double tv_distance = 0.0;
  double fluctuation_scale = 0.0;  // expected TV for this sample size
};
DegreeCheckReport empirical_degree_check(const MCEnsembleResult& mc,
                                         const DegreeDistribution& d);

}  // namespace gelkit
