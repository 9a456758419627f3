#include "gelkit/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <unordered_set>

#include <zlib.h>

#include "gelkit/errors.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/numeric.hpp"
#include "gelkit/rng.hpp"
#include "gelkit/text_format.hpp"

namespace gelkit {

namespace {

struct DisjointSet {
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> size;

  explicit DisjointSet(std::int64_t n) : parent(n), size(n, 1) {
    for (std::int64_t i = 0; i < n; ++i) parent[i] = static_cast<std::int32_t>(i);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];  // halving
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
};

void validate(const MCConfig& cfg) {
  if (cfg.n_vertices < 1 || cfg.n_vertices > (1ll << 31) - 1)
    throw DomainError("n_vertices must be in [1, 2^31)");
  if (!(cfg.target_c >= 0.0 && cfg.target_c <= 1.0))
    throw DomainError("target_c must lie in [0, 1]");
  if (cfg.runs < 1) throw DomainError("runs must be >= 1");
  if (cfg.size_histogram_max < 1)
    throw DomainError("size_histogram_max must be >= 1");
}

std::vector<std::int32_t> assign_functionalities(const MCConfig& cfg,
                                                 CounterRng& rng) {
  const auto& entries = cfg.f.entries();
  std::int64_t n = cfg.n_vertices;
  std::vector<std::int32_t> func(n);
  if (cfg.assignment == FunctionalityAssignment::kExactQuota) {
    // floor quotas, then hand out the remainder by largest fractional part
    std::vector<std::int64_t> counts(entries.size());
    std::vector<std::pair<double, std::size_t>> remainder(entries.size());
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      double exact = entries[i].second * static_cast<double>(n);
      counts[i] = static_cast<std::int64_t>(std::floor(exact));
      assigned += counts[i];
      remainder[i] = {exact - std::floor(exact), i};
    }
    std::sort(remainder.begin(), remainder.end(),
              [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
              });
    for (std::int64_t k = 0; k < n - assigned; ++k)
      ++counts[remainder[static_cast<std::size_t>(k) % remainder.size()].second];
    std::int64_t v = 0;
    for (std::size_t i = 0; i < entries.size(); ++i)
      for (std::int64_t k = 0; k < counts[i]; ++k)
        func[v++] = entries[i].first;
  } else {
    for (std::int64_t v = 0; v < n; ++v) {
      double r = rng.next_unit();
      double acc = 0.0;
      std::int32_t m = entries.back().first;
      for (const auto& [mi, fi] : entries) {
        acc += fi;
        if (r < acc) {
          m = mi;
          break;
        }
      }
      func[v] = m;
    }
  }
  return func;
}

}  // namespace

MCRunResult simulate_run(const MCConfig& cfg, int run_index) {
  validate(cfg);
  CounterRng rng(cfg.seed, static_cast<std::uint64_t>(run_index));
  std::vector<std::int32_t> func = assign_functionalities(cfg, rng);
  std::int64_t n = cfg.n_vertices;

  std::int64_t total_stubs = 0;
  for (std::int64_t v = 0; v < n; ++v) total_stubs += func[v];
  std::vector<std::uint32_t> stubs(total_stubs);
  for (std::int64_t v = 0, s = 0; v < n; ++v)
    for (std::int32_t k = 0; k < func[v]; ++k)
      stubs[s++] = static_cast<std::uint32_t>(v);

  std::int64_t target_edges =
      std::min(static_cast<std::int64_t>(
                   std::llround(cfg.target_c * (total_stubs / 2.0))),
               total_stubs / 2);

  DisjointSet dsu(n);
  std::vector<std::int32_t> degree(n, 0);
  std::unordered_set<std::uint64_t> placed;
  if (cfg.reject_multi_edges) placed.reserve(target_edges * 2);

  std::int64_t free_stubs = total_stubs;
  std::int64_t edges = 0;
  long rejects = 0;
  while (edges < target_edges && free_stubs >= 2) {
    std::uint64_t i = rng.next_below(static_cast<std::uint64_t>(free_stubs));
    std::uint64_t j =
        rng.next_below(static_cast<std::uint64_t>(free_stubs) - 1);
    if (j >= i) ++j;
    std::uint32_t v1 = stubs[i];
    std::uint32_t v2 = stubs[j];
    if (v1 == v2 && cfg.reject_self_loops) {
      if (++rejects >= 64) {
        bool all_same = true;
        for (std::int64_t s = 1; s < free_stubs; ++s)
          if (stubs[s] != stubs[0]) {
            all_same = false;
            break;
          }
        if (all_same) break;  // only one vertex retains free groups
        rejects = 0;
      }
      continue;
    }
    if (cfg.reject_multi_edges && v1 != v2) {
      std::uint64_t key = v1 < v2
                              ? (static_cast<std::uint64_t>(v1) << 32) | v2
                              : (static_cast<std::uint64_t>(v2) << 32) | v1;
      if (placed.count(key)) {
        if (++rejects >= 100000) break;  // no progress; give up honestly
        continue;
      }
      placed.insert(key);
    }
    assert(degree[v1] < func[v1] && degree[v2] < func[v2]);
    ++degree[v1];
    ++degree[v2];
    dsu.unite(static_cast<std::int32_t>(v1), static_cast<std::int32_t>(v2));
    std::uint64_t hi = std::max(i, j), lo = std::min(i, j);
    stubs[hi] = stubs[free_stubs - 1];
    --free_stubs;
    stubs[lo] = stubs[free_stubs - 1];
    --free_stubs;
    ++edges;
    rejects = 0;
  }

  MCRunResult out;
  out.total_stubs = total_stubs;
  out.edges_placed = edges;
  out.actual_c = total_stubs > 0
                     ? static_cast<double>(edges) / (total_stubs / 2.0)
                     : 0.0;

  std::vector<std::int64_t> sizes;
  for (std::int64_t v = 0; v < n; ++v)
    if (dsu.find(static_cast<std::int32_t>(v)) == v)
      sizes.push_back(dsu.size[v]);
  std::sort(sizes.begin(), sizes.end());
  out.largest_size = sizes.back();
  for (std::size_t i = 0; i < sizes.size();) {
    std::size_t j = i;
    while (j < sizes.size() && sizes[j] == sizes[i]) ++j;
    out.size_counts.emplace_back(sizes[i], static_cast<std::int64_t>(j - i));
    i = j;
  }

  int max_deg = 0;
  for (std::int64_t v = 0; v < n; ++v) max_deg = std::max(max_deg, degree[v]);
  out.degree_counts.assign(max_deg + 1, 0);
  for (std::int64_t v = 0; v < n; ++v) ++out.degree_counts[degree[v]];
  return out;
}

namespace {

int resolve_threads(const MCConfig& cfg) {
  int t = cfg.threads;
  if (t <= 0) {
    t = static_cast<int>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
  }
  if (const char* env = std::getenv("GELKIT_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) t = std::min(t, cap);
  }
  return std::max(1, std::min(t, cfg.runs));
}

void dump_runs(const std::string& path, const std::vector<MCRunResult>& runs) {
  gzFile gz = gzopen(path.c_str(), "wb");
  if (!gz) throw DomainError("cannot open dump file: " + path);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    gzprintf(gz, "# run %zu c=%s\n", r, format_double(runs[r].actual_c).c_str());
    for (const auto& [size, count] : runs[r].size_counts)
      gzprintf(gz, "%lld\t%lld\n", static_cast<long long>(size),
               static_cast<long long>(count));
  }
  gzclose(gz);
}

}  // namespace

MCEnsembleResult run_ensemble(const MCConfig& cfg) {
  validate(cfg);
  int n_threads = resolve_threads(cfg);
  std::vector<MCRunResult> results(cfg.runs);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int idx = next.fetch_add(1);
      if (idx >= cfg.runs) return;
      results[idx] = simulate_run(cfg, idx);
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  GelReport gel = analyze_gelation(cfg.f);
  bool exclude_giant = gel.gels_in_finite_time && cfg.target_c > gel.c_gel;

  MCEnsembleResult out;
  out.n_vertices = cfg.n_vertices;
  out.runs_completed = cfg.runs;
  out.giant_excluded = exclude_giant;

  int hist_max = cfg.size_histogram_max;
  std::vector<double> sum(hist_max + 1, 0.0), sumsq(hist_max + 1, 0.0);
  double largest_sum = 0.0, largest_sumsq = 0.0;
  KahanAccumulator c_sum;
  std::size_t deg_len = 0;
  for (const auto& r : results)
    deg_len = std::max(deg_len, r.degree_counts.size());
  std::vector<double> deg_sum(deg_len, 0.0);

  double inv_n = 1.0 / static_cast<double>(cfg.n_vertices);
  for (const auto& r : results) {  // fixed order: independent of scheduling
    std::vector<double> x(hist_max + 1, 0.0);
    for (const auto& [size, count] : r.size_counts) {
      std::int64_t effective = count;
      if (exclude_giant && size == r.largest_size) --effective;
      if (size <= hist_max && effective > 0)
        x[size] = static_cast<double>(size) * effective * inv_n;
    }
    for (int s = 1; s <= hist_max; ++s) {
      sum[s] += x[s];
      sumsq[s] += x[s] * x[s];
    }
    double lf = static_cast<double>(r.largest_size) * inv_n;
    largest_sum += lf;
    largest_sumsq += lf * lf;
    for (std::size_t k = 0; k < r.degree_counts.size(); ++k)
      deg_sum[k] += static_cast<double>(r.degree_counts[k]) * inv_n;
    c_sum.add(r.actual_c);
  }

  double runs = static_cast<double>(cfg.runs);
  out.size_mean.assign(hist_max + 1, 0.0);
  out.size_stderr.assign(hist_max + 1, 0.0);
  auto stderr_of = [runs](double s, double sq, double mean) {
    if (runs < 2.0) return 0.0;
    double var = (sq - runs * mean * mean) / (runs - 1.0);
    return var > 0.0 ? std::sqrt(var / runs) : 0.0;
  };
  for (int s = 1; s <= hist_max; ++s) {
    out.size_mean[s] = sum[s] / runs;
    out.size_stderr[s] = stderr_of(sum[s], sumsq[s], out.size_mean[s]);
  }
  out.degree_mean.assign(deg_len, 0.0);
  for (std::size_t k = 0; k < deg_len; ++k) out.degree_mean[k] = deg_sum[k] / runs;
  out.largest_fraction_mean = largest_sum / runs;
  out.largest_fraction_stderr =
      stderr_of(largest_sum, largest_sumsq, out.largest_fraction_mean);
  out.actual_c_mean = c_sum.value() / runs;

  if (!cfg.dump_path.empty()) dump_runs(cfg.dump_path, results);
  return out;
}

DegreeCheckReport empirical_degree_check(const MCEnsembleResult& mc,
                                         const DegreeDistribution& d) {
  DegreeCheckReport rep;
  std::size_t len = std::max(mc.degree_mean.size(), d.marginal().size());
  KahanAccumulator tv, fluct;
  double samples = static_cast<double>(mc.n_vertices) * mc.runs_completed;
  for (std::size_t nn = 0; nn < len; ++nn) {
    double emp = nn < mc.degree_mean.size() ? mc.degree_mean[nn] : 0.0;
    double ana = d.u(static_cast<int>(nn));
    tv.add(std::abs(emp - ana));
    if (ana > 0.0 && ana < 1.0)
      fluct.add(std::sqrt(ana * (1.0 - ana) / samples));
  }
  rep.tv_distance = 0.5 * tv.value();
  rep.fluctuation_scale = 0.5 * fluct.value();
  return rep;
}

}  // namespace gelkit
