#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gelkit/components.hpp"
#include "gelkit/degree_distribution.hpp"
#include "gelkit/errors.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/montecarlo.hpp"
#include "gelkit/system_state.hpp"
#include "gelkit/text_format.hpp"

using gelkit::format_double;
using ordered_json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ordered_json json_num(double x) {
  if (std::isnan(x) || std::isinf(x)) return nullptr;
  return x;
}

// "a:step:b" inclusive ranges or comma lists; plain numbers are lists of one.
std::vector<double> parse_grid(const std::string& text) {
  auto to_double = [](const std::string& tok) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
      throw UsageError("bad number: '" + tok + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 3) throw UsageError("range must be first:step:last");
    double a = to_double(parts[0]);
    double step = to_double(parts[1]);
    double b = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw UsageError("range needs step > 0, last >= first");
    for (int k = 0;; ++k) {
      double v = a + k * step;
      if (v > b + step * 1e-9) break;
      out.push_back(std::min(v, b));
    }
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_double(tok));
  }
  if (out.empty()) throw UsageError("empty value list");
  return out;
}

gelkit::FunctionalityDistribution load_mixture(const std::string& inline_text,
                                               const std::string& path,
                                               bool normalize) {
  if (!inline_text.empty())
    return gelkit::FunctionalityDistribution::parse(inline_text, normalize);
  std::ifstream in(path);
  if (!in) throw gelkit::DomainError("cannot read mixture file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return gelkit::FunctionalityDistribution::parse(buf.str(), normalize);
}

std::vector<gelkit::SystemState> resolve_states(
    const gelkit::FunctionalityDistribution& f, const std::string& conv,
    const std::string& time) {
  std::vector<gelkit::SystemState> states;
  if (!conv.empty())
    for (double c : parse_grid(conv)) states.push_back(state_from_density(f, c));
  else
    for (double t : parse_grid(time)) states.push_back(state_from_time(f, t));
  return states;
}

gelkit::SizeDistMethod parse_method(const std::string& name) {
  if (name == "direct") return gelkit::SizeDistMethod::kDirectConvolution;
  if (name == "fft") return gelkit::SizeDistMethod::kPerSizeFft;
  if (name == "newton") return gelkit::SizeDistMethod::kSeriesInversion;
  throw UsageError("unknown method: " + name);
}

ordered_json mixture_json(const gelkit::FunctionalityDistribution& f) {
  ordered_json j = ordered_json::object();
  for (const auto& [m, fm] : f.entries()) j[std::to_string(m)] = fm;
  return j;
}

struct Sink {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Sink(const std::string& path) {
    if (path.empty()) return;
    file.open(path, std::ios::binary);
    if (!file) throw gelkit::DomainError("cannot open output file: " + path);
    os = &file;
  }
  std::ostream& out() { return *os; }
};

// Shared flag set; each subcommand binds the subset it uses.
struct Options {
  std::string mix;
  std::string mix_file;
  bool normalize = false;
  std::string conversion;
  std::string time;
  int n_max = 256;
  std::string method = "newton";
  std::int64_t vertices = 100000;
  int runs = 20;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string out_path;
  std::string dump_path;
  std::string assignment = "quota";
  bool keep_self_loops = false;
  bool reject_multi_edges = false;
  int hist_max = 4096;
};

void add_mixture_flags(CLI::App* cmd, Options& o) {
  auto* grp = cmd->add_option_group("mixture");
  grp->add_option("--mix", o.mix, "functionality mixture, e.g. \"3:1\" or \"1:0.96,6:0.04\"");
  grp->add_option("--mix-file", o.mix_file, "file holding the mixture (same formats)");
  grp->require_option(1);
  cmd->add_flag("--normalize", o.normalize, "rescale fractions that do not sum to 1");
}

void add_state_flags(CLI::App* cmd, Options& o) {
  auto* grp = cmd->add_option_group("state");
  grp->add_option("--conversion", o.conversion,
                  "bond density in [0,1]; value, comma list, or first:step:last");
  grp->add_option("--time", o.time, "process time >= 0; value, list, or range");
  grp->require_option(1);
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out_path, "write to file instead of stdout");
}

void emit_json(Sink& sink, const ordered_json& j) {
  sink.out() << j.dump(2) << '\n';
}

int cmd_degree(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto states = resolve_states(f, o.conversion, o.time);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << (states.size() > 1 ? "c,n,u\n" : "n,u\n");
    for (const auto& st : states) {
      gelkit::DegreeDistribution d(f, st);
      for (int n = 0; n <= d.max_degree(); ++n) {
        if (states.size() > 1) sink.out() << format_double(st.c) << ',';
        sink.out() << n << ',' << format_double(d.u(n)) << '\n';
      }
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "degree";
  j["mixture"] = mixture_json(f);
  j["states"] = ordered_json::array();
  for (const auto& st : states) {
    gelkit::DegreeDistribution d(f, st);
    ordered_json e;
    e["c"] = json_num(st.c);
    e["t"] = json_num(st.t);
    e["u"] = d.marginal();
    j["states"].push_back(std::move(e));
  }
  emit_json(sink, j);
  return 0;
}

int cmd_moments(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto states = resolve_states(f, o.conversion, o.time);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "c,t,mu1,mu2,mu3\n";
    for (const auto& st : states) {
      auto m = moments_closed_form(f, st);
      sink.out() << format_double(st.c) << ',' << format_double(st.t) << ','
                 << format_double(m.mu1) << ',' << format_double(m.mu2) << ','
                 << format_double(m.mu3) << '\n';
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "moments";
  j["mixture"] = mixture_json(f);
  j["states"] = ordered_json::array();
  for (const auto& st : states) {
    auto m = moments_closed_form(f, st);
    ordered_json e;
    e["c"] = json_num(st.c);
    e["t"] = json_num(st.t);
    e["mu1"] = json_num(m.mu1);
    e["mu2"] = json_num(m.mu2);
    e["mu3"] = json_num(m.mu3);
    e["mu3_reduced"] = json_num(m.mu3_reduced);
    j["states"].push_back(std::move(e));
  }
  emit_json(sink, j);
  return 0;
}

int cmd_gel(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto rep = analyze_gelation(f);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "gels,t_gel,c_gel,c_gel_applicable,criterion\n"
               << (rep.gels_in_finite_time ? "true" : "false") << ','
               << format_double(rep.t_gel) << ',' << format_double(rep.c_gel)
               << ',' << (rep.c_gel_applicable ? "true" : "false") << ','
               << format_double(rep.criterion_value) << '\n';
    return 0;
  }
  ordered_json j;
  j["command"] = "gel";
  j["mixture"] = mixture_json(f);
  j["gels"] = rep.gels_in_finite_time;
  j["t_gel"] = json_num(rep.t_gel);
  j["c_gel"] = json_num(rep.c_gel);
  j["c_gel_applicable"] = rep.c_gel_applicable;
  j["criterion"] = json_num(rep.criterion_value);
  emit_json(sink, j);
  return 0;
}

int cmd_sizedist(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto states = resolve_states(f, o.conversion, o.time);
  auto method = parse_method(o.method);
  if (o.n_max < 1) throw UsageError("--nmax must be >= 1");
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << (states.size() > 1 ? "c,n,w\n" : "n,w\n");
    for (const auto& st : states) {
      gelkit::DegreeDistribution d(f, st);
      auto sd = size_distribution(d, o.n_max, method);
      for (int n = 1; n <= sd.n_max(); ++n) {
        if (states.size() > 1) sink.out() << format_double(st.c) << ',';
        sink.out() << n << ',' << format_double(sd.w(n)) << '\n';
      }
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "sizedist";
  j["mixture"] = mixture_json(f);
  j["method"] = o.method;
  j["states"] = ordered_json::array();
  for (const auto& st : states) {
    gelkit::DegreeDistribution d(f, st);
    auto sd = size_distribution(d, o.n_max, method);
    ordered_json e;
    e["c"] = json_num(st.c);
    e["t"] = json_num(st.t);
    e["n_max"] = sd.n_max();
    e["mass"] = json_num(sd.mass);
    e["truncation_deficit"] = json_num(sd.truncation_deficit);
    e["noise_floor"] = json_num(sd.noise_floor);
    ordered_json w = ordered_json::array();
    ordered_json clamped = ordered_json::array();
    for (int n = 1; n <= sd.n_max(); ++n) {
      w.push_back(json_num(sd.w(n)));
      if (sd.clamped[n]) clamped.push_back(n);
    }
    e["w"] = std::move(w);  // index 0 holds w(1)
    e["clamped"] = std::move(clamped);
    j["states"].push_back(std::move(e));
  }
  emit_json(sink, j);
  return 0;
}

int cmd_stats(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto states = resolve_states(f, o.conversion, o.time);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "c,t,r0,gel_fraction,expected_size,diverges\n";
    for (const auto& st : states) {
      gelkit::DegreeDistribution d(f, st);
      auto cs = component_stats(d);
      sink.out() << format_double(st.c) << ',' << format_double(st.t) << ','
                 << format_double(cs.r0) << ','
                 << format_double(cs.gel_fraction) << ','
                 << format_double(cs.expected_size) << ','
                 << (cs.diverges ? "true" : "false") << '\n';
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "stats";
  j["mixture"] = mixture_json(f);
  j["states"] = ordered_json::array();
  for (const auto& st : states) {
    gelkit::DegreeDistribution d(f, st);
    auto cs = component_stats(d);
    ordered_json e;
    e["c"] = json_num(st.c);
    e["t"] = json_num(st.t);
    e["r0"] = json_num(cs.r0);
    e["gel_fraction"] = json_num(cs.gel_fraction);
    e["expected_size"] = json_num(cs.expected_size);
    e["diverges"] = cs.diverges;
    j["states"].push_back(std::move(e));
  }
  emit_json(sink, j);
  return 0;
}

int cmd_asymptote(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto states = resolve_states(f, o.conversion, o.time);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "c,t,c1,c2,c1_explicit,c2_explicit\n";
    for (const auto& st : states) {
      gelkit::DegreeDistribution d(f, st);
      auto a = asymptote(d);
      sink.out() << format_double(st.c) << ',' << format_double(st.t) << ','
                 << format_double(a.c1) << ',' << format_double(a.c2) << ','
                 << format_double(a.c1_explicit) << ','
                 << format_double(a.c2_explicit) << '\n';
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "asymptote";
  j["mixture"] = mixture_json(f);
  j["states"] = ordered_json::array();
  for (const auto& st : states) {
    gelkit::DegreeDistribution d(f, st);
    auto a = asymptote(d);
    ordered_json e;
    e["c"] = json_num(st.c);
    e["t"] = json_num(st.t);
    e["c1"] = json_num(a.c1);
    e["c2"] = json_num(a.c2);
    e["c1_explicit"] = json_num(a.c1_explicit);
    e["c2_explicit"] = json_num(a.c2_explicit);
    j["states"].push_back(std::move(e));
  }
  emit_json(sink, j);
  return 0;
}

gelkit::MCConfig build_mc_config(const Options& o,
                                 const gelkit::FunctionalityDistribution& f) {
  auto grid = parse_grid(o.conversion);
  if (grid.size() != 1)
    throw UsageError("simulation takes a single --conversion value");
  gelkit::MCConfig cfg;
  cfg.n_vertices = o.vertices;
  cfg.f = f;
  cfg.target_c = grid[0];
  cfg.runs = o.runs;
  cfg.seed = o.seed;
  if (o.assignment == "quota")
    cfg.assignment = gelkit::FunctionalityAssignment::kExactQuota;
  else if (o.assignment == "multinomial")
    cfg.assignment = gelkit::FunctionalityAssignment::kMultinomial;
  else
    throw UsageError("unknown assignment: " + o.assignment);
  cfg.reject_self_loops = !o.keep_self_loops;
  cfg.reject_multi_edges = o.reject_multi_edges;
  cfg.size_histogram_max = o.hist_max;
  cfg.dump_path = o.dump_path;
  return cfg;
}

int cmd_mc(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto cfg = build_mc_config(o, f);
  auto res = run_ensemble(cfg);
  int rows = std::min(o.n_max, static_cast<int>(res.size_mean.size()) - 1);
  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "# target_c=" << format_double(cfg.target_c)
               << " actual_c_mean=" << format_double(res.actual_c_mean)
               << " giant_excluded=" << (res.giant_excluded ? "true" : "false")
               << " largest_fraction_mean="
               << format_double(res.largest_fraction_mean) << '\n';
    sink.out() << "n,w_mc,stderr\n";
    for (int n = 1; n <= rows; ++n)
      sink.out() << n << ',' << format_double(res.size_mean[n]) << ','
                 << format_double(res.size_stderr[n]) << '\n';
    return 0;
  }
  ordered_json j;
  j["command"] = "mc";
  j["mixture"] = mixture_json(f);
  j["n_vertices"] = res.n_vertices;
  j["runs"] = res.runs_completed;
  j["seed"] = o.seed;
  j["target_c"] = json_num(cfg.target_c);
  j["actual_c_mean"] = json_num(res.actual_c_mean);
  j["giant_excluded"] = res.giant_excluded;
  j["largest_fraction_mean"] = json_num(res.largest_fraction_mean);
  j["largest_fraction_stderr"] = json_num(res.largest_fraction_stderr);
  j["degree_mean"] = res.degree_mean;
  ordered_json sizes = ordered_json::array();
  for (int n = 1; n <= rows; ++n) {
    ordered_json e;
    e["n"] = n;
    e["w_mc"] = json_num(res.size_mean[n]);
    e["stderr"] = json_num(res.size_stderr[n]);
    sizes.push_back(std::move(e));
  }
  j["sizes"] = std::move(sizes);
  emit_json(sink, j);
  return 0;
}

int cmd_validate(const Options& o) {
  auto f = load_mixture(o.mix, o.mix_file, o.normalize);
  auto cfg = build_mc_config(o, f);
  int n_rows = std::min(o.n_max, cfg.size_histogram_max);
  auto res = run_ensemble(cfg);

  auto state = state_from_density(f, cfg.target_c);
  gelkit::DegreeDistribution d(f, state);
  auto sd = size_distribution(d, n_rows, parse_method(o.method));
  auto deg = empirical_degree_check(res, d);
  auto cs = component_stats(d);

  double tv = 0.0;
  std::vector<double> z(n_rows + 1, 0.0);
  for (int n = 1; n <= n_rows; ++n) {
    double emp = n < static_cast<int>(res.size_mean.size()) ? res.size_mean[n] : 0.0;
    double diff = emp - sd.w(n);
    tv += 0.5 * std::abs(diff);
    double se = n < static_cast<int>(res.size_stderr.size()) ? res.size_stderr[n] : 0.0;
    if (se > 0.0)
      z[n] = diff / se;
    else
      z[n] = diff == 0.0 ? 0.0
                         : std::numeric_limits<double>::infinity() *
                               (diff > 0 ? 1.0 : -1.0);
  }

  Sink sink(o.out_path);
  if (o.format == "csv") {
    sink.out() << "# tv=" << format_double(tv)
               << " degree_tv=" << format_double(deg.tv_distance)
               << " degree_fluctuation=" << format_double(deg.fluctuation_scale)
               << '\n';
    if (res.giant_excluded)
      sink.out() << "# largest_fraction_mean="
                 << format_double(res.largest_fraction_mean)
                 << " gel_fraction=" << format_double(cs.gel_fraction) << '\n';
    sink.out() << "n,w_mc,stderr,w_theory,z\n";
    for (int n = 1; n <= n_rows; ++n) {
      double emp = n < static_cast<int>(res.size_mean.size()) ? res.size_mean[n] : 0.0;
      double se = n < static_cast<int>(res.size_stderr.size()) ? res.size_stderr[n] : 0.0;
      sink.out() << n << ',' << format_double(emp) << ',' << format_double(se)
                 << ',' << format_double(sd.w(n)) << ',' << format_double(z[n])
                 << '\n';
    }
    return 0;
  }
  ordered_json j;
  j["command"] = "validate";
  j["mixture"] = mixture_json(f);
  j["n_vertices"] = res.n_vertices;
  j["runs"] = res.runs_completed;
  j["seed"] = o.seed;
  j["target_c"] = json_num(cfg.target_c);
  j["tv"] = json_num(tv);
  j["degree_tv"] = json_num(deg.tv_distance);
  j["degree_fluctuation"] = json_num(deg.fluctuation_scale);
  j["giant_excluded"] = res.giant_excluded;
  j["largest_fraction_mean"] = json_num(res.largest_fraction_mean);
  j["gel_fraction"] = json_num(cs.gel_fraction);
  ordered_json rows = ordered_json::array();
  for (int n = 1; n <= n_rows; ++n) {
    double emp = n < static_cast<int>(res.size_mean.size()) ? res.size_mean[n] : 0.0;
    double se = n < static_cast<int>(res.size_stderr.size()) ? res.size_stderr[n] : 0.0;
    ordered_json e;
    e["n"] = n;
    e["w_mc"] = json_num(emp);
    e["stderr"] = json_num(se);
    e["w_theory"] = json_num(sd.w(n));
    e["z"] = json_num(z[n]);
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  emit_json(sink, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"step-growth random graph toolkit: degree laws, gelation, "
               "component sizes, Monte Carlo"};
  app.require_subcommand(1);
  Options o;

  auto* degree = app.add_subcommand("degree", "marginal degree distribution u(n)");
  add_mixture_flags(degree, o);
  add_state_flags(degree, o);
  add_output_flags(degree, o);

  auto* moments = app.add_subcommand("moments", "first three degree moments");
  add_mixture_flags(moments, o);
  add_state_flags(moments, o);
  add_output_flags(moments, o);

  auto* gel = app.add_subcommand("gel", "phase transition time and density");
  add_mixture_flags(gel, o);
  add_output_flags(gel, o);

  auto* sizedist = app.add_subcommand("sizedist", "component size distribution w(n)");
  add_mixture_flags(sizedist, o);
  add_state_flags(sizedist, o);
  add_output_flags(sizedist, o);
  sizedist->add_option("--nmax", o.n_max, "largest component size computed");
  sizedist->add_option("--method", o.method, "direct, fft, or newton")
      ->check(CLI::IsMember({"direct", "fft", "newton"}));

  auto* stats = app.add_subcommand(
      "stats", "gel fraction, expected finite-component size, divergence");
  add_mixture_flags(stats, o);
  add_state_flags(stats, o);
  add_output_flags(stats, o);

  auto* asym = app.add_subcommand("asymptote", "large-n envelope coefficients");
  add_mixture_flags(asym, o);
  add_state_flags(asym, o);
  add_output_flags(asym, o);

  auto add_mc_flags = [&](CLI::App* cmd) {
    add_mixture_flags(cmd, o);
    cmd->add_option("--conversion", o.conversion, "target bond density in [0,1]")
        ->required();
    add_output_flags(cmd, o);
    cmd->add_option("--vertices", o.vertices, "units per run")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--runs", o.runs, "independent runs")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--dump-components", o.dump_path,
                    "write per-run component counts, gzip");
    cmd->add_option("--assignment", o.assignment, "quota or multinomial")
        ->check(CLI::IsMember({"quota", "multinomial"}));
    cmd->add_flag("--keep-self-loops", o.keep_self_loops,
                  "count draws that pair a unit with itself");
    cmd->add_flag("--reject-multi-edges", o.reject_multi_edges,
                  "forbid parallel bonds between the same pair");
    cmd->add_option("--histmax", o.hist_max, "largest tracked component size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--nmax", o.n_max, "histogram rows emitted");
  };

  auto* mc = app.add_subcommand("mc", "Monte Carlo ensemble of random graphs");
  add_mc_flags(mc);

  auto* validate = app.add_subcommand(
      "validate", "Monte Carlo vs analytic size distribution, paired table");
  add_mc_flags(validate);
  validate->add_option("--method", o.method, "analytic backend")
      ->check(CLI::IsMember({"direct", "fft", "newton"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (degree->parsed()) return cmd_degree(o);
    if (moments->parsed()) return cmd_moments(o);
    if (gel->parsed()) return cmd_gel(o);
    if (sizedist->parsed()) return cmd_sizedist(o);
    if (stats->parsed()) return cmd_stats(o);
    if (asym->parsed()) return cmd_asymptote(o);
    if (mc->parsed()) {
      o.n_max = mc->count("--nmax") ? o.n_max : 50;
      return cmd_mc(o);
    }
    if (validate->parsed()) {
      o.n_max = validate->count("--nmax") ? o.n_max : 50;
      return cmd_validate(o);
    }
    std::cerr << "no command given\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const gelkit::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 3;
  } catch (const gelkit::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
