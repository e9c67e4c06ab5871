#include "continuized/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "continuized/jumpflow.hpp"
#include "continuized/parallel.hpp"
#include "continuized/schedules.hpp"

namespace continuized::harness {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Problems and configuration.

Objective make_problem(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::quad3:
      return make_quad3(spec.mu, spec.L);
    case ProblemKind::quad100:
      return make_quad100();
    case ProblemKind::custom:
      if (spec.file.empty()) throw UsageError("--problem-file is required for --problem custom");
      try {
        return load_quadratic(spec.file);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--problem-file: ") + e.what());
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
  }
  throw UsageError("unknown problem kind");
}

namespace {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::quad3:
      return "quad3";
    case ProblemKind::quad100:
      return "quad100";
    case ProblemKind::custom:
      return "custom";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "quad3") return ProblemKind::quad3;
  if (text == "quad100") return ProblemKind::quad100;
  if (text == "custom") return ProblemKind::custom;
  throw UsageError("--problem: unknown problem '" + std::string(text) + "'");
}

std::string_view to_string(Emit e) {
  switch (e) {
    case Emit::traces:
      return "traces";
    case Emit::summary:
      return "summary";
    case Emit::lyapunov:
      return "lyapunov";
    case Emit::bounds:
      return "bounds";
  }
  return "unknown";
}

Emit parse_emit(std::string_view text) {
  if (text == "traces") return Emit::traces;
  if (text == "summary") return Emit::summary;
  if (text == "lyapunov") return Emit::lyapunov;
  if (text == "bounds") return Emit::bounds;
  throw UsageError("--emit: unknown output '" + std::string(text) + "'");
}

std::string_view to_string(StartPoint s) { return s == StartPoint::origin ? "origin" : "optimum"; }

StartPoint parse_start(std::string_view text) {
  if (text == "origin") return StartPoint::origin;
  if (text == "optimum") return StartPoint::optimum;
  throw UsageError("--start: expected 'origin' or 'optimum', got '" + std::string(text) + "'");
}

json method_to_json(const MethodConfig& m) {
  json j{{"method", to_string(m.method)},
         {"regime", to_string(m.regime)},
         {"mu", m.mu},
         {"L", m.L},
         {"sigma_g2", m.noise ? m.noise->sigma_g2 : 0.0},
         {"steps", m.steps},
         {"seed", m.seed}};
  if (m.start) j["start"] = to_string(*m.start);
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (replicates < 1) throw UsageError("--replicates must be >= 1");
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  if (methods.empty()) throw UsageError("--method: at least one method is required");
  const Objective obj = make_problem(problem);
  std::set<std::string> labels;
  for (const MethodConfig& m : methods) {
    if (m.method != Method::gd && m.regime == Regime::strongly_convex && !(m.mu > 0.0))
      throw UsageError("--mu must be > 0 with --regime strongly-convex");
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (m.noise && m.noise->sigma2_bound != obj.dim() * m.noise->sigma_g2)
      throw UsageError("--sigma-g2: noise bound does not match the problem dimension");
    if (!labels.insert(method_label(m)).second)
      throw UsageError("--method: duplicate method/regime pair " + method_label(m));
  }
}

json to_json(const ExperimentConfig& c) {
  json problem{{"kind", to_string(c.problem.kind)}};
  if (c.problem.kind == ProblemKind::quad3) {
    problem["mu"] = c.problem.mu;
    problem["L"] = c.problem.L;
  }
  if (c.problem.kind == ProblemKind::custom) problem["file"] = c.problem.file.string();
  json methods = json::array();
  for (const MethodConfig& m : c.methods) methods.push_back(method_to_json(m));
  json emit = json::array();
  for (Emit e : c.emit) emit.push_back(to_string(e));
  return {{"problem", problem}, {"methods", methods},   {"replicates", c.replicates},
          {"seed", c.seed_base}, {"jobs", c.jobs},      {"out", c.out_dir.string()},
          {"emit", emit}};
}

ExperimentConfig experiment_from_json(const json& doc) {
  try {
    ExperimentConfig c;
    const json& p = doc.at("problem");
    c.problem.kind = parse_problem_kind(p.at("kind").get<std::string>());
    c.problem.mu = p.value("mu", c.problem.mu);
    c.problem.L = p.value("L", c.problem.L);
    if (p.contains("file")) c.problem.file = p.at("file").get<std::string>();
    const Objective obj = make_problem(c.problem);

    c.replicates = doc.value("replicates", 1);
    c.seed_base = doc.value("seed", std::uint64_t{0});
    c.jobs = doc.value("jobs", 1);
    c.out_dir = doc.value("out", std::string("out"));
    if (doc.contains("emit")) {
      c.emit.clear();
      for (const auto& e : doc.at("emit")) c.emit.insert(parse_emit(e.get<std::string>()));
    }
    for (const json& m : doc.at("methods")) {
      MethodConfig mc;
      mc.method = parse_method(m.at("method").get<std::string>());
      mc.mu = m.value("mu", obj.mu());
      mc.L = m.value("L", obj.L());
      mc.regime = m.contains("regime") ? parse_regime(m.at("regime").get<std::string>())
                                       : (mc.mu > 0.0 ? Regime::strongly_convex : Regime::convex);
      const double sigma_g2 = m.value("sigma_g2", 0.0);
      if (sigma_g2 != 0.0) mc.noise = NoiseModel::isotropic(sigma_g2, obj.dim());
      mc.steps = m.value("steps", 1000L);
      mc.seed = c.seed_base;
      if (m.contains("start")) mc.start = parse_start(m.at("start").get<std::string>());
      c.methods.push_back(mc);
    }
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw UsageError(std::string("--config: ") + e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--config: ") + e.what());
  }
}

std::string_view to_string(Figure figure) {
  switch (figure) {
    case Figure::fig1_convex:
      return "fig1_convex";
    case Figure::fig1_strongly_convex:
      return "fig1_strongly_convex";
    case Figure::fig2_convex:
      return "fig2_convex";
    case Figure::fig2_strongly_convex:
      return "fig2_strongly_convex";
  }
  return "unknown";
}

Figure parse_figure(std::string_view text) {
  for (Figure f : {Figure::fig1_convex, Figure::fig1_strongly_convex, Figure::fig2_convex,
                   Figure::fig2_strongly_convex}) {
    if (text == to_string(f)) return f;
  }
  throw UsageError("--figure: unknown figure '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// CLI.

namespace {

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw UsageError("--config: " + path + ": " + e.what());
  }
  return experiment_from_json(doc);
}

}  // namespace

Command parse_cli(int argc, const char* const* argv) {
  CLI::App app{"Continuized Nesterov acceleration: experiments and diagnostics", "continuized"};
  app.require_subcommand(1);

  Command cmd;

  // run
  auto* run_cmd = app.add_subcommand("run", "Run methods on a problem and export traces");
  std::string problem = "quad3", problem_file, regime, config_path, start, out = "out";
  std::vector<std::string> methods{"continuized"}, emit;
  double mu = 0.0, L = 1.0, sigma_g2 = 0.0;
  long steps = 1000;
  int replicates = 1, jobs = 1;
  std::uint64_t seed = 0;
  auto* config_opt = run_cmd->add_option("--config", config_path, "Experiment JSON document");
  auto* problem_opt = run_cmd->add_option("--problem", problem, "quad3 | quad100 | custom");
  auto* problem_file_opt =
      run_cmd->add_option("--problem-file", problem_file, "JSON quadratic {coeffs, center}");
  auto* method_opt = run_cmd->add_option("--method", methods, "gd | nesterov | continuized")
                         ->take_all();
  auto* regime_opt = run_cmd->add_option("--regime", regime, "convex | strongly-convex");
  auto* mu_opt = run_cmd->add_option("--mu", mu, "Strong convexity parameter");
  auto* L_opt = run_cmd->add_option("--L", L, "Smoothness parameter");
  auto* sigma_opt =
      run_cmd->add_option("--sigma-g2", sigma_g2, "Per-coordinate gradient noise variance");
  auto* steps_opt = run_cmd->add_option("--steps", steps, "Gradient steps per run");
  auto* reps_opt = run_cmd->add_option("--replicates", replicates, "Independent replicates");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Base seed; replicate r uses seed + r");
  auto* jobs_opt = run_cmd->add_option("--jobs", jobs, "Concurrent replicates");
  auto* out_opt = run_cmd->add_option("--out", out, "Output directory");
  auto* emit_opt = run_cmd->add_option("--emit", emit, "traces | summary | lyapunov | bounds");
  auto* start_opt = run_cmd->add_option("--start", start, "origin | optimum");
  for (auto* opt : {problem_opt, problem_file_opt, method_opt, regime_opt, mu_opt, L_opt,
                    sigma_opt, steps_opt, reps_opt, seed_opt, emit_opt, start_opt}) {
    config_opt->excludes(opt);
  }

  // reproduce
  auto* repro_cmd = app.add_subcommand("reproduce", "Regenerate the comparison figure data");
  std::vector<std::string> figures;
  std::uint64_t figure_seed = 42;
  std::string repro_out = "figures";
  repro_cmd->add_option("--figure", figures,
                        "fig1_convex | fig1_strongly_convex | fig2_convex | fig2_strongly_convex");
  repro_cmd->add_option("--seed", figure_seed, "Seed of the single continuized run");
  repro_cmd->add_option("--out", repro_out, "Output directory");

  // aggregate
  auto* agg_cmd = app.add_subcommand("aggregate", "Per-k statistics over a directory of traces");
  std::string trace_dir, agg_out;
  agg_cmd->add_option("trace_dir", trace_dir, "Directory of trace CSVs")->required();
  agg_cmd->add_option("--out", agg_out, "Summary JSON path (stdout if omitted)");

  // check
  auto* check_cmd = app.add_subcommand("check", "Run the diagnostic suites");
  CheckOptions check;
  std::string check_out;
  check_cmd->add_option("--suite", check.suite, "all | schedules | clock | supermartingale | bounds");
  check_cmd->add_option("--replicates", check.replicates, "Replicates for Monte-Carlo checks");
  check_cmd->add_option("--seed", check.seed, "Base seed");
  check_cmd->add_option("--jobs", check.jobs, "Concurrent replicates");
  check_cmd->add_option("--out", check_out, "Report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    throw HelpRequested(parsed.empty() ? app.help() : parsed.front()->help());
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (run_cmd->parsed()) {
    cmd.sub = Subcommand::run;
    if (!config_path.empty()) {
      cmd.experiment = load_config_file(config_path);
      if (jobs_opt->count()) cmd.experiment.jobs = jobs;
      if (out_opt->count()) cmd.experiment.out_dir = out;
      cmd.experiment.validate();
      return cmd;
    }
    ExperimentConfig& c = cmd.experiment;
    c.problem.kind = parse_problem_kind(problem);
    if (problem_file_opt->count() && c.problem.kind != ProblemKind::custom)
      throw UsageError("--problem-file requires --problem custom");
    c.problem.file = problem_file;
    if (c.problem.kind == ProblemKind::quad3) {
      c.problem.mu = mu_opt->count() ? mu : 0.01;
      c.problem.L = L;
      if (!(L > 0.0)) throw UsageError("--L must be > 0");
      if (!(c.problem.mu > 0.0)) throw UsageError("--mu must be > 0 for --problem quad3");
      if (3.0 * c.problem.mu > c.problem.L) throw UsageError("--mu: quad3 requires 3 mu <= L");
    }
    const Objective obj = make_problem(c.problem);
    c.replicates = replicates;
    c.seed_base = seed;
    c.jobs = jobs;
    c.out_dir = out;
    if (!emit.empty()) {
      c.emit.clear();
      for (const auto& e : emit) c.emit.insert(parse_emit(e));
    }
    const double method_mu = mu_opt->count() ? mu : obj.mu();
    const double method_L = L_opt->count() ? L : obj.L();
    if (!(method_L > 0.0)) throw UsageError("--L must be > 0");
    Regime reg = method_mu > 0.0 ? Regime::strongly_convex : Regime::convex;
    if (regime_opt->count()) {
      try {
        reg = parse_regime(regime);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--regime: ") + e.what());
      }
    }
    if (!(sigma_g2 >= 0.0)) throw UsageError("--sigma-g2 must be >= 0");
    for (const std::string& name : methods) {
      MethodConfig m;
      try {
        m.method = parse_method(name);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--method: ") + e.what());
      }
      m.regime = reg;
      m.mu = method_mu;
      m.L = method_L;
      if (sigma_g2 > 0.0) m.noise = NoiseModel::isotropic(sigma_g2, obj.dim());
      m.steps = steps;
      m.seed = seed;
      if (start_opt->count()) m.start = parse_start(start);
      c.methods.push_back(m);
    }
    c.validate();
  } else if (repro_cmd->parsed()) {
    cmd.sub = Subcommand::reproduce;
    if (figures.empty()) {
      cmd.figures = {Figure::fig1_convex, Figure::fig1_strongly_convex, Figure::fig2_convex,
                     Figure::fig2_strongly_convex};
    }
    for (const auto& f : figures) cmd.figures.push_back(parse_figure(f));
    cmd.figure_seed = figure_seed;
    cmd.out = repro_out;
  } else if (agg_cmd->parsed()) {
    cmd.sub = Subcommand::aggregate;
    cmd.trace_dir = trace_dir;
    cmd.out = agg_out;
  } else {
    cmd.sub = Subcommand::check;
    if (check.replicates < 100) throw UsageError("--replicates must be >= 100 for check");
    if (check.jobs < 1) throw UsageError("--jobs must be >= 1");
    cmd.check = check;
    cmd.out = check_out;
  }
  return cmd;
}

// ---------------------------------------------------------------------------
// Traces.

std::string method_label(const MethodConfig& config) {
  return fmt::format("{}_{}", to_string(config.method), to_string(config.regime));
}

void write_trace_csv(std::ostream& out, int replicate, const RunTrace& trace) {
  out << kTraceHeader << '\n';
  for (const RunRecord& r : trace.records) {
    out << fmt::format("{},{},{:.17g},{:.17g},", replicate, r.k, r.t, r.f_gap);
    if (r.lyap) out << fmt::format("{:.17g}", *r.lyap);
    out << '\n';
  }
}

void write_trace_csv(const fs::path& path, int replicate, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_trace_csv(out, replicate, trace);
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& text, const fs::path& path, long line) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw UsageError(fmt::format("{}:{}: malformed number '{}'", path.string(), line, text));
  return v;
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

}  // namespace

ParsedTrace read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path.string() + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader)
    throw UsageError(path.string() + ": unexpected header '" + line + "'");
  ParsedTrace trace;
  long lineno = 1;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 5)
      throw UsageError(fmt::format("{}:{}: expected 5 columns", path.string(), lineno));
    const int rep = static_cast<int>(parse_double(f[0], path, lineno));
    if (first) trace.replicate = rep;
    first = false;
    RunRecord r;
    r.k = static_cast<long>(parse_double(f[1], path, lineno));
    r.t = parse_double(f[2], path, lineno);
    r.f_gap = parse_double(f[3], path, lineno);
    if (!f[4].empty()) r.lyap = parse_double(f[4], path, lineno);
    trace.records.push_back(r);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Aggregation.

Aggregate aggregate(const std::vector<ParsedTrace>& traces) {
  if (traces.empty()) throw UsageError("no traces to aggregate");
  const auto& ref = traces.front().records;
  for (const auto& t : traces) {
    if (t.records.size() != ref.size())
      throw UsageError("traces have different lengths");
    for (std::size_t i = 0; i < ref.size(); ++i) {
      if (t.records[i].k != ref[i].k) throw UsageError("traces have different k sequences");
    }
  }
  Aggregate agg;
  agg.replicates = static_cast<int>(traces.size());
  std::vector<double> gaps(traces.size()), times(traces.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t r = 0; r < traces.size(); ++r) {
      gaps[r] = traces[r].records[i].f_gap;
      times[r] = traces[r].records[i].t;
    }
    const SampleSummary s = summarize(gaps);
    agg.k.push_back(ref[i].k);
    agg.t_mean.push_back(summarize(times).mean);
    agg.mean.push_back(s.mean);
    agg.sem.push_back(s.sem);
    agg.min.push_back(s.min);
    agg.max.push_back(s.max);
  }
  return agg;
}

Aggregate aggregate(const fs::path& trace_dir) {
  std::error_code ec;
  if (!fs::is_directory(trace_dir, ec)) throw IoError("not a directory: " + trace_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trace_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + trace_dir.string() + ": " + ec.message());
  if (files.empty()) throw UsageError("no trace CSVs in " + trace_dir.string());
  std::sort(files.begin(), files.end());
  std::vector<ParsedTrace> traces;
  traces.reserve(files.size());
  for (const auto& f : files) traces.push_back(read_trace_csv(f));
  return aggregate(traces);
}

json to_json(const Aggregate& agg) {
  return {{"replicates", agg.replicates}, {"k", agg.k},     {"t_mean", agg.t_mean},
          {"mean", agg.mean},             {"sem", agg.sem}, {"min", agg.min},
          {"max", agg.max}};
}

// ---------------------------------------------------------------------------
// Experiments.

namespace {

ParsedTrace to_parsed(int replicate, const RunTrace& trace) {
  return {replicate, trace.records};
}

json bound_reports(const MethodConfig& m, const Objective& obj, const std::vector<RunTrace>& traces,
                   const ExperimentConfig& config) {
  json out = json::array();
  const bool noisy = m.noise && m.noise->sigma_g2 > 0.0;
  switch (m.method) {
    case Method::gd:
      out.push_back(to_json(bound_check_deterministic(traces.front(), obj,
                                                      DeterministicBound::thm1_cvx)));
      if (m.mu > 0.0)
        out.push_back(to_json(bound_check_deterministic(traces.front(), obj,
                                                        DeterministicBound::thm1_str)));
      break;
    case Method::nesterov:
      out.push_back(to_json(bound_check_deterministic(
          traces.front(), obj,
          m.regime == Regime::convex ? DeterministicBound::thm2_cvx
                                     : DeterministicBound::thm2_str)));
      break;
    case Method::continuized:
      if (traces.size() < 100) {
        out.push_back({{"skipped", "continuized bounds need >= 100 replicates"}});
      } else if (!noisy) {
        std::vector<long> ks{std::max(1L, m.steps / 10), std::max(1L, m.steps / 2), m.steps};
        out.push_back(to_json(bound_check_continuized(
            traces, obj,
            m.regime == Regime::convex ? ContinuizedBound::thm5_cvx : ContinuizedBound::thm5_str,
            ks)));
      } else {
        std::vector<double> grid;
        for (int j = 1; j <= 10; ++j) grid.push_back(static_cast<double>(m.steps) * j / 10.0);
        const GridSamples samples = sample_on_grid(m, obj, grid, static_cast<int>(traces.size()),
                                                   config.jobs);
        out.push_back(to_json(bound_check_continuized(
            samples, obj,
            m.regime == Regime::convex ? ContinuizedBound::thm6_cvx : ContinuizedBound::thm6_str)));
      }
      break;
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Objective obj = make_problem(config.problem);
  ensure_directory(config.out_dir);

  ExperimentResult result;
  json methods = json::array();
  for (const MethodConfig& base : config.methods) {
    const std::string label = method_label(base);
    const fs::path dir = config.out_dir / label;
    const bool emit_traces = config.emit.count(Emit::traces) > 0;
    if (emit_traces) ensure_directory(dir);

    std::vector<RunTrace> traces(static_cast<std::size_t>(config.replicates));
    std::vector<fs::path> files(traces.size());
    detail::parallel_for(traces.size(), config.jobs, [&](std::size_t r) {
      MethodConfig m = base;
      m.seed = config.seed_base + r;
      traces[r] = run(m, obj);
      if (emit_traces) {
        files[r] = dir / fmt::format("replicate_{:04d}.csv", r);
        write_trace_csv(files[r], static_cast<int>(r), traces[r]);
      }
    });
    if (emit_traces) result.trace_files.insert(result.trace_files.end(), files.begin(), files.end());

    std::vector<ParsedTrace> parsed;
    json final_gaps = json::array();
    for (std::size_t r = 0; r < traces.size(); ++r) {
      parsed.push_back(to_parsed(static_cast<int>(r), traces[r]));
      final_gaps.push_back(traces[r].records.back().f_gap);
    }
    json entry{{"label", label},
               {"config", method_to_json(base)},
               {"replicates", config.replicates},
               {"final_f_gap", final_gaps},
               {"aggregate", to_json(aggregate(parsed))}};
    if (emit_traces) entry["trace_dir"] = dir.string();

    if (config.emit.count(Emit::lyapunov) && base.method == Method::continuized &&
        !(base.noise && base.noise->sigma_g2 > 0.0)) {
      std::vector<double> grid;
      for (int j = 0; j < 20; ++j) grid.push_back(static_cast<double>(base.steps) * j / 20.0);
      MethodConfig m = base;
      m.seed = config.seed_base;
      entry["lyapunov"] =
          to_json(supermartingale_check(m, obj, grid, std::max(100, config.replicates), config.jobs));
    }
    if (config.emit.count(Emit::bounds)) entry["bounds"] = bound_reports(base, obj, traces, config);
    methods.push_back(std::move(entry));
  }

  result.summary = {{"problem", obj.name()},
                    {"config", to_json(config)},
                    {"methods", std::move(methods)}};
  if (config.emit.count(Emit::summary)) {
    result.summary_file = config.out_dir / "summary.json";
    write_json_file(result.summary_file, result.summary);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Figures.

FigureData simulate_figure(Figure which, std::uint64_t seed) {
  const bool convex = which == Figure::fig1_convex || which == Figure::fig2_convex;
  const bool noisy = which == Figure::fig2_convex || which == Figure::fig2_strongly_convex;
  constexpr double kMu = 1e-2;
  constexpr double kL = 1.0;
  constexpr double kNoiseVariance = 1e-4;
  const Objective obj = convex ? make_quad100() : make_quad3(kMu, kL);

  FigureData data{which, obj.name(), {}, {}};
  for (Method method : {Method::gd, Method::nesterov, Method::continuized}) {
    MethodConfig m;
    m.method = method;
    m.regime = convex ? Regime::convex : Regime::strongly_convex;
    m.mu = convex ? 0.0 : kMu;
    m.L = kL;
    m.steps = convex ? 1000 : 600;
    m.seed = seed;
    m.start = noisy ? StartPoint::optimum : StartPoint::origin;
    if (noisy) m.noise = NoiseModel::isotropic(kNoiseVariance, obj.dim());
    data.traces.emplace(method, run(m, obj));
  }
  return data;
}

FigureData reproduce_figure(Figure which, const fs::path& out_dir, std::uint64_t seed) {
  FigureData data = simulate_figure(which, seed);
  const fs::path dir = out_dir / std::string(to_string(which));
  ensure_directory(dir);
  for (const auto& [method, trace] : data.traces) {
    const fs::path file = dir / fmt::format("{}.csv", to_string(method));
    write_trace_csv(file, 0, trace);
    data.files.push_back(file);
  }
  return data;
}

// ---------------------------------------------------------------------------
// Diagnostic suites.

namespace {

std::vector<double> range_grid(double start, double step, int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(start + step * i);
  return g;
}

void check_schedules(std::vector<CheckResult>& out) {
  const std::vector<double> grid = range_grid(0.1, 0.1, 1000);
  for (Regime regime : {Regime::convex, Regime::strongly_convex}) {
    const ContinuousSchedule sched(regime, regime == Regime::convex ? 0.0 : 0.01, 1.0);
    const ScheduleResiduals res = schedule_residuals(sched, grid);
    out.push_back({fmt::format("schedule identities ({})", to_string(regime)),
                   res.consistency <= 1e-10 && res.ode <= 1e-6,
                   {{"consistency", res.consistency}, {"ode", res.ode}}});
  }
}

void check_clock(std::vector<CheckResult>& out, std::uint64_t seed) {
  constexpr std::size_t n = 100000;
  RandomStream rng(seed, kClockStream);
  std::vector<double> draws(n);
  for (auto& d : draws) d = sample_interarrival(rng);
  const ErlangStats s1 = erlang_report(draws, 1);
  const double tol_mean = 4.0 / std::sqrt(static_cast<double>(n));
  const double tol_var = 4.0 * std::sqrt(8.0 / static_cast<double>(n));
  out.push_back({"exp(1) interarrivals",
                 std::abs(s1.mean - 1.0) <= tol_mean && std::abs(s1.variance - 1.0) <= tol_var &&
                     s1.ks_distance <= ks_critical(1e-3, n),
                 to_json(s1)});

  constexpr long k = 100;
  constexpr std::size_t reps = 10000;
  std::vector<double> tk(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    JumpClock clock(RandomStream(seed + 1 + r, kClockStream));
    for (long i = 0; i < k; ++i) clock.advance();
    tk[r] = clock.time();
  }
  const ErlangStats s100 = erlang_report(tk, k);
  out.push_back({"erlang(100) jump times",
                 std::abs(s100.mean - k) <= 4.0 * std::sqrt(static_cast<double>(k) / reps) &&
                     s100.ks_distance <= ks_critical(1e-3, reps),
                 to_json(s100)});
}

void check_supermartingale(std::vector<CheckResult>& out, const CheckOptions& opt) {
  const Objective q3 = make_quad3(0.01, 1.0);
  const Objective q100 = make_quad100();
  MethodConfig sc;
  sc.regime = Regime::strongly_convex;
  sc.mu = 0.01;
  sc.L = 1.0;
  sc.seed = opt.seed;
  sc.steps = 1;
  const auto c1 = supermartingale_check(sc, q3, range_grid(0.0, 2.5, 20), opt.replicates, opt.jobs);
  out.push_back({"supermartingale quad3 strongly-convex", c1.monotone_ok, to_json(c1)});

  MethodConfig cv = sc;
  cv.regime = Regime::convex;
  cv.mu = 0.0;
  const auto c2 = supermartingale_check(cv, q100, range_grid(0.0, 5.0, 20), opt.replicates, opt.jobs);
  out.push_back({"supermartingale quad100 convex", c2.monotone_ok, to_json(c2)});
}

std::vector<RunTrace> replicate_runs(MethodConfig m, const Objective& obj, int replicates,
                                     int jobs) {
  std::vector<RunTrace> traces(static_cast<std::size_t>(replicates));
  const std::uint64_t base = m.seed;
  detail::parallel_for(traces.size(), jobs, [&](std::size_t r) {
    MethodConfig mr = m;
    mr.seed = base + r;
    traces[r] = run(mr, obj);
  });
  return traces;
}

void check_bounds(std::vector<CheckResult>& out, const CheckOptions& opt) {
  const Objective q3 = make_quad3(0.01, 1.0);
  const Objective q100 = make_quad100();
  auto add = [&out](const BoundReport& r) { out.push_back({r.bound_name, r.satisfied, to_json(r)}); };

  MethodConfig m;
  m.method = Method::gd;
  m.regime = Regime::convex;
  m.steps = 2000;
  add(bound_check_deterministic(run(m, q100), q100, DeterministicBound::thm1_cvx));
  m.method = Method::nesterov;
  add(bound_check_deterministic(run(m, q100), q100, DeterministicBound::thm2_cvx));
  m.regime = Regime::strongly_convex;
  m.mu = 0.01;
  m.steps = 600;
  add(bound_check_deterministic(run(m, q3), q3, DeterministicBound::thm2_str));

  MethodConfig c;
  c.method = Method::continuized;
  c.seed = opt.seed;
  c.regime = Regime::convex;
  c.steps = 100;
  const int reps = std::min(opt.replicates, 200);
  add(bound_check_continuized(replicate_runs(c, q100, reps, opt.jobs), q100,
                              ContinuizedBound::thm5_cvx, {10, 50, 100}));
  c.regime = Regime::strongly_convex;
  c.mu = 0.01;
  c.steps = 200;
  add(bound_check_continuized(replicate_runs(c, q3, reps, opt.jobs), q3, ContinuizedBound::thm5_str,
                              {50, 200}));

  c.start = StartPoint::optimum;
  c.noise = NoiseModel::isotropic(1e-4, q3.dim());
  add(bound_check_continuized(sample_on_grid(c, q3, range_grid(50.0, 5.0, 11), reps, opt.jobs), q3,
                              ContinuizedBound::thm6_str));
  c.regime = Regime::convex;
  c.mu = 0.0;
  c.noise = NoiseModel::isotropic(1e-4, q100.dim());
  add(bound_check_continuized(sample_on_grid(c, q100, range_grid(5.0, 5.0, 20), reps, opt.jobs),
                              q100, ContinuizedBound::thm6_cvx));
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& opt) {
  const bool all = opt.suite == "all";
  std::vector<CheckResult> out;
  bool known = all;
  if (all || opt.suite == "schedules") {
    check_schedules(out);
    known = true;
  }
  if (all || opt.suite == "clock") {
    check_clock(out, opt.seed);
    known = true;
  }
  if (all || opt.suite == "supermartingale") {
    check_supermartingale(out, opt);
    known = true;
  }
  if (all || opt.suite == "bounds") {
    check_bounds(out, opt);
    known = true;
  }
  if (!known) throw UsageError("--suite: unknown suite '" + opt.suite + "'");
  return out;
}

// ---------------------------------------------------------------------------

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const Command cmd = parse_cli(argc, argv);
    switch (cmd.sub) {
      case Subcommand::run: {
        const ExperimentResult res = run_experiment(cmd.experiment);
        for (const auto& m : res.summary.at("methods")) {
          const auto& agg = m.at("aggregate");
          out << fmt::format("{}: {} replicate(s), final mean f_gap {:.6g}\n",
                             m.at("label").get<std::string>(), agg.at("replicates").get<int>(),
                             agg.at("mean").back().get<double>());
        }
        if (!res.summary_file.empty()) out << "summary: " << res.summary_file.string() << '\n';
        return kExitOk;
      }
      case Subcommand::reproduce: {
        for (Figure f : cmd.figures) {
          const FigureData data = reproduce_figure(f, cmd.out, cmd.figure_seed);
          for (const auto& file : data.files) out << file.string() << '\n';
        }
        return kExitOk;
      }
      case Subcommand::aggregate: {
        const json doc = to_json(aggregate(cmd.trace_dir));
        if (cmd.out.empty()) {
          out << doc.dump(2) << '\n';
        } else {
          write_json_file(cmd.out, doc);
        }
        return kExitOk;
      }
      case Subcommand::check: {
        const auto results = run_checks(cmd.check);
        bool ok = true;
        json report = json::array();
        for (const auto& r : results) {
          out << (r.passed ? "PASS  " : "FAIL  ") << r.name << '\n';
          ok = ok && r.passed;
          report.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        }
        if (!cmd.out.empty()) write_json_file(cmd.out, report);
        return ok ? kExitOk : kExitCheckFailed;
      }
    }
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitOk;
}

}  // namespace continuized::harness
