#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "continuized/diagnostics.hpp"
#include "continuized/methods.hpp"
#include "continuized/oracle.hpp"

namespace continuized::harness {

/// Invalid flags or configuration. Exit code 1.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File system failure, message names the path. Exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitIo = 3;

/// Header shared by every emitted trace CSV.
inline constexpr std::string_view kTraceHeader = "replicate,k,t,f_gap,lyap";

enum class ProblemKind { quad3, quad100, custom };

struct ProblemSpec {
  ProblemKind kind = ProblemKind::quad3;
  double mu = 0.01;  // quad3 only
  double L = 1.0;    // quad3 only
  std::filesystem::path file;  // custom only
};

Objective make_problem(const ProblemSpec& spec);

enum class Emit { traces, summary, lyapunov, bounds };

struct ExperimentConfig {
  ProblemSpec problem;
  std::vector<MethodConfig> methods;
  int replicates = 1;
  std::uint64_t seed_base = 0;
  int jobs = 1;
  std::filesystem::path out_dir = "out";
  std::set<Emit> emit{Emit::traces, Emit::summary};

  /// Throws UsageError.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Throws UsageError on schema problems.
ExperimentConfig experiment_from_json(const nlohmann::json& doc);

enum class Figure { fig1_convex, fig1_strongly_convex, fig2_convex, fig2_strongly_convex };

std::string_view to_string(Figure figure);
Figure parse_figure(std::string_view text);

enum class Subcommand { run, reproduce, aggregate, check };

struct CheckOptions {
  std::string suite = "all";
  int replicates = 500;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct Command {
  Subcommand sub = Subcommand::run;
  ExperimentConfig experiment;          // run
  std::vector<Figure> figures;          // reproduce
  std::uint64_t figure_seed = 42;       // reproduce
  std::filesystem::path trace_dir;      // aggregate
  std::filesystem::path out;            // reproduce, aggregate, check
  CheckOptions check;                   // check
};

/// Parses argv (argv[0] is the program name). Throws UsageError naming the
/// offending flag; --help is reported through HelpRequested.
Command parse_cli(int argc, const char* const* argv);

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text) : text_(std::move(text)) {}
  const char* what() const noexcept override { return text_.c_str(); }

 private:
  std::string text_;
};

// ---------------------------------------------------------------------------

/// Directory name of one method inside an experiment: "<method>_<regime>".
std::string method_label(const MethodConfig& config);

void write_trace_csv(std::ostream& out, int replicate, const RunTrace& trace);
void write_trace_csv(const std::filesystem::path& path, int replicate, const RunTrace& trace);

struct ParsedTrace {
  int replicate = 0;
  std::vector<RunRecord> records;
};

ParsedTrace read_trace_csv(const std::filesystem::path& path);

struct ExperimentResult {
  std::vector<std::filesystem::path> trace_files;
  std::filesystem::path summary_file;
  nlohmann::json summary;
};

/// Runs every method for every replicate (seed = seed_base + replicate),
/// writing <out>/<label>/replicate_NNNN.csv and <out>/summary.json.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct Aggregate {
  int replicates = 0;
  std::vector<long> k;
  std::vector<double> t_mean;
  std::vector<double> mean;
  std::vector<double> sem;
  std::vector<double> min;
  std::vector<double> max;
};

/// Per-k statistics of f_gap over all replicate_*.csv / *.csv traces in a
/// directory. Throws UsageError on schema mismatch, IoError on read failure.
Aggregate aggregate(const std::filesystem::path& trace_dir);
Aggregate aggregate(const std::vector<ParsedTrace>& traces);
nlohmann::json to_json(const Aggregate& agg);

struct FigureData {
  Figure figure;
  std::string problem;
  std::map<Method, RunTrace> traces;
  std::vector<std::filesystem::path> files;
};

/// Runs gd, Nesterov and one continuized run on the figure's problem and
/// writes <out>/<figure>/<method>.csv.
FigureData reproduce_figure(Figure which, const std::filesystem::path& out_dir,
                            std::uint64_t seed = 42);

/// Runs the figure without touching the file system.
FigureData simulate_figure(Figure which, std::uint64_t seed = 42);

// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json detail;
};

/// Diagnostic suites: "schedules", "clock", "supermartingale", "bounds" or "all".
std::vector<CheckResult> run_checks(const CheckOptions& options);

/// Full CLI entry; returns the process exit code.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace continuized::harness
