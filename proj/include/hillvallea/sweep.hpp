#pragma once

#include "hillvallea/core_search.hpp"
#include "hillvallea/optimizer.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hillvallea {

enum class OutputFormat { json, csv };

/// A repetition sweep over benchmark problems with one searcher kind.
struct RunConfig {
  std::vector<int> problem_ids;
  SearcherKind kind = SearcherKind::amu;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  std::optional<std::int64_t> budget;
  std::optional<double> budget_multiplier;
  double epsilon = 1e-5;
  /// Evaluations between convergence-trace rows; no trace when empty.
  std::optional<std::int64_t> trace_step;
  std::string output_path;
  OutputFormat format = OutputFormat::json;
  int jobs = 1;
  /// tol, injection mode, growth factors and searcher constants.
  OptimizerConfig optimizer;
};

/// Throws std::invalid_argument describing the first invalid field.
void validate(const RunConfig& config);

/// Parses "1-5,10", "himmelblau,7" and similar lists. Throws
/// std::invalid_argument on unknown names or malformed ranges.
std::vector<int> parse_problem_list(std::string_view text);

struct RunRecord {
  int problem_id = 0;
  std::string kind;
  std::uint64_t seed = 0;
  std::int64_t evaluations_used = 0;
  double peak_ratio = 0.0;
  std::size_t n_elites = 0;
  int restarts = 0;
  double phase_init = 0.0;
  double phase_hvc = 0.0;  // clustering and post-processing hill-valley tests
  double phase_lopt = 0.0;
  double wall_time_ms = 0.0;
};

struct AggregateRecord {
  int problem_id = 0;
  std::string kind;
  std::size_t runs = 0;
  double mean_peak_ratio = 0.0;
  double min_peak_ratio = 0.0;
  double max_peak_ratio = 0.0;
  double mean_evaluations = 0.0;
  double mean_phase_init = 0.0;
  double mean_phase_hvc = 0.0;
  double mean_phase_lopt = 0.0;
};

struct TraceRow {
  int problem_id = 0;
  std::uint64_t seed = 0;
  std::int64_t evaluations = 0;
  double peak_ratio = 0.0;
  std::size_t archive_size = 0;
};

struct SweepOutput {
  std::vector<RunRecord> runs;
  std::vector<AggregateRecord> aggregates;
  std::vector<TraceRow> traces;
};

/// Effective budget of one run of `problem` under `config`.
std::int64_t run_budget(const RunConfig& config, const BenchmarkProblem& problem);

/// Runs every (problem, repetition) pair, seed = base_seed + repetition.
/// Results are ordered by problem then repetition regardless of `jobs`.
SweepOutput execute_sweep(const RunConfig& config);

/// Samples a run's archive history at every multiple of `step` evaluations
/// and at the final evaluation count.
std::vector<TraceRow> trace_rows(const RunResult& result, const BenchmarkProblem& problem, std::uint64_t seed,
                                 std::int64_t step, double epsilon);

inline constexpr std::string_view run_csv_header =
    "problem_id,kind,seed,evaluations_used,peak_ratio,n_elites,restarts,phase_init,phase_hvc,phase_lopt,"
    "wall_time_ms";

void write_json(const SweepOutput& output, std::ostream& out);
void write_runs_csv(const std::vector<RunRecord>& runs, std::ostream& out);
void write_aggregates_csv(const std::vector<AggregateRecord>& aggregates, std::ostream& out);
void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out);

/// Side-file path for CSV output, e.g. ("out/results.csv", "trace") gives
/// "out/results.trace.csv".
std::string companion_path(const std::string& path, std::string_view suffix);

/// Executes the sweep, writes the requested files and prints a per-problem
/// summary to `log`. Returns 0 on success; diagnostics go to `err`.
int run_sweep(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace hillvallea
