#include "hillvallea/sweep.hpp"

#include "hillvallea/evaluation.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace hillvallea {

void validate(const RunConfig& config) {
  if (config.problem_ids.empty()) throw std::invalid_argument("no problems selected");
  if (config.repetitions < 1) throw std::invalid_argument("--reps must be at least 1");
  if (config.budget && *config.budget < 1) throw std::invalid_argument("--budget must be positive");
  if (config.budget_multiplier && !(*config.budget_multiplier > 0.0)) {
    throw std::invalid_argument("--budget-multiplier must be positive");
  }
  if (!(config.epsilon > 0.0)) throw std::invalid_argument("--epsilon must be positive");
  if (!(config.optimizer.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (config.trace_step && *config.trace_step < 1) throw std::invalid_argument("--trace must be positive");
  if (config.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");
  if (config.optimizer.postprocess_test_points < 1) {
    throw std::invalid_argument("--postprocess-test-points must be at least 1");
  }
  for (int id : config.problem_ids) make_problem(id);
}

namespace {

int parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw std::invalid_argument("malformed problem id '" + std::string(text) + "'");
  }
  return value;
}

bool is_numeric_range(std::string_view token) {
  const auto dash = token.find('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 1 == token.size()) return false;
  auto digits = [](std::string_view s) { return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }); };
  return digits(token.substr(0, dash)) && digits(token.substr(dash + 1));
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace

std::vector<int> parse_problem_list(std::string_view text) {
  std::vector<int> ids;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto token = trim(text.substr(start, end - start));
    start = end + 1;
    if (token.empty()) {
      throw std::invalid_argument("empty entry in problem list");
    }
    if (is_numeric_range(token)) {
      const auto dash = token.find('-');
      const int lo = parse_int(std::string_view(token).substr(0, dash));
      const int hi = parse_int(std::string_view(token).substr(dash + 1));
      if (lo > hi) throw std::invalid_argument("descending problem range '" + token + "'");
      for (int id = lo; id <= hi; ++id) ids.push_back(id);
      continue;
    }
    const auto id = problem_id_from_name(token);
    if (!id) throw std::invalid_argument("unknown problem '" + token + "'");
    ids.push_back(*id);
  }
  return ids;
}

std::int64_t run_budget(const RunConfig& config, const BenchmarkProblem& problem) {
  std::int64_t budget = config.budget.value_or(problem.budget);
  if (config.budget_multiplier) {
    budget = std::llround(static_cast<double>(budget) * *config.budget_multiplier);
  }
  return std::max<std::int64_t>(1, budget);
}

std::vector<TraceRow> trace_rows(const RunResult& result, const BenchmarkProblem& problem, std::uint64_t seed,
                                 std::int64_t step, double epsilon) {
  std::vector<TraceRow> rows;
  const bool has_ground_truth = !problem.known_global_optima.empty();
  std::size_t next = 0;
  const std::vector<Solution>* archive = nullptr;
  auto emit = [&](std::int64_t evaluations) {
    while (next < result.trace.size() && result.trace[next].evaluations <= evaluations) {
      archive = &result.trace[next].elites;
      ++next;
    }
    TraceRow row{problem.id, seed, evaluations, 0.0, archive ? archive->size() : 0};
    if (archive && has_ground_truth) row.peak_ratio = peak_ratio(*archive, problem, epsilon).ratio;
    rows.push_back(row);
  };
  for (std::int64_t at = step; at < result.evaluations_used; at += step) emit(at);
  emit(result.evaluations_used);
  return rows;
}

SweepOutput execute_sweep(const RunConfig& config) {
  validate(config);
  std::vector<BenchmarkProblem> problems;
  for (int id : config.problem_ids) problems.push_back(make_problem(id));

  const auto reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t total = problems.size() * reps;
  std::vector<RunRecord> records(total);
  std::vector<RunResult> results(total);
  std::vector<PeakRatioReport> reports(total);
  std::vector<std::vector<TraceRow>> traces(total);

  auto run_one = [&](std::size_t job) {
    const auto& problem = problems[job / reps];
    const auto rep = job % reps;
    const std::uint64_t seed = config.base_seed + rep;

    OptimizerConfig optimizer = config.optimizer;
    optimizer.budget = run_budget(config, problem);

    const auto started = std::chrono::steady_clock::now();
    auto result = run_hillvallea(problem, config.kind, optimizer, seed);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);

    auto report = peak_ratio(result.archive.elites, problem, config.epsilon);
    RunRecord& r = records[job];
    r.problem_id = problem.id;
    r.kind = std::string(to_string(config.kind));
    r.seed = seed;
    r.evaluations_used = result.evaluations_used;
    r.peak_ratio = report.ratio;
    r.n_elites = result.archive.size();
    r.restarts = result.restarts;
    r.phase_init = result.phase_fraction(Phase::init);
    r.phase_hvc = result.phase_fraction(Phase::clustering) + result.phase_fraction(Phase::postprocess);
    r.phase_lopt = result.phase_fraction(Phase::local_opt);
    r.wall_time_ms = elapsed.count();
    if (config.trace_step) {
      traces[job] = trace_rows(result, problem, seed, *config.trace_step, config.epsilon);
    }
    result.trace.clear();
    results[job] = std::move(result);
    reports[job] = std::move(report);
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), total);
  if (workers <= 1) {
    for (std::size_t job = 0; job < total; ++job) run_one(job);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto job = next++; job < total; job = next++) {
          try {
            run_one(job);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  SweepOutput output;
  output.runs = std::move(records);
  for (std::size_t p = 0; p < problems.size(); ++p) {
    const std::span<const RunResult> rs(results.data() + p * reps, reps);
    const std::span<const PeakRatioReport> prs(reports.data() + p * reps, reps);
    const auto summary = aggregate(rs, prs);
    AggregateRecord a;
    a.problem_id = problems[p].id;
    a.kind = std::string(to_string(config.kind));
    a.runs = summary.runs;
    a.mean_peak_ratio = summary.mean_ratio;
    a.min_peak_ratio = summary.min_ratio;
    a.max_peak_ratio = summary.max_ratio;
    a.mean_evaluations = summary.mean_evaluations;
    a.mean_phase_init = summary.mean_phase_fractions[static_cast<std::size_t>(Phase::init)];
    a.mean_phase_hvc = summary.mean_phase_fractions[static_cast<std::size_t>(Phase::clustering)] +
                       summary.mean_phase_fractions[static_cast<std::size_t>(Phase::postprocess)];
    a.mean_phase_lopt = summary.mean_phase_fractions[static_cast<std::size_t>(Phase::local_opt)];
    output.aggregates.push_back(std::move(a));
  }
  for (auto& t : traces) output.traces.insert(output.traces.end(), t.begin(), t.end());
  return output;
}

void write_json(const SweepOutput& output, std::ostream& out) {
  using nlohmann::json;
  json doc;
  doc["runs"] = json::array();
  for (const auto& r : output.runs) {
    doc["runs"].push_back({{"problem_id", r.problem_id},
                           {"kind", r.kind},
                           {"seed", r.seed},
                           {"evaluations_used", r.evaluations_used},
                           {"peak_ratio", r.peak_ratio},
                           {"n_elites", r.n_elites},
                           {"restarts", r.restarts},
                           {"phase_init", r.phase_init},
                           {"phase_hvc", r.phase_hvc},
                           {"phase_lopt", r.phase_lopt},
                           {"wall_time_ms", r.wall_time_ms}});
  }
  doc["aggregates"] = json::array();
  for (const auto& a : output.aggregates) {
    doc["aggregates"].push_back({{"problem_id", a.problem_id},
                                 {"kind", a.kind},
                                 {"runs", a.runs},
                                 {"mean_peak_ratio", a.mean_peak_ratio},
                                 {"min_peak_ratio", a.min_peak_ratio},
                                 {"max_peak_ratio", a.max_peak_ratio},
                                 {"mean_evaluations", a.mean_evaluations},
                                 {"mean_phase_init", a.mean_phase_init},
                                 {"mean_phase_hvc", a.mean_phase_hvc},
                                 {"mean_phase_lopt", a.mean_phase_lopt}});
  }
  if (!output.traces.empty()) {
    doc["traces"] = json::array();
    for (const auto& t : output.traces) {
      doc["traces"].push_back({{"problem_id", t.problem_id},
                               {"seed", t.seed},
                               {"evaluations", t.evaluations},
                               {"peak_ratio", t.peak_ratio},
                               {"archive_size", t.archive_size}});
    }
  }
  out << doc.dump(2) << '\n';
}

void write_runs_csv(const std::vector<RunRecord>& runs, std::ostream& out) {
  out << run_csv_header << '\n';
  for (const auto& r : runs) {
    out << r.problem_id << ',' << r.kind << ',' << r.seed << ',' << r.evaluations_used << ','
        << format_double(r.peak_ratio) << ',' << r.n_elites << ',' << r.restarts << ','
        << format_double(r.phase_init) << ',' << format_double(r.phase_hvc) << ',' << format_double(r.phase_lopt)
        << ',' << format_double(r.wall_time_ms) << '\n';
  }
}

void write_aggregates_csv(const std::vector<AggregateRecord>& aggregates, std::ostream& out) {
  out << "problem_id,kind,runs,mean_peak_ratio,min_peak_ratio,max_peak_ratio,mean_evaluations,mean_phase_init,"
         "mean_phase_hvc,mean_phase_lopt\n";
  for (const auto& a : aggregates) {
    out << a.problem_id << ',' << a.kind << ',' << a.runs << ',' << format_double(a.mean_peak_ratio) << ','
        << format_double(a.min_peak_ratio) << ',' << format_double(a.max_peak_ratio) << ','
        << format_double(a.mean_evaluations) << ',' << format_double(a.mean_phase_init) << ','
        << format_double(a.mean_phase_hvc) << ',' << format_double(a.mean_phase_lopt) << '\n';
  }
}

void write_trace_csv(const std::vector<TraceRow>& rows, std::ostream& out) {
  out << "problem_id,seed,evaluations,peak_ratio,archive_size\n";
  for (const auto& t : rows) {
    out << t.problem_id << ',' << t.seed << ',' << t.evaluations << ',' << format_double(t.peak_ratio) << ','
        << t.archive_size << '\n';
  }
}

std::string companion_path(const std::string& path, std::string_view suffix) {
  std::filesystem::path p(path);
  auto stem = p.stem().string();
  auto extension = p.extension().string();
  if (extension.empty()) extension = ".csv";
  return (p.parent_path() / (stem + "." + std::string(suffix) + extension)).string();
}

namespace {

void open_and_write(const std::string& path, auto&& writer) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  writer(file);
  if (!file) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace

int run_sweep(const RunConfig& config, std::ostream& log, std::ostream& err) {
  SweepOutput output;
  try {
    output = execute_sweep(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!config.output_path.empty()) {
      if (config.format == OutputFormat::json) {
        open_and_write(config.output_path, [&](std::ostream& o) { write_json(output, o); });
      } else {
        open_and_write(config.output_path, [&](std::ostream& o) { write_runs_csv(output.runs, o); });
        open_and_write(companion_path(config.output_path, "aggregates"),
                       [&](std::ostream& o) { write_aggregates_csv(output.aggregates, o); });
        if (config.trace_step) {
          open_and_write(companion_path(config.output_path, "trace"),
                         [&](std::ostream& o) { write_trace_csv(output.traces, o); });
        }
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }

  log << std::left << std::setw(8) << "problem" << std::setw(6) << "kind" << std::setw(6) << "runs"
      << std::setw(10) << "mean_pr" << std::setw(10) << "min_pr" << std::setw(10) << "max_pr" << std::setw(14)
      << "mean_evals" << "init/hvc/lopt\n";
  for (const auto& a : output.aggregates) {
    log << std::setw(8) << a.problem_id << std::setw(6) << a.kind << std::setw(6) << a.runs << std::fixed
        << std::setprecision(3) << std::setw(10) << a.mean_peak_ratio << std::setw(10) << a.min_peak_ratio
        << std::setw(10) << a.max_peak_ratio << std::setprecision(0) << std::setw(14) << a.mean_evaluations
        << std::setprecision(2) << a.mean_phase_init << '/' << a.mean_phase_hvc << '/' << a.mean_phase_lopt << '\n'
        << std::defaultfloat;
  }
  return 0;
}

}  // namespace hillvallea
