#include "hillvallea/cli.hpp"

#include "CLI11.hpp"

#include <ostream>
#include <string>

namespace hillvallea {

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& exit_code) {
  RunConfig config;
  auto& opt = config.optimizer;
  auto& searcher = opt.searcher;

  CLI::App app{"Multi-modal benchmark sweeps with the hill-valley evolutionary algorithm", "hillvallea"};
  app.set_config("--config", "", "key=value file mirroring the long flags");

  std::vector<std::string> problem_tokens;
  app.add_option("--problems", problem_tokens, "problem ids, ranges or names, e.g. 1-5,10")
      ->required()
      ->delimiter(',');

  std::string kind = "amu";
  app.add_option("--algo", kind, "core search algorithm")
      ->check(CLI::IsMember({"cmsa", "am", "amu", "iam", "iamu"}));
  app.add_option("--reps", config.repetitions, "repetitions per problem")->check(CLI::PositiveNumber);
  app.add_option("--seed", config.base_seed, "base seed; repetition r uses seed + r");
  app.add_option("--budget", config.budget, "evaluation budget (default: the problem's)")
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-multiplier", config.budget_multiplier, "scale the budget")->check(CLI::PositiveNumber);
  app.add_option("--tol", opt.tol, "fitness tolerance for optima")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", config.epsilon, "peak-ratio accuracy")->check(CLI::PositiveNumber);

  std::string injection = "global";
  app.add_option("--injection", injection, "archived optima added on restart")
      ->check(CLI::IsMember({"all", "global", "none"}));
  app.add_option("--trace", config.trace_step, "evaluations between trace rows")->check(CLI::PositiveNumber);
  app.add_option("--out", config.output_path, "output file");
  std::string format = "json";
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", config.jobs, "parallel runs")->check(CLI::PositiveNumber);

  std::string edge_length = "expected";
  auto* tuning = app.add_option_group("tuning", "restart scheme and searcher constants");
  tuning->add_option("--init-population-factor", opt.initial_population_factor)->check(CLI::PositiveNumber);
  tuning->add_option("--population-growth", opt.population_growth)->check(CLI::Range(1.0, 1e6));
  tuning->add_option("--cluster-size-factor", opt.cluster_size_factor)->check(CLI::PositiveNumber);
  tuning->add_option("--cluster-size-growth", opt.cluster_size_growth)->check(CLI::Range(1.0, 1e6));
  tuning->add_option("--postprocess-test-points", opt.postprocess_test_points)->check(CLI::PositiveNumber);
  tuning->add_option("--edge-length", edge_length)->check(CLI::IsMember({"expected", "average"}));
  tuning->add_option("--cmsa-tau-sigma-scale", searcher.cmsa_tau_sigma_scale)->check(CLI::PositiveNumber);
  tuning->add_option("--cmsa-min-std", searcher.cmsa_min_std)->check(CLI::PositiveNumber);
  tuning->add_option("--max-condition-number", searcher.max_condition_number)->check(CLI::PositiveNumber);
  tuning->add_option("--ams-fraction", searcher.ams_fraction)->check(CLI::Range(0.0, 1.0));
  tuning->add_option("--ams-delta", searcher.ams_delta)->check(CLI::NonNegativeNumber);
  tuning->add_option("--multiplier-decay", searcher.multiplier_decay)->check(CLI::Range(0.0, 1.0));
  tuning->add_option("--multiplier-min", searcher.multiplier_min)->check(CLI::PositiveNumber);
  tuning->add_option("--multiplier-max", searcher.multiplier_max)->check(CLI::PositiveNumber);
  tuning->add_option("--sdr-threshold", searcher.sdr_threshold)->check(CLI::NonNegativeNumber);
  tuning->add_option("--incremental-eta", searcher.incremental_eta)->check(CLI::Range(0.0, 1.0));
  tuning->add_option("--eda-min-std", searcher.eda_min_std)->check(CLI::PositiveNumber);
  tuning->add_option("--eda-min-fitness-std", searcher.eda_min_fitness_std)->check(CLI::PositiveNumber);
  tuning->add_option("--singleton-scale", searcher.singleton_scale)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    return std::nullopt;
  }

  try {
    std::string joined;
    for (const auto& token : problem_tokens) joined += (joined.empty() ? "" : ",") + token;
    config.problem_ids = parse_problem_list(joined);
    config.kind = *parse_searcher_kind(kind);
    opt.injection = *parse_injection_mode(injection);
    config.format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    opt.edge_length = edge_length == "average" ? EdgeLengthMode::average : EdgeLengthMode::expected;
    searcher.tol = opt.tol;
    validate(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    exit_code = 2;
    return std::nullopt;
  }
  exit_code = 0;
  return config;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  int exit_code = 0;
  auto config = parse_command_line(argc, argv, out, err, exit_code);
  if (!config) return exit_code;
  return run_sweep(*config, out, err);
}

}  // namespace hillvallea
