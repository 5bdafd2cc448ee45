// avdqn: train / sweep / visits / params.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "avdqn/errors.hpp"
#include "avdqn/harness.hpp"
#include "avdqn/net.hpp"
#include "avdqn/trainer.hpp"

namespace {

using namespace avdqn;

// Flag name -> config key. Every config key is reachable from the command line.
const std::vector<std::pair<std::string, std::string>> kSettingFlags = {
    {"--env", "env"},
    {"--agent", "agent"},
    {"--episodes", "episodes"},
    {"--seed", "seed"},
    {"--omega", "omega"},
    {"--gamma", "gamma"},
    {"--lr", "lr"},
    {"--lr-decay", "lr_decay"},
    {"--tau", "tau"},
    {"--batch", "batch"},
    {"--hidden", "hidden"},
    {"--replay-capacity", "replay_capacity"},
    {"--per", "per"},
    {"--per-alpha", "per_alpha"},
    {"--per-beta", "per_beta"},
    {"--sort-period", "sort_period"},
    {"--priority", "priority"},
    {"--entropy-coef", "entropy_coef"},
    {"--grad-clip", "grad_clip"},
    {"--epsilon-start", "epsilon_start"},
    {"--epsilon-end", "epsilon_end"},
    {"--epsilon-decay-steps", "epsilon_decay_steps"},
    {"--wall-clock", "wall_clock"},
};

struct SettingArgs {
  std::string config_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "Flat key = value config file; flags override it")
        ->check(CLI::ExistingFile);
    for (const auto& [flag, key] : kSettingFlags) options[key] = app->add_option(flag, values[key], "config key '" + key + "'");
  }

  TrainConfig build(TrainConfig base = {}) const {
    TrainConfig config = config_file.empty() ? base : load_config_file(config_file, base);
    for (const auto& [key, opt] : options)
      if (opt->count() > 0) apply_setting(config, key, values.at(key));
    return config;
  }
};

void write_snapshot(const TrainConfig& config, const std::string& csv_path) {
  write_text_file(csv_path + ".cfg", config_snapshot(config));
}

void print_summary(const RunRecord& record) {
  std::size_t skipped = 0;
  for (const auto& e : record.episodes) skipped += e.skipped;
  const std::size_t k = std::min<std::size_t>(10, record.episodes.size());
  std::printf("%s %s seed=%llu episodes=%zu final_reward(last %zu)=%.4f skipped=%zu\n", to_string(record.config.agent).c_str(),
              record.config.env.c_str(), static_cast<unsigned long long>(record.config.seed), record.episodes.size(), k,
              final_reward(record, k), skipped);
}

std::vector<double> rewards_of(const RunRecord& r) {
  std::vector<double> v;
  for (const auto& e : r.episodes) v.push_back(e.reward);
  return v;
}

int run_train(const SettingArgs& args, const std::string& out, const std::string& svg) {
  const RunRecord record = train(args.build());
  print_summary(record);
  if (!out.empty()) {
    emit_csv(record, out);
    write_snapshot(record.config, out);
  }
  if (!svg.empty())
    write_text_file(svg, svg_line_chart({{to_string(record.config.agent), rewards_of(record)}}, record.config.env,
                                        "episode", "reward"));
  return 0;
}

int run_sweep(const SettingArgs& args, int seeds, const std::string& prefix, int jobs, const std::string& svg) {
  const TrainConfig base = args.build();
  std::vector<RunRecord> runs(static_cast<std::size_t>(seeds));
  std::vector<std::string> errors(runs.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (int i = 0; i < seeds; ++i) {
    TrainConfig c = base;
    c.seed = base.seed + static_cast<std::uint64_t>(i);
    try {
      runs[static_cast<std::size_t>(i)] = train(c);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);

  double sum = 0.0;
  for (const auto& r : runs) {
    print_summary(r);
    sum += final_reward(r, std::min<std::size_t>(10, r.episodes.size()));
    if (!prefix.empty()) {
      const std::string path = prefix + "_seed" + std::to_string(r.config.seed) + ".csv";
      emit_csv(r, path);
      write_snapshot(r.config, path);
    }
  }
  std::printf("mean final reward over %d seeds: %.4f\n", seeds, sum / seeds);
  const auto rows = aggregate(runs);
  if (!prefix.empty()) emit_aggregate_csv(rows, prefix + "_mean.csv");
  if (!svg.empty()) {
    std::vector<double> mean;
    for (const auto& r : rows) mean.push_back(r.mean);
    write_text_file(svg, svg_line_chart({{"mean over seeds", mean}}, base.env, "episode", "reward"));
  }
  return 0;
}

int run_visits(const SettingArgs& args, const std::string& out, std::size_t window) {
  TrainConfig defaults;
  defaults.env = "chain:8";
  defaults.agent = AgentKind::Random;
  TrainConfig config = args.build(defaults);
  VisitTracker tracker;
  const RunRecord record = train(config, tracker.observer());
  const auto windows = visit_probability(tracker.trajectories(), tracker.n_states(), window);
  const int n = tracker.n_states();
  std::printf("%-14s %8s %8s %8s\n", "episodes", "p_1", ("p_" + std::to_string(n / 2)).c_str(),
              ("p_" + std::to_string(n)).c_str());
  for (const auto& w : windows)
    std::printf("%5d-%-8d %8.3f %8.3f %8.3f\n", w.first_episode, w.last_episode, w.p_first, w.p_half, w.p_last);
  if (!out.empty()) emit_visits_csv(windows, n, out);
  print_summary(record);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amortized variational DQN laboratory"};
  app.require_subcommand(1);

  auto* train_cmd = app.add_subcommand("train", "Train one agent and write its reward trace");
  SettingArgs train_args;
  train_args.attach(train_cmd);
  std::string train_out, train_svg;
  train_cmd->add_option("--out", train_out, "CSV output path (a .cfg snapshot is written alongside)");
  train_cmd->add_option("--svg", train_svg, "Optional reward-curve SVG");

  auto* sweep_cmd = app.add_subcommand("sweep", "Train several seeds and aggregate");
  SettingArgs sweep_args;
  sweep_args.attach(sweep_cmd);
  int seeds = 5, jobs = 1;
  std::string prefix, sweep_svg;
  sweep_cmd->add_option("--seeds", seeds, "Number of seeds (seed, seed+1, ...)")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out-prefix", prefix, "Writes <prefix>_seed<S>.csv and <prefix>_mean.csv");
  sweep_cmd->add_option("--jobs", jobs, "Seeds trained concurrently")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--svg", sweep_svg, "Optional mean-curve SVG");

  auto* visits_cmd = app.add_subcommand("visits", "Visit probabilities of s_1, s_N/2, s_N on a chain");
  SettingArgs visits_args;
  visits_args.attach(visits_cmd);
  std::string visits_out;
  std::size_t window = 10;
  visits_cmd->add_option("--out", visits_out, "CSV output path");
  visits_cmd->add_option("--window", window, "Episodes per window")->check(CLI::PositiveNumber);

  auto* params_cmd = app.add_subcommand("params", "Parameter counts of DQN and AVDQN per task");
  std::string params_hidden = "100,100";
  params_cmd->add_option("--hidden", params_hidden, "Hidden layer sizes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(train_args, train_out, train_svg);
    if (*sweep_cmd) return run_sweep(sweep_args, seeds, prefix, jobs, sweep_svg);
    if (*visits_cmd) return run_visits(visits_args, visits_out, window);
    if (*params_cmd) {
      TrainConfig c;
      apply_setting(c, "hidden", params_hidden);
      std::cout << format_params_table(params_report(c.hidden));
      return 0;
    }
  } catch (const ContractViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
