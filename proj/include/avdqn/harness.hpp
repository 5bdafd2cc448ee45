#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "avdqn/trainer.hpp"

namespace avdqn {

// Mean reward of the last k episodes; InsufficientData if fewer than k.
double final_reward(const RunRecord& record, std::size_t k = 10);
double final_reward(std::span<const double> rewards, std::size_t k = 10);

// ---------------------------------------------------------------------------
// Visit probabilities on the chain.

// Records which chain positions each episode reached (start included).
// Throws Unsupported when attached to a non-chain environment.
class VisitTracker {
 public:
  TrainObserver observer();
  // trajectories()[e] = positions visited in episode e+1, in visit order.
  const std::vector<std::vector<int>>& trajectories() const { return trajectories_; }
  int n_states() const { return n_states_; }

 private:
  std::vector<std::vector<int>> trajectories_;
  int n_states_ = 0;
};

struct VisitWindow {
  int first_episode = 0;
  int last_episode = 0;
  double p_first = 0.0;  // s_1
  double p_half = 0.0;   // s_{floor(N/2)}
  double p_last = 0.0;   // s_N
};

// Consecutive, non-overlapping windows of `window` episodes (the last one
// may be shorter). p_n is the fraction of episodes in the window reaching s_n.
std::vector<VisitWindow> visit_probability(const std::vector<std::vector<int>>& trajectories, int n_states,
                                           std::size_t window = 10);

// ---------------------------------------------------------------------------
// Parameter counts.

struct ParamsRow {
  std::string task;
  std::string env_id;
  std::size_t input_dim = 0;
  std::size_t actions = 0;
  std::size_t dqn = 0;
  std::size_t avdqn = 0;
};

std::vector<ParamsRow> params_report(const std::vector<std::size_t>& hidden = {100, 100});
std::string format_params_table(const std::vector<ParamsRow>& rows);

// ---------------------------------------------------------------------------
// CSV.
//
// Run files: header "episode,reward,seconds,stage,skipped", reward with 6
// decimals, seconds with 3.

void write_csv(const RunRecord& record, std::ostream& out);
void emit_csv(const RunRecord& record, const std::string& path);
std::vector<EpisodeStats> parse_csv(std::istream& in);
std::vector<EpisodeStats> load_csv(const std::string& path);

struct AggregateRow {
  int episode = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Mean curve over runs, aligned by episode index (runs must share length).
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs);
void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path);
void emit_visits_csv(const std::vector<VisitWindow>& windows, int n_states, const std::string& path);

// Writes `text` to `path`, throwing std::runtime_error naming the path on failure.
void write_text_file(const std::string& path, const std::string& text);

// ---------------------------------------------------------------------------
// Minimal SVG line chart (reward curves).

struct Series {
  std::string name;
  std::vector<double> values;
};

std::string svg_line_chart(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                           const std::string& y_label);

}  // namespace avdqn
