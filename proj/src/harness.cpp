#include "avdqn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "avdqn/errors.hpp"
#include "avdqn/net.hpp"

namespace avdqn {

double final_reward(std::span<const double> rewards, std::size_t k) {
  require(k >= 1, "final_reward: window must be >= 1");
  if (rewards.size() < k)
    throw InsufficientData("final_reward: " + std::to_string(rewards.size()) + " episodes, window " + std::to_string(k));
  double sum = 0.0;
  for (std::size_t i = rewards.size() - k; i < rewards.size(); ++i) sum += rewards[i];
  return sum / static_cast<double>(k);
}

double final_reward(const RunRecord& record, std::size_t k) {
  std::vector<double> rewards;
  rewards.reserve(record.episodes.size());
  for (const auto& e : record.episodes) rewards.push_back(e.reward);
  return final_reward(rewards, k);
}

// ---------------------------------------------------------------------------

TrainObserver VisitTracker::observer() {
  TrainObserver obs;
  obs.on_reset = [this](int, const Environment& env) {
    const auto* chain = dynamic_cast<const ChainMdp*>(&env);
    if (!chain) throw Unsupported("visit counts need a chain environment, got " + env.id());
    n_states_ = chain->n();
    trajectories_.push_back({chain->position()});
  };
  obs.on_step = [this](int, const Environment& env) {
    trajectories_.back().push_back(static_cast<const ChainMdp&>(env).position());
  };
  return obs;
}

std::vector<VisitWindow> visit_probability(const std::vector<std::vector<int>>& trajectories, int n_states,
                                           std::size_t window) {
  require(n_states >= 3, "visit_probability: need a chain with N >= 3");
  require(window >= 1, "visit_probability: window must be >= 1");
  const int half = n_states / 2;
  std::vector<VisitWindow> out;
  for (std::size_t begin = 0; begin < trajectories.size(); begin += window) {
    const std::size_t end = std::min(trajectories.size(), begin + window);
    int c_first = 0, c_half = 0, c_last = 0;
    for (std::size_t e = begin; e < end; ++e) {
      const auto& path = trajectories[e];
      for (int p : path) require(p >= 1 && p <= n_states, "visit_probability: position out of range");
      c_first += std::find(path.begin(), path.end(), 1) != path.end();
      c_half += std::find(path.begin(), path.end(), half) != path.end();
      c_last += std::find(path.begin(), path.end(), n_states) != path.end();
    }
    const double n = static_cast<double>(end - begin);
    out.push_back({static_cast<int>(begin) + 1, static_cast<int>(end), c_first / n, c_half / n, c_last / n});
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<ParamsRow> params_report(const std::vector<std::size_t>& hidden) {
  const std::vector<std::pair<std::string, std::string>> tasks = {
      {"CartPole-v0", "cartpole-v0"}, {"CartPole-v1", "cartpole-v1"}, {"Acrobot-v1", "acrobot-v1"},
      {"MountainCar-v0", "mountaincar-v0"}, {"MDP N=5", "chain:5"},   {"MDP N=10", "chain:10"},
      {"MDP N=50", "chain:50"},         {"MDP N=100", "chain:100"}};
  std::vector<ParamsRow> rows;
  for (const auto& [task, id] : tasks) {
    const auto env = make_environment(id);
    ParamsRow row{task, id, env->observation_dim(), env->action_count(), 0, 0};
    NetArch arch{row.input_dim, hidden, row.actions};
    row.dqn = count_params(arch);
    arch.output_dim = 2 * row.actions;
    row.avdqn = count_params(arch);
    rows.push_back(row);
  }
  return rows;
}

std::string format_params_table(const std::vector<ParamsRow>& rows) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-16s %6s %8s %10s %10s\n", "task", "input", "actions", "DQN", "AVDQN");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-16s %6zu %8zu %10zu %10zu\n", r.task.c_str(), r.input_dim, r.actions, r.dqn,
                  r.avdqn);
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------------------

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs) {
  require(!runs.empty(), "aggregate: no runs");
  const std::size_t n = runs.front().episodes.size();
  for (const auto& r : runs) require(r.episodes.size() == n, "aggregate: runs differ in episode count");
  std::vector<AggregateRow> rows(n);
  const double k = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0, lo = runs[0].episodes[i].reward, hi = lo;
    for (const auto& r : runs) {
      const double v = r.episodes[i].reward;
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / k;
    double var = 0.0;
    for (const auto& r : runs) var += (r.episodes[i].reward - mean) * (r.episodes[i].reward - mean);
    rows[i] = {static_cast<int>(i) + 1, mean, std::sqrt(var / k), lo, hi};
  }
  return rows;
}

}  // namespace avdqn
