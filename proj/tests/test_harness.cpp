#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "avdqn/config.hpp"
#include "avdqn/errors.hpp"
#include "avdqn/harness.hpp"
#include "oracles.hpp"

namespace avdqn {
namespace {

RunRecord record_of(const std::vector<double>& rewards) {
  RunRecord r;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    r.episodes.push_back({static_cast<int>(i) + 1, rewards[i], 0.25 * static_cast<double>(i), "pretrain", i % 3});
  }
  return r;
}

TEST(FinalReward, Examples) {
  EXPECT_EQ(final_reward(record_of(std::vector<double>(12, 11.0))), 11.0);
  EXPECT_EQ(final_reward(record_of({3.0, 10.0, 12.0}), 2), 11.0);
  EXPECT_THROW(final_reward(record_of({1.0, 2.0})), InsufficientData);
}

TEST(Visits, Definitions) {
  // 10 episodes on N=6; s_6 reached in 7 of them; every state in the first.
  std::vector<std::vector<int>> traj;
  traj.push_back({2, 3, 4, 5, 6, 5, 4, 3, 2, 1});
  for (int e = 1; e < 10; ++e) traj.push_back(e < 7 ? std::vector<int>{2, 3, 4, 5, 6} : std::vector<int>{2, 1});
  const auto w = visit_probability(traj, 6);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].first_episode, 1);
  EXPECT_EQ(w[0].last_episode, 10);
  EXPECT_NEAR(w[0].p_last, 0.7, 1e-15);
  EXPECT_NEAR(w[0].p_first, 0.4, 1e-15);
  EXPECT_NEAR(w[0].p_half, 0.7, 1e-15);  // s_3
  const auto one = visit_probability({traj[0]}, 6);
  EXPECT_EQ(one[0].p_first, 1.0);
  EXPECT_EQ(one[0].p_half, 1.0);
  EXPECT_EQ(one[0].p_last, 1.0);
}

TEST(Visits, WindowsPartitionEpisodes) {
  std::vector<std::vector<int>> traj(25, std::vector<int>{2});
  const auto w = visit_probability(traj, 5);
  ASSERT_EQ(w.size(), 3u);
  int covered = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_EQ(w[i].first_episode, covered + 1);
    covered = w[i].last_episode;
    EXPECT_GE(w[i].p_first, 0.0);
    EXPECT_LE(w[i].p_first, 1.0);
  }
  EXPECT_EQ(covered, 25);
}

TEST(Visits, NonChainIsUnsupported) {
  TrainConfig c;
  c.env = "cartpole-v0";
  c.agent = AgentKind::Random;
  c.episodes = 1;
  VisitTracker tracker;
  EXPECT_THROW(train(c, tracker.observer()), Unsupported);
}

TEST(Visits, RandomWalkMatchesReachabilityOracle) {
  TrainConfig c;
  c.env = "chain:8";
  c.agent = AgentKind::Random;
  c.episodes = 1000;
  VisitTracker tracker;
  train(c, tracker.observer());
  const auto w = visit_probability(tracker.trajectories(), 8, 1000);
  ASSERT_EQ(w.size(), 1u);
  const double n = 1000.0;
  const std::pair<double, int> checks[] = {{w[0].p_first, 1}, {w[0].p_half, 4}, {w[0].p_last, 8}};
  for (auto [p_hat, target] : checks) {
    const double p = oracle::chain_random_reach_probability(8, target);
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_LE(std::abs(p_hat - p), 3 * se) << "s_" << target << " oracle " << p;
  }
}

TEST(Params, AllTableCells) {
  const std::map<std::string, std::pair<std::size_t, std::size_t>> expected{
      {"CartPole-v0", {10802, 11004}}, {"CartPole-v1", {10802, 11004}}, {"Acrobot-v1", {11103, 11406}},
      {"MountainCar-v0", {10703, 11006}}, {"MDP N=5", {10902, 11104}}, {"MDP N=10", {11402, 11604}},
      {"MDP N=50", {15402, 15604}}, {"MDP N=100", {20402, 20604}}};
  const auto rows = params_report();
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& r : rows) {
    auto it = expected.find(r.task);
    ASSERT_NE(it, expected.end()) << r.task;
    EXPECT_EQ(r.dqn, it->second.first) << r.task;
    EXPECT_EQ(r.avdqn, it->second.second) << r.task;
    EXPECT_EQ(r.avdqn - r.dqn, 101 * r.actions);
  }
  const auto text = format_params_table(rows);
  EXPECT_NE(text.find("20604"), std::string::npos);
}

TEST(Csv, EmptyRecordIsHeaderOnly) {
  std::ostringstream out;
  write_csv(RunRecord{}, out);
  EXPECT_EQ(out.str(), "episode,reward,seconds,stage,skipped\n");
}

TEST(Csv, RoundTrip) {
  auto rec = record_of({1.5, 11.0, 0.001, -3.25});
  std::stringstream buf;
  write_csv(rec, buf);
  EXPECT_EQ(parse_csv(buf), rec.episodes);
}

TEST(Csv, SameSeedSameBytes) {
  TrainConfig c;
  c.episodes = 15;
  c.batch = 8;
  c.hidden = {16};
  c.wall_clock = false;
  std::ostringstream a, b;
  write_csv(train(c), a);
  write_csv(train(c), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Csv, FileErrorsNameThePath) {
  try {
    emit_csv(RunRecord{}, "/nonexistent-dir/run.csv");
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/run.csv"), std::string::npos);
  }
}

TEST(Csv, RejectsMalformed) {
  std::stringstream bad("episode,reward,seconds,stage,skipped\n1,abc,0,pretrain,0\n");
  EXPECT_ANY_THROW(parse_csv(bad));
  std::stringstream header("wrong\n");
  EXPECT_ANY_THROW(parse_csv(header));
}

TEST(Aggregate, MeanAndSpread) {
  RunRecord a = record_of({1.0, 2.0}), b = record_of({3.0, 6.0});
  const auto rows = aggregate({a, b});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].mean, 2.0);
  EXPECT_EQ(rows[1].mean, 4.0);
  EXPECT_EQ(rows[1].min, 2.0);
  EXPECT_EQ(rows[1].max, 6.0);
  EXPECT_THROW(aggregate({a, record_of({1.0})}), ContractViolation);
}

TEST(Config, ParseAndSnapshotRoundTrip) {
  std::stringstream in("env = chain:10  # comment\nagent = dqn\nepisodes = 50\ntau=7\nhidden = 32,16\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.env, "chain:10");
  EXPECT_EQ(c.agent, AgentKind::Dqn);
  EXPECT_EQ(c.tau, 7);
  EXPECT_EQ(c.hidden, (std::vector<std::size_t>{32, 16}));
  const auto r = c.resolved();
  EXPECT_EQ(*r.omega, 0);  // max(0, 50 - 200)
  EXPECT_EQ(*r.gamma, 1.0);
  EXPECT_EQ(*r.grad_clip, 1000.0);
  EXPECT_FALSE(*r.per);
  std::stringstream snap(config_snapshot(r));
  EXPECT_EQ(config_snapshot(parse_config(snap)), config_snapshot(r));
}

TEST(Config, Defaults) {
  TrainConfig c;
  c.env = "cartpole-v0";
  c.episodes = 1500;
  const auto r = c.resolved();
  EXPECT_EQ(*r.omega, 1300);
  EXPECT_EQ(*r.gamma, 0.99);
  EXPECT_EQ(*r.grad_clip, 100.0);
  EXPECT_EQ(*r.lr, 1e-3);
  EXPECT_TRUE(*r.per);
  EXPECT_EQ(r.tau, 100);
  EXPECT_EQ(r.batch, 128);
  EXPECT_EQ(r.replay_capacity, 1'000'000u);
}

TEST(Config, Rejections) {
  TrainConfig c;
  EXPECT_THROW(apply_setting(c, "bogus", "1"), ContractViolation);
  EXPECT_ANY_THROW(apply_setting(c, "episodes", "many"));
  c.gamma = 0.0;
  EXPECT_THROW(c.resolved(), ContractViolation);
  c.gamma = 1.0;
  c.grad_clip = -1.0;
  EXPECT_THROW(c.resolved(), ContractViolation);
  c.grad_clip.reset();
  c.omega = 5000;
  EXPECT_THROW(c.resolved(), ContractViolation);
}

TEST(Svg, ContainsSeries) {
  const auto svg = svg_line_chart({{"avdqn", {0, 5, 11}}, {"dqn", {0, 0, 1}}}, "Chain <N=5>", "episode", "reward");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("avdqn"), std::string::npos);
  EXPECT_NE(svg.find("&lt;N=5&gt;"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace avdqn
