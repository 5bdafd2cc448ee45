#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "avdqn/errors.hpp"
#include "avdqn/harness.hpp"

namespace avdqn {

namespace {

constexpr const char* kRunHeader = "episode,reward,seconds,stage,skipped";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.push_back(f);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T field(const std::string& text, int lineno) {
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::runtime_error("csv line " + std::to_string(lineno) + ": bad field '" + text + "'");
  return v;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_csv(const RunRecord& record, std::ostream& out) {
  out << kRunHeader << '\n';
  char line[256];
  for (const auto& e : record.episodes) {
    std::snprintf(line, sizeof(line), "%d,%.6f,%.3f,%s,%zu\n", e.episode, e.reward, e.seconds, e.stage.c_str(),
                  e.skipped);
    out << line;
  }
}

void emit_csv(const RunRecord& record, const std::string& path) {
  std::ostringstream os;
  write_csv(record, os);
  write_text_file(path, os.str());
}

std::vector<EpisodeStats> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunHeader) throw std::runtime_error("csv: missing or unexpected header");
  std::vector<EpisodeStats> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 5) throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 5 fields");
    EpisodeStats e;
    e.episode = field<int>(f[0], lineno);
    e.reward = field<double>(f[1], lineno);
    e.seconds = field<double>(f[2], lineno);
    e.stage = f[3];
    e.skipped = field<std::size_t>(f[4], lineno);
    rows.push_back(std::move(e));
  }
  return rows;
}

std::vector<EpisodeStats> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return parse_csv(in);
  } catch (const std::runtime_error& err) {
    throw std::runtime_error(path + ": " + err.what());
  }
}

void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
  std::ostringstream os;
  os << "episode,mean_reward,std_reward,min_reward,max_reward\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f\n", r.episode, r.mean, r.stddev, r.min, r.max);
    os << line;
  }
  write_text_file(path, os.str());
}

void emit_visits_csv(const std::vector<VisitWindow>& windows, int n_states, const std::string& path) {
  std::ostringstream os;
  os << "first_episode,last_episode,p_1,p_" << n_states / 2 << ",p_" << n_states << '\n';
  char line[256];
  for (const auto& w : windows) {
    std::snprintf(line, sizeof(line), "%d,%d,%.3f,%.3f,%.3f\n", w.first_episode, w.last_episode, w.p_first, w.p_half,
                  w.p_last);
    os << line;
  }
  write_text_file(path, os.str());
}

}  // namespace avdqn
