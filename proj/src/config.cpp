#include "avdqn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "avdqn/envs.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  std::from_chars_result res;
  if constexpr (std::is_floating_point_v<T>) {
    res = std::from_chars(first, last, out, std::chars_format::general);
  } else {
    res = std::from_chars(first, last, out);
  }
  if (res.ec != std::errc{} || res.ptr != last)
    throw ContractViolation("config: '" + key + "' expects a number, got '" + value + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw ContractViolation("config: '" + key + "' expects a boolean, got '" + value + "'");
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_chain(const std::string& env) { return env.rfind("chain:", 0) == 0; }

}  // namespace

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Avdqn: return "avdqn";
    case AgentKind::Dqn: return "dqn";
    case AgentKind::Random: return "random";
  }
  return "?";
}

AgentKind parse_agent_kind(const std::string& text) {
  if (text == "avdqn") return AgentKind::Avdqn;
  if (text == "dqn") return AgentKind::Dqn;
  if (text == "random") return AgentKind::Random;
  throw ContractViolation("unknown agent '" + text + "' (expected avdqn, dqn or random)");
}

int TrainConfig::omega_or_default() const {
  if (omega) return *omega;
  return std::max(0, episodes - 200);
}

TrainConfig TrainConfig::resolved() const {
  TrainConfig out = *this;
  out.omega = omega_or_default();
  if (!out.gamma) out.gamma = is_chain(env) ? 1.0 : 0.99;
  if (!out.grad_clip) out.grad_clip = is_chain(env) ? 1000.0 : 100.0;
  if (!out.lr) out.lr = agent == AgentKind::Dqn ? 1e-2 : 1e-3;
  if (!out.per) out.per = agent == AgentKind::Avdqn;
  if (!out.epsilon_decay_steps) {
    const auto horizon = static_cast<long>(make_environment(env)->horizon());
    out.epsilon_decay_steps = std::max(1L, static_cast<long>(episodes) * horizon / 10);
  }
  out.validate();
  return out;
}

void TrainConfig::validate() const {
  make_environment(env);
  require(episodes >= 1, "config: episodes must be >= 1");
  require(tau >= 1, "config: tau must be >= 1");
  require(batch >= 1, "config: batch must be >= 1");
  require(!hidden.empty(), "config: at least one hidden layer");
  for (auto h : hidden) require(h >= 1, "config: hidden sizes must be >= 1");
  require(replay_capacity >= 1, "config: replay capacity must be >= 1");
  require(per_alpha >= 0.0 && per_beta >= 0.0, "config: PER exponents must be >= 0");
  require(sort_period >= 1, "config: sort period must be >= 1");
  require(std::isfinite(entropy_coef) && entropy_coef >= 0.0, "config: entropy_coef must be >= 0");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0 && epsilon_end >= 0.0 && epsilon_end <= 1.0,
          "config: epsilon bounds must lie in [0, 1]");
  if (omega) require(*omega >= 0 && *omega <= episodes, "config: need 0 <= omega <= episodes");
  if (gamma) require(*gamma > 0.0 && *gamma <= 1.0, "config: need 0 < gamma <= 1");
  if (grad_clip) require(std::isfinite(*grad_clip) && *grad_clip >= 0.0, "config: grad_clip must be >= 0");
  if (lr) require(*lr >= 0.0 && std::isfinite(*lr), "config: lr must be >= 0");
  if (epsilon_decay_steps) require(*epsilon_decay_steps >= 1, "config: epsilon_decay_steps must be >= 1");
}

void apply_setting(TrainConfig& c, const std::string& key, const std::string& value) {
  if (key == "env") {
    c.env = value;
  } else if (key == "agent") {
    c.agent = parse_agent_kind(value);
  } else if (key == "episodes") {
    c.episodes = parse_number<int>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "omega") {
    c.omega = parse_number<int>(key, value);
  } else if (key == "gamma") {
    c.gamma = parse_number<double>(key, value);
  } else if (key == "lr") {
    c.lr = parse_number<double>(key, value);
  } else if (key == "lr_decay") {
    c.lr_decay = parse_bool(key, value);
  } else if (key == "tau") {
    c.tau = parse_number<int>(key, value);
  } else if (key == "batch") {
    c.batch = parse_number<int>(key, value);
  } else if (key == "hidden") {
    c.hidden.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) c.hidden.push_back(parse_number<std::size_t>(key, trim(item)));
  } else if (key == "replay_capacity") {
    c.replay_capacity = parse_number<std::size_t>(key, value);
  } else if (key == "per") {
    c.per = parse_bool(key, value);
  } else if (key == "per_alpha") {
    c.per_alpha = parse_number<double>(key, value);
  } else if (key == "per_beta") {
    c.per_beta = parse_number<double>(key, value);
  } else if (key == "sort_period") {
    c.sort_period = parse_number<std::size_t>(key, value);
  } else if (key == "priority") {
    if (value == "sampled") {
      c.priority_source = PrioritySource::SampledQ;
    } else if (value == "mean") {
      c.priority_source = PrioritySource::Mean;
    } else {
      throw ContractViolation("config: priority must be 'sampled' or 'mean'");
    }
  } else if (key == "entropy_coef") {
    c.entropy_coef = parse_number<double>(key, value);
  } else if (key == "grad_clip") {
    c.grad_clip = parse_number<double>(key, value);
  } else if (key == "epsilon_start") {
    c.epsilon_start = parse_number<double>(key, value);
  } else if (key == "epsilon_end") {
    c.epsilon_end = parse_number<double>(key, value);
  } else if (key == "epsilon_decay_steps") {
    c.epsilon_decay_steps = parse_number<long>(key, value);
  } else if (key == "wall_clock") {
    c.wall_clock = parse_bool(key, value);
  } else {
    throw ContractViolation("config: unknown key '" + key + "'");
  }
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractViolation("config line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

TrainConfig load_config_file(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

std::string config_snapshot(const TrainConfig& config) {
  const TrainConfig c = config.resolved();
  std::ostringstream os;
  std::string hidden;
  for (std::size_t i = 0; i < c.hidden.size(); ++i) hidden += (i ? "," : "") + std::to_string(c.hidden[i]);
  os << "env = " << c.env << '\n'
     << "agent = " << to_string(c.agent) << '\n'
     << "episodes = " << c.episodes << '\n'
     << "seed = " << c.seed << '\n'
     << "omega = " << *c.omega << '\n'
     << "gamma = " << format_double(*c.gamma) << '\n'
     << "lr = " << format_double(*c.lr) << '\n'
     << "lr_decay = " << (c.lr_decay ? "true" : "false") << '\n'
     << "tau = " << c.tau << '\n'
     << "batch = " << c.batch << '\n'
     << "hidden = " << hidden << '\n'
     << "replay_capacity = " << c.replay_capacity << '\n'
     << "per = " << (*c.per ? "true" : "false") << '\n'
     << "per_alpha = " << format_double(c.per_alpha) << '\n'
     << "per_beta = " << format_double(c.per_beta) << '\n'
     << "sort_period = " << c.sort_period << '\n'
     << "priority = " << (c.priority_source == PrioritySource::SampledQ ? "sampled" : "mean") << '\n'
     << "entropy_coef = " << format_double(c.entropy_coef) << '\n'
     << "grad_clip = " << format_double(*c.grad_clip) << '\n'
     << "epsilon_start = " << format_double(c.epsilon_start) << '\n'
     << "epsilon_end = " << format_double(c.epsilon_end) << '\n'
     << "epsilon_decay_steps = " << *c.epsilon_decay_steps << '\n'
     << "wall_clock = " << (c.wall_clock ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace avdqn
