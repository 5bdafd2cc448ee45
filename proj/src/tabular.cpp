#include <algorithm>

#include "avdqn/agent.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

TabularQ::TabularQ(std::size_t states, std::size_t actions, double initial)
    : states_(states), actions_(actions), table_(states * actions, initial) {
  require(states >= 1 && actions >= 1, "tabular: need at least one state and one action");
}

double& TabularQ::operator()(std::size_t s, std::size_t a) {
  require(s < states_ && a < actions_, "tabular: index out of range");
  return table_[s * actions_ + a];
}

double TabularQ::operator()(std::size_t s, std::size_t a) const {
  require(s < states_ && a < actions_, "tabular: index out of range");
  return table_[s * actions_ + a];
}

double TabularQ::max_value(std::size_t s) const {
  require(s < states_, "tabular: state out of range");
  const auto first = table_.begin() + static_cast<std::ptrdiff_t>(s * actions_);
  return *std::max_element(first, first + static_cast<std::ptrdiff_t>(actions_));
}

std::size_t TabularQ::greedy(std::size_t s) const {
  require(s < states_, "tabular: state out of range");
  return argmax(std::span<const double>(table_.data() + s * actions_, actions_));
}

void tabular_q_update(TabularQ& table, const TabularTransition& t, double step, double gamma) {
  require(step >= 0.0 && step <= 1.0, "tabular: step size must lie in [0, 1]");
  const double bootstrap = t.done ? 0.0 : gamma * table.max_value(t.s_next);
  double& q = table(t.s, t.a);
  q = (1.0 - step) * q + step * (t.r + bootstrap);
}

}  // namespace avdqn
