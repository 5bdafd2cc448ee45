#include "avdqn/replay.hpp"

#include <algorithm>
#include <cmath>

#include "avdqn/errors.hpp"

namespace avdqn {

namespace {

void require_batch(std::size_t size, std::size_t m) {
  if (m == 0) throw ContractViolation("replay: batch size must be >= 1");
  if (size < m)
    throw InsufficientData("replay: " + std::to_string(size) + " stored transitions, " + std::to_string(m) +
                           " requested");
}

}  // namespace

// ---------------------------------------------------------------------------

UniformReplay::UniformReplay(std::size_t capacity) : capacity_(capacity) {
  require(capacity >= 1, "replay: capacity must be >= 1");
}

void UniformReplay::push(Transition t) {
  if (slots_.size() < capacity_) {
    slots_.push_back(std::move(t));
  } else {
    slots_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

SampledBatch UniformReplay::sample(std::size_t m, Rng& rng) {
  require_batch(size(), m);
  SampledBatch batch;
  batch.ids.reserve(m);
  batch.items.reserve(m);
  std::uniform_int_distribution<std::size_t> pick(0, slots_.size() - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t id = pick(rng);
    batch.ids.push_back(id);
    batch.items.push_back(&slots_[id]);
  }
  batch.weights.assign(m, 1.0);
  return batch;
}

const Transition& UniformReplay::at(std::size_t id) const {
  require(id < slots_.size(), "replay: id out of range");
  return slots_[id];
}

// ---------------------------------------------------------------------------

RankedReplay::RankedReplay() : RankedReplay(Options{}) {}

RankedReplay::RankedReplay(Options options) : options_(options) {
  require(options_.capacity >= 1, "replay: capacity must be >= 1");
  require(options_.alpha >= 0.0 && std::isfinite(options_.alpha), "replay: alpha must be >= 0");
  require(options_.beta >= 0.0 && std::isfinite(options_.beta), "replay: beta must be >= 0");
  require(options_.sort_period >= 1, "replay: sort period must be >= 1");
}

void RankedReplay::place(std::size_t pos, Entry e) {
  heap_[pos] = e;
  heap_pos_[e.slot] = pos;
}

void RankedReplay::sift_up(std::size_t pos) {
  Entry e = heap_[pos];
  while (pos > 0) {
    const std::size_t parent = (pos - 1) / 2;
    if (!before(e, heap_[parent])) break;
    place(pos, heap_[parent]);
    pos = parent;
  }
  place(pos, e);
}

void RankedReplay::sift_down(std::size_t pos) {
  Entry e = heap_[pos];
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t child = 2 * pos + 1;
    if (child >= n) break;
    if (child + 1 < n && before(heap_[child + 1], heap_[child])) ++child;
    if (!before(heap_[child], e)) break;
    place(pos, heap_[child]);
    pos = child;
  }
  place(pos, e);
}

void RankedReplay::push(Transition t) {
  const double key = heap_.empty() ? 1.0 : heap_.front().key;
  const Entry entry{key, push_count_, 0};
  ++push_count_;

  if (slots_.size() < options_.capacity) {
    const std::size_t slot = slots_.size();
    slots_.push_back(std::move(t));
    heap_pos_.push_back(heap_.size());
    heap_.push_back({entry.key, entry.seq, slot});
    sift_up(heap_.size() - 1);
    next_slot_ = slots_.size() % options_.capacity;
    return;
  }
  // Full: the oldest slot is overwritten in place and re-sifted.
  const std::size_t slot = next_slot_;
  slots_[slot] = std::move(t);
  const std::size_t pos = heap_pos_[slot];
  heap_[pos] = {entry.key, entry.seq, slot};
  sift_up(pos);
  sift_down(heap_pos_[slot]);
  next_slot_ = (slot + 1) % options_.capacity;
}

bool RankedReplay::maybe_sort() {
  if (push_count_ == 0 || push_count_ % options_.sort_period != 0 || last_sorted_at_ == push_count_) return false;
  std::sort(heap_.begin(), heap_.end(), before);
  for (std::size_t i = 0; i < heap_.size(); ++i) heap_pos_[heap_[i].slot] = i;
  last_sorted_at_ = push_count_;
  return true;
}

void RankedReplay::extend_weights() {
  cumulative_.reserve(heap_.size());
  while (cumulative_.size() < heap_.size()) {
    const double rank = static_cast<double>(cumulative_.size() + 1);
    const double w = std::pow(rank, -options_.alpha);
    cumulative_.push_back(cumulative_.empty() ? w : cumulative_.back() + w);
  }
}

SampledBatch RankedReplay::sample(std::size_t m, Rng& rng) {
  require_batch(size(), m);
  extend_weights();
  const std::size_t n = heap_.size();
  const double total = cumulative_[n - 1];
  std::uniform_real_distribution<double> uniform(0.0, total);

  SampledBatch batch;
  batch.ids.reserve(m);
  batch.items.reserve(m);
  batch.weights.reserve(m);
  const double p_min = std::pow(static_cast<double>(n), -options_.alpha);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = uniform(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.begin() + static_cast<std::ptrdiff_t>(n), u);
    std::size_t pos = static_cast<std::size_t>(it - cumulative_.begin());
    if (pos >= n) pos = n - 1;
    const std::size_t slot = heap_[pos].slot;
    batch.ids.push_back(slot);
    batch.items.push_back(&slots_[slot]);
    if (options_.beta > 0.0) {
      const double p = std::pow(static_cast<double>(pos + 1), -options_.alpha);
      batch.weights.push_back(std::pow(p / p_min, -options_.beta));
    } else {
      batch.weights.push_back(1.0);
    }
  }
  return batch;
}

void RankedReplay::update_priorities(std::span<const std::size_t> ids, std::span<const double> td_errors) {
  require(ids.size() == td_errors.size(), "replay: ids and td errors differ in length");
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t slot = ids[i];
    require(slot < slots_.size(), "replay: id " + std::to_string(slot) + " out of range");
    const double key = std::abs(td_errors[i]);
    require(std::isfinite(key), "replay: non-finite td error");
    const std::size_t pos = heap_pos_[slot];
    heap_[pos].key = key;
    sift_up(pos);
    sift_down(heap_pos_[slot]);
  }
}

const Transition& RankedReplay::at(std::size_t id) const {
  require(id < slots_.size(), "replay: id out of range");
  return slots_[id];
}

std::size_t RankedReplay::rank_of(std::size_t id) const {
  require(id < slots_.size(), "replay: id out of range");
  return heap_pos_[id] + 1;
}

double RankedReplay::key_of(std::size_t id) const {
  require(id < slots_.size(), "replay: id out of range");
  return heap_[heap_pos_[id]].key;
}

std::vector<double> RankedReplay::rank_probabilities() const {
  std::vector<double> p(heap_.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::pow(static_cast<double>(k + 1), -options_.alpha);
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<std::size_t> RankedReplay::ids_by_rank() const {
  std::vector<std::size_t> ids;
  ids.reserve(heap_.size());
  for (const auto& e : heap_) ids.push_back(e.slot);
  return ids;
}

bool RankedReplay::heap_property_holds() const {
  for (std::size_t i = 1; i < heap_.size(); ++i)
    if (before(heap_[i], heap_[(i - 1) / 2])) return false;
  return true;
}

}  // namespace avdqn
