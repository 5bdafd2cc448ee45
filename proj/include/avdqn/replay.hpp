#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avdqn/dist.hpp"
#include "avdqn/envs.hpp"

namespace avdqn {

struct Transition {
  Observation s;
  int a = 0;
  double r = 0.0;
  Observation s_next;
  bool done = false;
};

struct SampledBatch {
  std::vector<std::size_t> ids;  // stable storage ids, valid for update_priorities
  std::vector<const Transition*> items;
  std::vector<double> weights;  // importance weights; all 1 unless enabled
};

class Replay {
 public:
  virtual ~Replay() = default;

  virtual void push(Transition t) = 0;
  // i.i.d. draws with replacement; throws InsufficientData if size() < m.
  virtual SampledBatch sample(std::size_t m, Rng& rng) = 0;
  virtual void update_priorities(std::span<const std::size_t> ids, std::span<const double> td_errors) = 0;
  // Periodic maintenance; returns true when it did work.
  virtual bool maybe_sort() { return false; }

  virtual std::size_t size() const = 0;
  virtual std::size_t capacity() const = 0;
  virtual const Transition& at(std::size_t id) const = 0;
};

// Ring buffer with uniform sampling (DQN baseline).
class UniformReplay final : public Replay {
 public:
  explicit UniformReplay(std::size_t capacity);

  void push(Transition t) override;
  SampledBatch sample(std::size_t m, Rng& rng) override;
  void update_priorities(std::span<const std::size_t>, std::span<const double>) override {}

  std::size_t size() const override { return slots_.size(); }
  std::size_t capacity() const override { return capacity_; }
  const Transition& at(std::size_t id) const override;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> slots_;
};

// Rank-based prioritized replay.
//
// Transitions live in ring-buffer slots; an array-backed binary max-heap
// orders the slots by key |td error|. A transition's rank is its heap array
// position + 1, which is approximate between sorts and exact right after
// maybe_sort() (every `sort_period` pushes). P(rank k) = k^-alpha / sum_j j^-alpha.
//
// New transitions take the current maximum key. Equal keys order by
// insertion, older first.
class RankedReplay final : public Replay {
 public:
  struct Options {
    std::size_t capacity = 1'000'000;
    double alpha = 0.7;
    double beta = 0.0;  // importance-sampling exponent; 0 disables
    std::size_t sort_period = 1000;
  };

  RankedReplay();
  explicit RankedReplay(Options options);

  void push(Transition t) override;
  SampledBatch sample(std::size_t m, Rng& rng) override;
  void update_priorities(std::span<const std::size_t> ids, std::span<const double> td_errors) override;
  bool maybe_sort() override;

  std::size_t size() const override { return slots_.size(); }
  std::size_t capacity() const override { return options_.capacity; }
  const Transition& at(std::size_t id) const override;

  const Options& options() const { return options_; }
  std::uint64_t push_count() const { return push_count_; }

  // 1-based rank proxy of a stored transition.
  std::size_t rank_of(std::size_t id) const;
  double key_of(std::size_t id) const;
  // Sampling probability of each rank 1..size().
  std::vector<double> rank_probabilities() const;
  // Storage ids in heap array order (rank 1 first).
  std::vector<std::size_t> ids_by_rank() const;
  bool heap_property_holds() const;

 private:
  struct Entry {
    double key;
    std::uint64_t seq;
    std::size_t slot;
  };
  static bool before(const Entry& a, const Entry& b) {
    return a.key > b.key || (a.key == b.key && a.seq < b.seq);
  }
  void place(std::size_t pos, Entry e);
  void sift_up(std::size_t pos);
  void sift_down(std::size_t pos);
  void extend_weights();

  Options options_;
  std::vector<Transition> slots_;
  std::vector<Entry> heap_;
  std::vector<std::size_t> heap_pos_;  // slot -> heap index
  std::vector<double> cumulative_;     // prefix sums of k^-alpha
  std::size_t next_slot_ = 0;
  std::uint64_t push_count_ = 0;
  std::uint64_t last_sorted_at_ = 0;
};

}  // namespace avdqn
