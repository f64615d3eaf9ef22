#ifndef NAVSEED_BUFFERS_HPP
#define NAVSEED_BUFFERS_HPP

#include <cmath>
#include <vector>

#include "navseed/dataset.hpp"
#include "navseed/tensor.hpp"

namespace navseed::drl {

using expert::TransitionRecord;

struct HyperParams {
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-6;              // paper default; desk-scale runs override
  int batch_size = 256;
  int policy_delay = 2;
  double td3_target_noise = 0.2;
  double td3_noise_clip = 0.5;
  double exploration_noise = 0.1;
  double sac_alpha = 0.2;
  double per_alpha = 0.6;
  double per_beta0 = 0.4;        // annealed to 1 over the online budget
  double rho_start = 0.5;        // expert fraction schedule, linear
  double rho_end = 0.1;
  size_t buffer_capacity = 200000;
  bool sac_target_entropy_net = false;  // sample target values from the target policy
};

/// Uniform ring buffer; overwrites oldest once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be > 0");
  }

  void push(const TransitionRecord& r) {
    if (store_.size() < capacity_) {
      store_.push_back(r);
    } else {
      store_[cursor_] = r;
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  size_t size() const { return store_.size(); }
  bool empty() const { return store_.empty(); }
  const TransitionRecord& at(size_t i) const { return store_[i]; }
  const TransitionRecord& sample(Rng& rng) const { return store_[rng.uniform_index(store_.size())]; }

 private:
  size_t capacity_;
  size_t cursor_ = 0;
  std::vector<TransitionRecord> store_;
};

// Prefix-sum tree over non-negative leaf masses, double precision. Leaves are
// padded to a power of two; internal node = sum of children.
class SumTree {
 public:
  explicit SumTree(size_t n) : n_(n) {
    size_t cap = 1;
    while (cap < n_) cap <<= 1;
    cap_ = cap;
    tree_.assign(2 * cap_, 0.0);
  }

  void set(size_t i, double v) {
    size_t node = cap_ + i;
    tree_[node] = v;
    for (node >>= 1; node >= 1; node >>= 1) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
  }

  double leaf(size_t i) const { return tree_[cap_ + i]; }
  double total() const { return tree_[1]; }
  size_t size() const { return n_; }

  /// Index of the leaf whose prefix interval contains u in [0, total).
  size_t sample(double u) const {
    size_t node = 1;
    while (node < cap_) {
      double left = tree_[2 * node];
      if (u < left) {
        node = 2 * node;
      } else {
        u -= left;
        node = 2 * node + 1;
      }
    }
    size_t i = node - cap_;
    return i < n_ ? i : n_ - 1;
  }

 private:
  size_t n_ = 0;
  size_t cap_ = 1;
  std::vector<double> tree_;
};

// Immutable expert transitions with proportional TD-error priorities. Leaf
// mass is p_i^alpha; p_i is floored at eps so no record starves.
class ExpertBuffer {
 public:
  static constexpr double kPriorityEps = 1e-3;

  ExpertBuffer(std::vector<TransitionRecord> records, double per_alpha)
      : records_(std::move(records)),
        per_alpha_(per_alpha),
        priorities_(records_.size(), 1.0),
        tree_(records_.empty() ? 1 : records_.size()) {
    if (records_.empty()) throw std::invalid_argument("expert buffer: no records");
    for (size_t i = 0; i < records_.size(); ++i) tree_.set(i, std::pow(priorities_[i], per_alpha_));
  }

  size_t size() const { return records_.size(); }
  const TransitionRecord& at(size_t i) const { return records_[i]; }
  double priority(size_t i) const { return priorities_[i]; }
  const SumTree& tree() const { return tree_; }

  size_t sample_index(Rng& rng) const { return tree_.sample(rng.uniform() * tree_.total()); }

  /// P(i) under the proportional scheme.
  double probability(size_t i) const { return tree_.leaf(i) / tree_.total(); }

  void update_priority(size_t i, double td_error) {
    if (i >= records_.size()) throw std::out_of_range("expert buffer: priority index");
    priorities_[i] = std::abs(td_error) + kPriorityEps;
    tree_.set(i, std::pow(priorities_[i], per_alpha_));
  }

 private:
  std::vector<TransitionRecord> records_;
  double per_alpha_;
  std::vector<double> priorities_;
  SumTree tree_;
};

// One training minibatch in tensor form. `source` is the expert-buffer index
// for expert rows and -1 for online rows; weights are the max-normalized
// importance weights (1 for online rows).
struct Minibatch {
  nn::Tensor states;
  nn::Tensor actions;
  nn::Tensor rewards;       // B x 1
  nn::Tensor next_states;
  nn::Tensor done_mask;     // B x 1, 1 only for arrived/collided terminals
  nn::Tensor weights;       // B x 1
  std::vector<int64_t> source;
  int expert_rows = 0;

  void resize(int b) {
    states.reshape_for_reuse(b, sim::kObservationDim);
    actions.reshape_for_reuse(b, sim::kActionDim);
    rewards.reshape_for_reuse(b, 1);
    next_states.reshape_for_reuse(b, sim::kObservationDim);
    done_mask.reshape_for_reuse(b, 1);
    weights.reshape_for_reuse(b, 1);
    source.assign(b, -1);
    expert_rows = 0;
  }

  void set_row(int r, const TransitionRecord& rec, float weight, int64_t src) {
    for (int j = 0; j < sim::kObservationDim; ++j) {
      states.at(r, j) = rec.state[j];
      next_states.at(r, j) = rec.next_state[j];
    }
    actions.at(r, 0) = rec.action[0];
    actions.at(r, 1) = rec.action[1];
    rewards.at(r, 0) = rec.reward;
    done_mask.at(r, 0) = rec.terminal_for_bootstrap() ? 1.0f : 0.0f;
    weights.at(r, 0) = weight;
    source[r] = src;
  }
};

/// Expert fraction of the batch at `step` of the schedule.
inline double expert_fraction(const HyperParams& hp, int64_t step, int64_t total_steps) {
  double frac = total_steps > 0 ? std::min(1.0, static_cast<double>(step) / total_steps) : 1.0;
  return hp.rho_start + (hp.rho_end - hp.rho_start) * frac;
}

inline double per_beta(const HyperParams& hp, int64_t step, int64_t total_steps) {
  double frac = total_steps > 0 ? std::min(1.0, static_cast<double>(step) / total_steps) : 1.0;
  return hp.per_beta0 + (1.0 - hp.per_beta0) * frac;
}

// Mixed draw: ceil(rho * B) prioritized expert rows, remainder uniform from
// the online buffer. Expert rows carry (N * P(i))^-beta weights, normalized
// by the largest weight in the batch; online rows weigh 1.
inline void per_sample(const ExpertBuffer* expert, const ReplayBuffer* online,
                       const HyperParams& hp, int64_t step, int64_t total_steps, Rng& rng,
                       Minibatch& out) {
  const int B = hp.batch_size;
  bool have_online = online && !online->empty();
  bool have_expert = expert && expert->size() > 0;
  if (!have_online && !have_expert)
    throw std::invalid_argument("per_sample: both buffers empty");

  int n_expert = 0;
  if (have_expert) {
    double rho = expert_fraction(hp, step, total_steps);
    n_expert = have_online ? static_cast<int>(std::ceil(rho * B)) : B;
    n_expert = std::min(n_expert, B);
  }

  out.resize(B);
  double beta = per_beta(hp, step, total_steps);
  double n_records = static_cast<double>(have_expert ? expert->size() : 1);
  double max_w = 0.0;
  std::vector<double> raw_w(n_expert, 1.0);
  for (int r = 0; r < n_expert; ++r) {
    size_t idx = expert->sample_index(rng);
    double p = expert->probability(idx);
    raw_w[r] = std::pow(n_records * p, -beta);
    max_w = std::max(max_w, raw_w[r]);
    out.set_row(r, expert->at(idx), 1.0f, static_cast<int64_t>(idx));
  }
  for (int r = 0; r < n_expert; ++r)
    out.weights.at(r, 0) = static_cast<float>(max_w > 0 ? raw_w[r] / max_w : 1.0);
  for (int r = n_expert; r < B; ++r)
    out.set_row(r, online->sample(rng), 1.0f, -1);
  out.expert_rows = n_expert;
}

/// Refresh priorities of the expert-sourced rows from their TD errors.
inline void per_update_priorities(ExpertBuffer& expert, const std::vector<int64_t>& source,
                                  const std::vector<double>& td_errors) {
  for (size_t r = 0; r < source.size(); ++r)
    if (source[r] >= 0) expert.update_priority(static_cast<size_t>(source[r]), td_errors[r]);
}

}  // namespace navseed::drl

#endif  // NAVSEED_BUFFERS_HPP
