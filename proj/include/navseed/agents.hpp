#ifndef NAVSEED_AGENTS_HPP
#define NAVSEED_AGENTS_HPP

#include <optional>

#include "navseed/adam.hpp"
#include "navseed/autodiff.hpp"
#include "navseed/buffers.hpp"
#include "navseed/net.hpp"

namespace navseed::drl {

using nn::Algo;
using nn::ModelParams;
using nn::NetDims;

/// Target-policy smoothing: clipped Gaussian noise per action entry, result
/// clipped back into the normalized action box.
inline void td3_smoothed_actions(Rng& rng, const nn::Tensor& next_a, double sigma, double clip,
                                 nn::Tensor& out) {
  out.reshape_for_reuse(next_a.rows, next_a.cols);
  for (int i = 0; i < next_a.rows; ++i)
    for (int d = 0; d < next_a.cols; ++d) {
      double eps = clamp(rng.normal(0.0, sigma), -clip, clip);
      out.at(i, d) = static_cast<float>(clamp(static_cast<double>(next_a.at(i, d)) + eps, -1.0, 1.0));
    }
}

struct UpdateResult {
  double critic_loss = 0.0;
  std::optional<double> actor_loss;
  std::vector<double> td_errors;  // per batch row, for priority refreshes
};

// One actor-critic learner: networks, optimizers, and the per-algorithm
// update rules. Owns its RNG stream (target noise, SAC sampling).
class Agent {
 public:
  Agent(Algo algo, NetDims dims, uint64_t seed, const HyperParams& hp)
      : hp_(hp),
        model_(),
        rng_(seed, 0xA6),
        actor_opt_(nullptr),
        critic_opt_(nullptr) {
    model_.init(algo, dims, seed);
    bind_optimizers();
  }

  Agent(ModelParams init, uint64_t seed, const HyperParams& hp)
      : hp_(hp), model_(std::move(init)), rng_(seed, 0xA6), actor_opt_(nullptr), critic_opt_(nullptr) {
    bind_optimizers();
  }

  ModelParams& model() { return model_; }
  const ModelParams& model() const { return model_; }
  Algo algo() const { return model_.algo; }
  Rng& rng() { return rng_; }

  /// Normalized action for one observation; optional exploration noise.
  std::array<float, 2> act(const sim::Observation& obs, bool explore) {
    ws_.reset();
    nn::Tensor& o = ws_.next(1, model_.dims.obs);
    for (int j = 0; j < model_.dims.obs; ++j) o.at(0, j) = obs[j];
    std::array<float, 2> a{};
    if (model_.algo == Algo::SAC) {
      nn::Tensor act, logp;
      nn::sac_sample(model_.actor, o, &rng_, ws_, act, logp, !explore);
      a = {act.at(0, 0), act.at(0, 1)};
    } else {
      const nn::Tensor& act = model_.actor.forward(o, ws_);
      a = {act.at(0, 0), act.at(0, 1)};
      if (explore) {
        for (auto& v : a)
          v = static_cast<float>(
              clamp(v + rng_.normal(0.0, hp_.exploration_noise), -1.0, 1.0));
      }
    }
    return a;
  }

  UpdateResult update(const Minibatch& batch, int64_t update_index) {
    switch (model_.algo) {
      case Algo::DDPG: return ddpg_update(batch, update_index % hp_.policy_delay == 0);
      case Algo::SAC: return sac_update(batch, update_index % hp_.policy_delay == 0);
      case Algo::TD3: return td3_update(batch, update_index);
    }
    throw std::logic_error("unknown algorithm");
  }

  /// Online variant: DDPG/SAC update the actor every step, TD3 keeps its delay.
  UpdateResult update_online(const Minibatch& batch, int64_t update_index) {
    switch (model_.algo) {
      case Algo::DDPG: return ddpg_update(batch, true);
      case Algo::SAC: return sac_update(batch, true);
      case Algo::TD3: return td3_update(batch, update_index);
    }
    throw std::logic_error("unknown algorithm");
  }

  // Single-critic update against y = r + g(1-d) Q1'(s', pi'(s')); actor
  // ascends Q1. Q2 is untouched.
  UpdateResult ddpg_update(const Minibatch& batch, bool update_actor) {
    if (batch.states.rows == 0) throw std::invalid_argument("ddpg_update: empty batch");
    UpdateResult res;
    ws_.reset();
    const nn::Tensor& next_a = model_.target_actor.forward(batch.next_states, ws_);
    const nn::Tensor& q1t = model_.target_critic.q1.forward(batch.next_states, next_a, ws_);
    nn::Tensor& y = ws_.next(batch.states.rows, 1);
    compute_targets(batch, q1t.data, y);

    res.critic_loss = critic_regression(batch, y, /*twin=*/false, res.td_errors);
    if (update_actor) res.actor_loss = actor_ascent_q1(batch);
    soft_update_all();
    return res;
  }

  // Clipped double-Q with smoothed target actions; the actor and the targets
  // move only on delayed steps.
  UpdateResult td3_update(const Minibatch& batch, int64_t update_index) {
    if (batch.states.rows == 0) throw std::invalid_argument("td3_update: empty batch");
    UpdateResult res;
    const int B = batch.states.rows;
    ws_.reset();
    const nn::Tensor& next_a = model_.target_actor.forward(batch.next_states, ws_);
    nn::Tensor& smoothed = ws_.next(B, model_.dims.action);
    td3_smoothed_actions(rng_, next_a, hp_.td3_target_noise, hp_.td3_noise_clip, smoothed);
    const nn::Tensor& q1t = model_.target_critic.q1.forward(batch.next_states, smoothed, ws_);
    const nn::Tensor& q2t = model_.target_critic.q2.forward(batch.next_states, smoothed, ws_);
    nn::Tensor& y = ws_.next(B, 1);
    std::vector<float> qmin(B);
    for (int i = 0; i < B; ++i) qmin[i] = std::min(q1t.at(i, 0), q2t.at(i, 0));
    compute_targets(batch, qmin, y);

    res.critic_loss = critic_regression(batch, y, /*twin=*/true, res.td_errors);
    if (update_index % hp_.policy_delay == 0) {
      res.actor_loss = actor_ascent_q1(batch);
      soft_update_all();
    }
    return res;
  }

  // Entropy-regularized target with a fresh policy sample; both critics
  // regress to it, the actor maximizes min-Q minus the scaled log-prob.
  UpdateResult sac_update(const Minibatch& batch, bool update_actor) {
    if (model_.algo != Algo::SAC) throw std::logic_error("sac_update: not a SAC model");
    if (batch.states.rows == 0) throw std::invalid_argument("sac_update: empty batch");
    UpdateResult res;
    const int B = batch.states.rows;
    ws_.reset();
    const nn::ActorNet& sampler =
        hp_.sac_target_entropy_net ? model_.target_actor : model_.actor;
    nn::Tensor next_a, next_logp;
    nn::sac_sample(sampler, batch.next_states, &rng_, ws_, next_a, next_logp);
    const nn::Tensor& q1t = model_.target_critic.q1.forward(batch.next_states, next_a, ws_);
    const nn::Tensor& q2t = model_.target_critic.q2.forward(batch.next_states, next_a, ws_);
    nn::Tensor& y = ws_.next(B, 1);
    std::vector<float> soft(B);
    for (int i = 0; i < B; ++i)
      soft[i] = static_cast<float>(std::min(q1t.at(i, 0), q2t.at(i, 0)) -
                                   hp_.sac_alpha * next_logp.at(i, 0));
    compute_targets(batch, soft, y);

    res.critic_loss = critic_regression(batch, y, /*twin=*/true, res.td_errors);

    if (update_actor) {
      // reparameterized sample through the graph
      nn::Tensor eps(B, model_.dims.action);
      for (auto& v : eps.data) v = static_cast<float>(rng_.normal());
      model_.critic.set_requires_grad(false);
      graph_.reset();
      int on = graph_.input(batch.states);
      auto [mu, log_std] = model_.actor.build_sac(graph_, on);
      int sg = graph_.squashed_gaussian(mu, log_std, eps);
      int act = graph_.slice_cols(sg, 0, model_.dims.action);
      int logp = graph_.slice_cols(sg, model_.dims.action, model_.dims.action + 1);
      int q1 = model_.critic.q1.build(graph_, on, act);
      int q2 = model_.critic.q2.build(graph_, on, act);
      int loss = graph_.mean(
          graph_.sub(graph_.scale(logp, static_cast<float>(hp_.sac_alpha)), graph_.min2(q1, q2)));
      actor_opt_->zero_grad();
      graph_.backward(loss);
      actor_opt_->step(hp_.lr);
      model_.critic.set_requires_grad(true);
      res.actor_loss = graph_.value(loss).data[0];
    }
    // critic targets track every update; SAC keeps no actor target by default
    nn::soft_update(model_.target_critic.q1.params(), model_.critic.q1.params(), hp_.tau);
    nn::soft_update(model_.target_critic.q2.params(), model_.critic.q2.params(), hp_.tau);
    if (hp_.sac_target_entropy_net)
      nn::soft_update(model_.target_actor.params(), model_.actor.params(), hp_.tau);
    return res;
  }

 private:
  void bind_optimizers() {
    actor_opt_ = std::make_unique<nn::Adam>(model_.actor.params());
    critic_opt_ = std::make_unique<nn::Adam>(model_.critic.params());
  }

  template <typename Seq>
  void compute_targets(const Minibatch& batch, const Seq& next_q, nn::Tensor& y) {
    const int B = batch.states.rows;
    y.reshape_for_reuse(B, 1);
    for (int i = 0; i < B; ++i) {
      float mask = 1.0f - batch.done_mask.at(i, 0);
      y.at(i, 0) = batch.rewards.at(i, 0) +
                   static_cast<float>(hp_.gamma) * mask * static_cast<float>(next_q[i]);
    }
  }

  /// Importance-weighted MSE regression of Q1 (and Q2 when twin) onto y.
  double critic_regression(const Minibatch& batch, const nn::Tensor& y,
                           bool twin, std::vector<double>& td_errors) {
    graph_.reset();
    int on = graph_.input(batch.states);
    int an = graph_.input(batch.actions);
    int yn = graph_.input(y);
    int wn = graph_.input(batch.weights);
    int q1 = model_.critic.q1.build(graph_, on, an);
    int d1 = graph_.sub(q1, yn);
    int loss1 = graph_.mean(graph_.mul(graph_.square(d1), wn));
    int loss = loss1;
    int d2 = -1;
    if (twin) {
      int q2 = model_.critic.q2.build(graph_, on, an);
      d2 = graph_.sub(q2, yn);
      int loss2 = graph_.mean(graph_.mul(graph_.square(d2), wn));
      loss = graph_.add(loss1, loss2);
    }
    critic_opt_->zero_grad();
    graph_.backward(loss);
    critic_opt_->step(hp_.lr);

    const int B = batch.states.rows;
    td_errors.assign(B, 0.0);
    const auto& e1 = graph_.value(d1);
    for (int i = 0; i < B; ++i) td_errors[i] = std::abs(e1.at(i, 0));
    if (twin) {
      const auto& e2 = graph_.value(d2);
      for (int i = 0; i < B; ++i)
        td_errors[i] = 0.5 * (td_errors[i] + std::abs(e2.at(i, 0)));
    }
    return graph_.value(loss).data[0];
  }

  /// Deterministic-policy objective: descend -mean Q1(s, pi(s)).
  double actor_ascent_q1(const Minibatch& batch) {
    model_.critic.set_requires_grad(false);
    graph_.reset();
    int on = graph_.input(batch.states);
    int act = model_.actor.build(graph_, on);
    int q = model_.critic.q1.build(graph_, on, act);
    int loss = graph_.mean(graph_.scale(q, -1.0f));
    actor_opt_->zero_grad();
    graph_.backward(loss);
    actor_opt_->step(hp_.lr);
    model_.critic.set_requires_grad(true);
    return graph_.value(loss).data[0];
  }

  void soft_update_all() {
    nn::soft_update(model_.target_actor.params(), model_.actor.params(), hp_.tau);
    nn::soft_update(model_.target_critic.q1.params(), model_.critic.q1.params(), hp_.tau);
    nn::soft_update(model_.target_critic.q2.params(), model_.critic.q2.params(), hp_.tau);
  }

  HyperParams hp_;
  ModelParams model_;
  Rng rng_;
  nn::Graph graph_;
  nn::Workspace ws_;
  std::unique_ptr<nn::Adam> actor_opt_;
  std::unique_ptr<nn::Adam> critic_opt_;
};

}  // namespace navseed::drl

#endif  // NAVSEED_AGENTS_HPP
