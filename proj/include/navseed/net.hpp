#ifndef NAVSEED_NET_HPP
#define NAVSEED_NET_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "navseed/autodiff.hpp"
#include "navseed/tensor.hpp"

namespace navseed::nn {

enum class Algo : uint8_t { DDPG = 0, SAC = 1, TD3 = 2 };

inline const char* algo_name(Algo a) {
  switch (a) {
    case Algo::DDPG: return "ddpg";
    case Algo::SAC: return "sac";
    case Algo::TD3: return "td3";
  }
  return "?";
}

inline Algo algo_from_name(const std::string& s) {
  if (s == "ddpg") return Algo::DDPG;
  if (s == "sac") return Algo::SAC;
  if (s == "td3") return Algo::TD3;
  throw std::invalid_argument("unknown algorithm: " + s);
}

struct NetDims {
  int obs = 40;
  int hidden = 256;
  int action = 2;
};

// Scratch arena for no-grad forward passes. Slots stay valid until reset.
template <typename S>
class WorkspaceT {
 public:
  void reset() { cursor_ = 0; }
  TensorT<S>& next(int rows, int cols) {
    if (cursor_ == static_cast<int>(pool_.size()))
      pool_.push_back(std::make_unique<TensorT<S>>());
    TensorT<S>& t = *pool_[cursor_++];
    t.reshape_for_reuse(rows, cols);
    return t;
  }

 private:
  std::vector<std::unique_ptr<TensorT<S>>> pool_;
  int cursor_ = 0;
};

using Workspace = WorkspaceT<float>;

namespace detail {

template <typename S>
void init_linear(ParamT<S>& W, ParamT<S>& b, int in, int out, Rng& rng, double gain = 1.0) {
  W.init_shape(in, out);
  b.init_shape(1, out);
  double bound = gain / std::sqrt(static_cast<double>(in));
  for (auto& v : W.value.data) v = static_cast<S>(rng.uniform(-bound, bound));
  for (auto& v : b.value.data) v = static_cast<S>(rng.uniform(-bound, bound));
}

template <typename S>
void linear_forward(const TensorT<S>& x, const ParamT<S>& W, const ParamT<S>& b, TensorT<S>& out) {
  gemm_accum(x, W.value, out, false);
  add_bias_rows(out, b.value);
}

template <typename S>
void relu_inplace(TensorT<S>& t) {
  for (auto& v : t.data)
    if (v < S(0)) v = S(0);
}

}  // namespace detail

// Policy network: obs -> 256 -> 256 -> 256 (ReLU) -> action head. The head is
// tanh(2) for the deterministic policies and a linear 4-wide (mu, log_std)
// for the stochastic one.
template <typename S>
struct ActorNetT {
  NetDims dims;
  bool sac_head = false;
  ParamT<S> w1, b1, w2, b2, w3, b3, w4, b4;

  void init(NetDims d, bool sac, Rng& rng) {
    dims = d;
    sac_head = sac;
    detail::init_linear(w1, b1, d.obs, d.hidden, rng);
    detail::init_linear(w2, b2, d.hidden, d.hidden, rng);
    detail::init_linear(w3, b3, d.hidden, d.hidden, rng);
    // small final layer keeps initial actions near zero
    detail::init_linear(w4, b4, d.hidden, sac ? 2 * d.action : d.action, rng, 0.1);
  }

  std::vector<ParamT<S>*> params() { return {&w1, &b1, &w2, &b2, &w3, &b3, &w4, &b4}; }
  std::vector<const ParamT<S>*> params() const {
    return {&w1, &b1, &w2, &b2, &w3, &b3, &w4, &b4};
  }

  void set_requires_grad(bool v) {
    for (auto* p : params()) p->requires_grad = v;
  }

  /// Trunk output (pre-head activations) into ws; returns the head input.
  const TensorT<S>& trunk(const TensorT<S>& obs, WorkspaceT<S>& ws) const {
    TensorT<S>& h1 = ws.next(obs.rows, dims.hidden);
    detail::linear_forward(obs, w1, b1, h1);
    detail::relu_inplace(h1);
    TensorT<S>& h2 = ws.next(obs.rows, dims.hidden);
    detail::linear_forward(h1, w2, b2, h2);
    detail::relu_inplace(h2);
    TensorT<S>& h3 = ws.next(obs.rows, dims.hidden);
    detail::linear_forward(h2, w3, b3, h3);
    detail::relu_inplace(h3);
    return h3;
  }

  /// Deterministic tanh action (DDPG/TD3 policies; SAC uses forward_sac).
  const TensorT<S>& forward(const TensorT<S>& obs, WorkspaceT<S>& ws) const {
    const TensorT<S>& h3 = trunk(obs, ws);
    TensorT<S>& out = ws.next(obs.rows, dims.action);
    detail::linear_forward(h3, w4, b4, out);
    for (auto& v : out.data) v = std::tanh(v);
    return out;
  }

  /// SAC head: mu and log_std (un-clamped; samplers clamp).
  void forward_sac(const TensorT<S>& obs, WorkspaceT<S>& ws, TensorT<S>& mu,
                   TensorT<S>& log_std) const {
    const TensorT<S>& h3 = trunk(obs, ws);
    TensorT<S>& head = ws.next(obs.rows, 2 * dims.action);
    detail::linear_forward(h3, w4, b4, head);
    mu.reshape_for_reuse(obs.rows, dims.action);
    log_std.reshape_for_reuse(obs.rows, dims.action);
    for (int i = 0; i < obs.rows; ++i)
      for (int d = 0; d < dims.action; ++d) {
        mu.at(i, d) = head.at(i, d);
        log_std.at(i, d) = head.at(i, dims.action + d);
      }
  }

  int build_trunk(GraphT<S>& g, int obs_node) {
    int h1 = g.relu(g.linear(obs_node, w1, b1));
    int h2 = g.relu(g.linear(h1, w2, b2));
    int h3 = g.relu(g.linear(h2, w3, b3));
    return h3;
  }

  /// Graph head for deterministic policies: tanh action node.
  int build(GraphT<S>& g, int obs_node) {
    return g.tanh_(g.linear(build_trunk(g, obs_node), w4, b4));
  }

  /// Graph head for SAC: (mu, log_std) nodes.
  std::pair<int, int> build_sac(GraphT<S>& g, int obs_node) {
    int head = g.linear(build_trunk(g, obs_node), w4, b4);
    return {g.slice_cols(head, 0, dims.action), g.slice_cols(head, dims.action, 2 * dims.action)};
  }
};

// One Q network: state and action branches at half width, concatenated, then
// two dense layers down to the scalar value.
template <typename S>
struct CriticQT {
  NetDims dims;
  ParamT<S> ws_, bs_, wa_, ba_, w2_, b2_, w3_, b3_;

  void init(NetDims d, Rng& rng) {
    dims = d;
    int half = d.hidden / 2;
    detail::init_linear(ws_, bs_, d.obs, half, rng);
    detail::init_linear(wa_, ba_, d.action, half, rng);
    detail::init_linear(w2_, b2_, d.hidden, d.hidden, rng);
    detail::init_linear(w3_, b3_, d.hidden, 1, rng);
  }

  std::vector<ParamT<S>*> params() {
    return {&ws_, &bs_, &wa_, &ba_, &w2_, &b2_, &w3_, &b3_};
  }
  std::vector<const ParamT<S>*> params() const {
    return {&ws_, &bs_, &wa_, &ba_, &w2_, &b2_, &w3_, &b3_};
  }

  void set_requires_grad(bool v) {
    for (auto* p : params()) p->requires_grad = v;
  }

  const TensorT<S>& forward(const TensorT<S>& obs, const TensorT<S>& act,
                            WorkspaceT<S>& ws) const {
    int half = dims.hidden / 2;
    TensorT<S>& hs = ws.next(obs.rows, half);
    detail::linear_forward(obs, ws_, bs_, hs);
    detail::relu_inplace(hs);
    TensorT<S>& ha = ws.next(obs.rows, half);
    detail::linear_forward(act, wa_, ba_, ha);
    detail::relu_inplace(ha);
    TensorT<S>& cat = ws.next(obs.rows, dims.hidden);
    for (int i = 0; i < obs.rows; ++i) {
      S* o = cat.row(i);
      const S* a = hs.row(i);
      const S* b = ha.row(i);
      for (int j = 0; j < half; ++j) o[j] = a[j];
      for (int j = 0; j < half; ++j) o[half + j] = b[j];
    }
    TensorT<S>& h2 = ws.next(obs.rows, dims.hidden);
    detail::linear_forward(cat, w2_, b2_, h2);
    detail::relu_inplace(h2);
    TensorT<S>& out = ws.next(obs.rows, 1);
    detail::linear_forward(h2, w3_, b3_, out);
    return out;
  }

  int build(GraphT<S>& g, int obs_node, int act_node) {
    int hs = g.relu(g.linear(obs_node, ws_, bs_));
    int ha = g.relu(g.linear(act_node, wa_, ba_));
    int cat = g.concat(hs, ha);
    int h2 = g.relu(g.linear(cat, w2_, b2_));
    return g.linear(h2, w3_, b3_);
  }
};

template <typename S>
struct TwinCriticT {
  CriticQT<S> q1, q2;

  void init(NetDims d, Rng& rng) {
    q1.init(d, rng);
    q2.init(d, rng);
  }
  std::vector<ParamT<S>*> params() {
    auto a = q1.params();
    auto b = q2.params();
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  void set_requires_grad(bool v) {
    q1.set_requires_grad(v);
    q2.set_requires_grad(v);
  }
};

template <typename S>
void copy_params(std::vector<ParamT<S>*> dst, std::vector<const ParamT<S>*> src) {
  assert(dst.size() == src.size());
  for (size_t i = 0; i < dst.size(); ++i) {
    dst[i]->value = src[i]->value;
    dst[i]->grad.reshape_for_reuse(src[i]->value.rows, src[i]->value.cols);
  }
}

/// target <- tau * online + (1 - tau) * target, elementwise over all params.
template <typename S>
void soft_update(std::vector<ParamT<S>*> target, std::vector<ParamT<S>*> online, double tau) {
  if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau must be in [0, 1]");
  assert(target.size() == online.size());
  S t = static_cast<S>(tau);
  for (size_t i = 0; i < target.size(); ++i) {
    auto& tv = target[i]->value.data;
    auto& ov = online[i]->value.data;
    assert(tv.size() == ov.size());
    // tau*online + (1-tau)*target, written so an equal pair stays bit-equal
    for (size_t k = 0; k < tv.size(); ++k) tv[k] = tv[k] + t * (ov[k] - tv[k]);
  }
}

// Actor, twin critic, and their targets for one agent.
template <typename S>
struct ModelParamsT {
  Algo algo = Algo::TD3;
  NetDims dims;
  ActorNetT<S> actor;
  TwinCriticT<S> critic;
  ActorNetT<S> target_actor;  // SAC leaves this untouched unless the literal
                              // target-entropy variant is enabled
  TwinCriticT<S> target_critic;

  void init(Algo a, NetDims d, uint64_t seed) {
    algo = a;
    dims = d;
    Rng rng(seed, 0x4E);
    actor.init(d, a == Algo::SAC, rng);
    critic.init(d, rng);
    target_actor.dims = d;
    target_actor.sac_head = actor.sac_head;
    target_critic.q1.dims = d;
    target_critic.q2.dims = d;
    sync_targets();
  }

  void sync_targets() {
    copy_params<S>(target_actor.params(), std::as_const(actor).params());
    copy_params<S>(target_critic.q1.params(), std::as_const(critic.q1).params());
    copy_params<S>(target_critic.q2.params(), std::as_const(critic.q2).params());
  }

  std::vector<ParamT<S>*> all_params() {
    std::vector<ParamT<S>*> out = actor.params();
    for (auto* p : critic.params()) out.push_back(p);
    for (auto* p : target_actor.params()) out.push_back(p);
    for (auto* p : target_critic.params()) out.push_back(p);
    return out;
  }
};

// Squashed-Gaussian sampling outside the graph (environment interaction and
// target values). Deterministic mode returns tanh(mu).
template <typename S>
void sac_sample(const ActorNetT<S>& actor, const TensorT<S>& obs, Rng* rng, WorkspaceT<S>& ws,
                TensorT<S>& action, TensorT<S>& log_prob, bool deterministic = false) {
  if (!actor.sac_head) throw std::logic_error("sac_sample: actor has no stochastic head");
  TensorT<S>& mu = ws.next(obs.rows, actor.dims.action);
  TensorT<S>& log_std = ws.next(obs.rows, actor.dims.action);
  actor.forward_sac(obs, ws, mu, log_std);
  action.reshape_for_reuse(obs.rows, actor.dims.action);
  log_prob.reshape_for_reuse(obs.rows, 1);
  for (int i = 0; i < obs.rows; ++i) {
    double logp = 0.0;
    for (int d = 0; d < actor.dims.action; ++d) {
      double lc = clamp(static_cast<double>(log_std.at(i, d)), GraphT<S>::kLogStdMin,
                        GraphT<S>::kLogStdMax);
      double eps = deterministic ? 0.0 : rng->normal();
      double u = static_cast<double>(mu.at(i, d)) + std::exp(lc) * eps;
      double a = std::tanh(u);
      action.at(i, d) = static_cast<S>(a);
      logp += -0.5 * eps * eps - lc - 0.91893853320467274178 -
              std::log(1.0 - a * a + GraphT<S>::kSquashEps);
    }
    log_prob.at(i, 0) = static_cast<S>(logp);
  }
}

using ActorNet = ActorNetT<float>;
using CriticQ = CriticQT<float>;
using TwinCritic = TwinCriticT<float>;
using ModelParams = ModelParamsT<float>;

}  // namespace navseed::nn

#endif  // NAVSEED_NET_HPP
