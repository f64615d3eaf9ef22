#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "navseed/adam.hpp"
#include "navseed/autodiff.hpp"
#include "navseed/model_io.hpp"
#include "navseed/net.hpp"

using namespace navseed;
using namespace navseed::nn;

namespace {

template <typename S>
void fill_random(TensorT<S>& t, Rng& rng, double lo = -1.0, double hi = 1.0) {
  for (auto& v : t.data) v = static_cast<S>(rng.uniform(lo, hi));
}

template <typename S>
void randomize(ParamT<S>& p, Rng& rng, double scale = 0.5) {
  fill_random(p.value, rng, -scale, scale);
}

// Central finite differences through an arbitrary loss closure, in double.
void check_grads_fd(std::vector<ParamT<double>*> params, std::function<double()> loss_fn,
                    std::function<void()> backward_fn, double eps = 1e-5, double tol = 1e-4) {
  for (auto* p : params) p->zero_grad();
  backward_fn();
  for (auto* p : params) {
    for (size_t k = 0; k < p->value.size(); ++k) {
      double saved = p->value.data[k];
      p->value.data[k] = saved + eps;
      double up = loss_fn();
      p->value.data[k] = saved - eps;
      double down = loss_fn();
      p->value.data[k] = saved;
      double fd = (up - down) / (2.0 * eps);
      double an = p->grad.data[k];
      double denom = std::max({1e-6, std::abs(fd), std::abs(an)});
      REQUIRE(std::abs(fd - an) / denom < tol);
    }
  }
}

// Long-hand scalar forward of the actor, independent of the tensor kernels.
std::vector<double> actor_oracle(const ActorNet& net, const std::vector<float>& obs) {
  auto dense = [](const std::vector<double>& x, const Param& W, const Param& b, bool relu) {
    std::vector<double> out(W.value.cols, 0.0);
    for (int j = 0; j < W.value.cols; ++j) {
      double acc = b.value.at(0, j);
      for (int i = 0; i < W.value.rows; ++i) acc += x[i] * static_cast<double>(W.value.at(i, j));
      out[j] = relu ? std::max(0.0, acc) : acc;
    }
    return out;
  };
  std::vector<double> x(obs.begin(), obs.end());
  x = dense(x, net.w1, net.b1, true);
  x = dense(x, net.w2, net.b2, true);
  x = dense(x, net.w3, net.b3, true);
  x = dense(x, net.w4, net.b4, false);
  for (auto& v : x) v = std::tanh(v);
  return x;
}

std::pair<double, double> critic_oracle(const TwinCritic& c, const std::vector<float>& obs,
                                        const std::vector<float>& act) {
  auto one = [&](const CriticQ& q) {
    auto dense = [](const std::vector<double>& x, const Param& W, const Param& b, bool relu) {
      std::vector<double> out(W.value.cols, 0.0);
      for (int j = 0; j < W.value.cols; ++j) {
        double acc = b.value.at(0, j);
        for (int i = 0; i < W.value.rows; ++i) acc += x[i] * static_cast<double>(W.value.at(i, j));
        out[j] = relu ? std::max(0.0, acc) : acc;
      }
      return out;
    };
    std::vector<double> s(obs.begin(), obs.end());
    std::vector<double> a(act.begin(), act.end());
    auto hs = dense(s, q.ws_, q.bs_, true);
    auto ha = dense(a, q.wa_, q.ba_, true);
    std::vector<double> cat = hs;
    cat.insert(cat.end(), ha.begin(), ha.end());
    auto h2 = dense(cat, q.w2_, q.b2_, true);
    auto out = dense(h2, q.w3_, q.b3_, false);
    return out[0];
  };
  return {one(c.q1), one(c.q2)};
}

}  // namespace

TEST_CASE("actor forward: zero params give zero actions, batching consistent") {
  NetDims d{40, 16, 2};
  ActorNet net;
  Rng rng(1);
  net.init(d, false, rng);
  for (auto* p : net.params()) p->value.zero();

  Workspace ws;
  Tensor obs(3, 40);
  Rng orng(2);
  fill_random(obs, orng);
  const Tensor& out = net.forward(obs, ws);
  for (auto v : out.data) CHECK(v == 0.0f);

  // one row evaluated alone matches the same row inside a batch, bit for bit
  Rng rng2(7);
  net.init(d, false, rng2);
  Workspace ws2;
  const Tensor full = net.forward(obs, ws2);
  for (int r = 0; r < 3; ++r) {
    Tensor single(1, 40);
    for (int j = 0; j < 40; ++j) single.at(0, j) = obs.at(r, j);
    Workspace ws3;
    const Tensor& one = net.forward(single, ws3);
    for (int j = 0; j < 2; ++j) REQUIRE(one.at(0, j) == full.at(r, j));
  }
}

TEST_CASE("actor and critic forward match scalar oracle") {
  NetDims d{40, 8, 2};
  Rng rng(33);
  ActorNet actor;
  actor.init(d, false, rng);
  TwinCritic critic;
  critic.init(d, rng);

  Rng orng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<float> obs(40), act(2);
    for (auto& v : obs) v = static_cast<float>(orng.uniform(-1, 1));
    for (auto& v : act) v = static_cast<float>(orng.uniform(-1, 1));
    Tensor to(1, 40), ta(1, 2);
    for (int j = 0; j < 40; ++j) to.at(0, j) = obs[j];
    ta.at(0, 0) = act[0];
    ta.at(0, 1) = act[1];

    Workspace ws;
    const Tensor& a = actor.forward(to, ws);
    auto ora = actor_oracle(actor, obs);
    REQUIRE(std::abs(a.at(0, 0) - ora[0]) < 1e-6);
    REQUIRE(std::abs(a.at(0, 1) - ora[1]) < 1e-6);

    Workspace ws2;
    const Tensor& q1 = critic.q1.forward(to, ta, ws2);
    const Tensor& q2 = critic.q2.forward(to, ta, ws2);
    auto [o1, o2] = critic_oracle(critic, obs, act);
    REQUIRE(std::abs(q1.at(0, 0) - o1) < 1e-6);
    REQUIRE(std::abs(q2.at(0, 0) - o2) < 1e-6);
  }
}

TEST_CASE("critic: Q1 and Q2 share nothing") {
  NetDims d{40, 8, 2};
  Rng rng(5);
  TwinCritic critic;
  critic.init(d, rng);
  Tensor obs(2, 40), act(2, 2);
  Rng orng(6);
  fill_random(obs, orng);
  fill_random(act, orng);

  Workspace ws;
  Tensor q1_before = critic.q1.forward(obs, act, ws);
  for (auto* p : critic.q2.params())
    for (auto& v : p->value.data) v += 0.37f;
  Workspace ws2;
  const Tensor& q1_after = critic.q1.forward(obs, act, ws2);
  for (size_t i = 0; i < q1_before.size(); ++i) REQUIRE(q1_before.data[i] == q1_after.data[i]);

  // gradients of a Q1-only loss are zero on every Q2 parameter
  GraphT<float> g;
  for (auto* p : critic.params()) p->zero_grad();
  int on = g.input(obs);
  int an = g.input(act);
  int q1 = critic.q1.build(g, on, an);
  int loss = g.mean(g.square(q1));
  g.backward(loss);
  for (auto* p : critic.q2.params())
    for (auto v : p->grad.data) REQUIRE(v == 0.0f);
  bool any_nonzero = false;
  for (auto* p : critic.q1.params())
    for (auto v : p->grad.data) any_nonzero |= v != 0.0f;
  CHECK(any_nonzero);
}

TEST_CASE("backward: 1x1 linear MSE matches the hand formula") {
  GraphT<double> g;
  ParamT<double> W, b;
  W.init_shape(1, 1);
  b.init_shape(1, 1);
  W.value.data[0] = 0.7;
  b.value.data[0] = -0.2;
  TensorT<double> x(1, 1), y(1, 1);
  x.data[0] = 1.3;
  y.data[0] = 0.5;

  int xn = g.input(x);
  int yn = g.input(y);
  int pred = g.linear(xn, W, b);
  int loss = g.mean(g.square(g.sub(pred, yn)));
  W.zero_grad();
  b.zero_grad();
  g.backward(loss);

  double resid = W.value.data[0] * x.data[0] + b.value.data[0] - y.data[0];
  CHECK(W.grad.data[0] == doctest::Approx(2.0 * resid * x.data[0]).epsilon(1e-12));
  CHECK(b.grad.data[0] == doctest::Approx(2.0 * resid).epsilon(1e-12));
}

TEST_CASE("backward: zero-residual loss has zero gradients") {
  GraphT<double> g;
  ParamT<double> W, b;
  W.init_shape(2, 1);
  b.init_shape(1, 1);
  W.value.data = {0.3, -0.4};
  b.value.data[0] = 0.1;
  TensorT<double> x(4, 2), y(4, 1);
  Rng rng(9);
  fill_random(x, rng);
  // targets equal to predictions
  for (int i = 0; i < 4; ++i)
    y.at(i, 0) = x.at(i, 0) * 0.3 + x.at(i, 1) * -0.4 + 0.1;

  int loss = g.mean(g.square(g.sub(g.linear(g.input(x), W, b), g.input(y))));
  W.zero_grad();
  b.zero_grad();
  g.backward(loss);
  for (auto v : W.grad.data) CHECK(std::abs(v) < 1e-12);
  CHECK(std::abs(b.grad.data[0]) < 1e-12);
}

TEST_CASE("backward: finite differences across the full operator set") {
  // toy nets at the spec's oracle scale: obs 40 -> 8 -> 2
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 100);
    NetDims d{40, 8, 2};
    ActorNetT<double> actor;
    actor.init(d, false, rng);
    TwinCriticT<double> critic;
    critic.init(d, rng);
    TensorT<double> obs(6, 40), y(6, 1), w(6, 1);
    fill_random(obs, rng);
    fill_random(y, rng);
    for (auto& v : w.data) v = rng.uniform(0.1, 1.0);

    GraphT<double> g;
    auto build = [&]() {
      g.reset();
      int on = g.input(obs);
      int act = actor.build(g, on);                       // linear/relu/tanh
      int q1 = critic.q1.build(g, on, act);               // concat path
      int q2 = critic.q2.build(g, on, act);
      int qmin = g.min2(q1, q2);                          // min
      int resid = g.sub(qmin, g.input(y));
      int weighted = g.mul(g.square(resid), g.input(w));  // square/mul
      return g.mean(g.scale(weighted, 0.5));              // scale/mean
    };
    std::vector<ParamT<double>*> params = actor.params();
    for (auto* p : critic.params()) params.push_back(p);
    check_grads_fd(
        params, [&]() { return g.value(build()).data[0]; },
        [&]() { g.backward(build()); });
  }
}

TEST_CASE("backward: squashed gaussian matches finite differences") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 500);
    NetDims d{6, 8, 2};
    ActorNetT<double> actor;
    actor.init(d, true, rng);
    TwinCriticT<double> critic;
    critic.init(d, rng);
    TensorT<double> obs(4, 6), eps(4, 2);
    fill_random(obs, rng);
    for (auto& v : eps.data) v = rng.normal();

    GraphT<double> g;
    auto build = [&]() {
      g.reset();
      int on = g.input(obs);
      auto [mu, log_std] = actor.build_sac(g, on);
      int sg = g.squashed_gaussian(mu, log_std, eps);
      int act = g.slice_cols(sg, 0, 2);
      int logp = g.slice_cols(sg, 2, 3);
      int q1 = critic.q1.build(g, on, act);
      int q2 = critic.q2.build(g, on, act);
      int qmin = g.min2(q1, q2);
      // SAC actor objective: alpha * logp - min(Q1, Q2)
      return g.mean(g.sub(g.scale(logp, 0.2), qmin));
    };
    check_grads_fd(
        actor.params(), [&]() { return g.value(build()).data[0]; },
        [&]() {
          for (auto* p : actor.params()) p->zero_grad();
          g.backward(build());
        });
  }
}

TEST_CASE("tanh saturation: gradients finite at |preactivation| = 20") {
  GraphT<double> g;
  ParamT<double> W, b;
  W.init_shape(1, 1);
  b.init_shape(1, 1);
  W.value.data[0] = 20.0;
  b.value.data[0] = 0.0;
  TensorT<double> x(1, 1);
  x.data[0] = 1.0;
  int loss = g.mean(g.tanh_(g.linear(g.input(x), W, b)));
  W.zero_grad();
  b.zero_grad();
  g.backward(loss);
  CHECK(std::isfinite(W.grad.data[0]));
  CHECK(std::abs(W.grad.data[0]) < 1e-10);
}

TEST_CASE("adam: closed-form first step, zero-grad step, two-step hand check") {
  // first step moves by ~ -lr * sign(g)
  ParamT<double> p;
  p.init_shape(1, 1);
  p.value.data[0] = 1.0;
  p.grad.resize(1, 1);
  p.grad.data[0] = 0.37;
  AdamT<double> opt({&p});
  opt.step(0.01);
  CHECK(std::abs(p.value.data[0] - (1.0 - 0.01)) < 1e-6);

  // zero grad: parameter untouched, t still advances
  ParamT<double> q;
  q.init_shape(1, 1);
  q.value.data[0] = 2.5;
  q.grad.resize(1, 1);
  AdamT<double> opt2({&q});
  opt2.step(0.1);
  CHECK(q.value.data[0] == 2.5);
  CHECK(opt2.t() == 1);

  // two constant-gradient steps against a long-hand computation
  double g = -0.8, lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ParamT<double> r;
  r.init_shape(1, 1);
  r.value.data[0] = 0.3;
  r.grad.resize(1, 1);
  AdamT<double> opt3({&r});
  double m = 0, v = 0, x = 0.3;
  for (int t = 1; t <= 2; ++t) {
    r.grad.data[0] = g;
    opt3.step(lr);
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    double mhat = m / (1 - std::pow(b1, t));
    double vhat = v / (1 - std::pow(b2, t));
    x -= lr * mhat / (std::sqrt(vhat) + eps);
  }
  CHECK(std::abs(r.value.data[0] - x) < 1e-7);
}

TEST_CASE("soft update: endpoints and midpoint") {
  ParamT<float> target, online;
  target.init_shape(1, 3);
  online.init_shape(1, 3);
  target.value.data = {1.0f, 2.0f, -1.0f};
  online.value.data = {0.0f, 0.0f, 0.0f};

  auto t0 = target.value.data;
  soft_update<float>({&target}, {&online}, 0.0);
  CHECK(target.value.data == t0);

  soft_update<float>({&target}, {&online}, 0.5);
  CHECK(target.value.data[0] == 0.5f);

  soft_update<float>({&target}, {&online}, 1.0);
  CHECK(target.value.data[0] == 0.0f);

  CHECK_THROWS_AS(soft_update<float>({&target}, {&online}, 1.5), std::invalid_argument);
}

TEST_CASE("sac_sample: bounds, deterministic limit, log-density oracle") {
  NetDims d{40, 16, 2};
  Rng rng(11);
  ActorNet actor;
  actor.init(d, true, rng);

  Workspace ws;
  Tensor obs(1, 40);
  Rng orng(12);
  Rng draw(13);
  // 1e5 draws stay strictly inside (-1, 1)
  Tensor action, logp;
  for (int i = 0; i < 1000; ++i) {
    ws.reset();
    fill_random(obs, orng);
    Tensor big_obs(100, 40);
    for (int r = 0; r < 100; ++r)
      for (int j = 0; j < 40; ++j) big_obs.at(r, j) = obs.at(0, j);
    sac_sample(actor, big_obs, &draw, ws, action, logp);
    for (auto v : action.data) {
      REQUIRE(v > -1.0f);
      REQUIRE(v < 1.0f);
    }
  }

  // sigma -> 0: action collapses to tanh(mu)
  for (auto& v : actor.b4.value.data) v = 0.0f;
  for (auto& v : actor.w4.value.data) v = 0.0f;
  // bias the log_std columns hard negative
  actor.b4.value.at(0, 2) = -50.0f;
  actor.b4.value.at(0, 3) = -50.0f;
  actor.b4.value.at(0, 0) = 0.4f;
  actor.b4.value.at(0, 1) = -0.7f;
  ws.reset();
  sac_sample(actor, obs, &draw, ws, action, logp);
  CHECK(action.at(0, 0) == doctest::Approx(std::tanh(0.4)).epsilon(1e-6));
  CHECK(action.at(0, 1) == doctest::Approx(std::tanh(-0.7)).epsilon(1e-6));

  // log-prob against a numerical CDF-difference density, in double
  Rng prng(21);
  auto phi = [](double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); };
  for (int trial = 0; trial < 100; ++trial) {
    double mu1 = prng.uniform(-1, 1), mu2 = prng.uniform(-1, 1);
    double ls1 = prng.uniform(-2, 0), ls2 = prng.uniform(-2, 0);
    TensorT<double> muT(1, 2), lsT(1, 2), eps(1, 2);
    muT.data = {mu1, mu2};
    lsT.data = {ls1, ls2};
    eps.data = {prng.normal(), prng.normal()};

    GraphT<double> g;
    ParamT<double> dummyW;  // route mu/log_std through inputs only
    int sg = g.squashed_gaussian(g.input(muT), g.input(lsT), eps);
    const auto& out = g.value(sg);
    double a1 = out.at(0, 0), a2 = out.at(0, 1), lp = out.at(0, 2);
    if (std::abs(a1) > 0.99 || std::abs(a2) > 0.99) continue;

    auto log_density = [&](double a, double mu, double ls) {
      double sigma = std::exp(ls);
      double h = 1e-6;
      double zu = (std::atanh(a + h) - mu) / sigma;
      double zd = (std::atanh(a - h) - mu) / sigma;
      return std::log((phi(zu) - phi(zd)) / (2 * h));
    };
    double oracle = log_density(a1, mu1, ls1) + log_density(a2, mu2, ls2);
    REQUIRE(std::abs(lp - oracle) < 1e-3);
  }
}

TEST_CASE("model io: bit-exact round trip, tag mismatch, truncation") {
  NetDims d{40, 32, 2};
  ModelParams m;
  m.init(Algo::TD3, d, 99);
  // leave targets slightly different from online nets
  soft_update<float>(m.target_actor.params(), m.actor.params(), 0.25);

  std::string path = "/tmp/navseed_test_model.bin";
  save_model(m, path);
  ModelParams back = load_model(path);
  CHECK(back.algo == Algo::TD3);
  CHECK(back.dims.obs == 40);
  CHECK(back.dims.hidden == 32);

  auto a = detail::layer_order(m);
  auto b = detail::layer_order(back);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i]->value.data.size() == b[i]->value.data.size());
    for (size_t k = 0; k < a[i]->value.data.size(); ++k)
      REQUIRE(a[i]->value.data[k] == b[i]->value.data[k]);
  }

  CHECK_THROWS_WITH_AS(load_model(path, Algo::SAC), doctest::Contains("architecture mismatch"),
                       ModelFormatError);

  // truncate the tail
  {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    std::string data;
    char buf[65536];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) data.append(buf, n);
    std::fclose(f);
    data.resize(data.size() / 2);
    f = std::fopen(path.c_str(), "wb");
    std::fwrite(data.data(), 1, data.size(), f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("truncated"), ModelFormatError);

  // bad magic
  {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    std::fwrite("JUNKJUNK", 1, 8, f);
    std::fclose(f);
  }
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("bad magic"), ModelFormatError);
}

TEST_CASE("forward determinism: identical params and obs give identical bits") {
  NetDims d{40, 64, 2};
  Rng rng(3);
  ActorNet a1;
  a1.init(d, false, rng);
  Tensor obs(8, 40);
  Rng orng(4);
  fill_random(obs, orng);
  Workspace w1, w2;
  const Tensor r1 = a1.forward(obs, w1);
  const Tensor& r2 = a1.forward(obs, w2);
  REQUIRE(r1.data == r2.data);
}
