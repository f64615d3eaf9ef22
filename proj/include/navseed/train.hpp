#ifndef NAVSEED_TRAIN_HPP
#define NAVSEED_TRAIN_HPP

#include <map>
#include <optional>
#include <string>

#include "navseed/agents.hpp"
#include "navseed/expert.hpp"
#include "navseed/sim.hpp"

namespace navseed::drl {

enum class TrainMode { Scratch, Per, PretrainPer };

inline const char* mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::Scratch: return "scratch";
    case TrainMode::Per: return "per";
    case TrainMode::PretrainPer: return "pretrain_per";
  }
  return "?";
}

inline TrainMode mode_from_name(const std::string& s) {
  if (s == "scratch") return TrainMode::Scratch;
  if (s == "per") return TrainMode::Per;
  if (s == "pretrain_per") return TrainMode::PretrainPer;
  throw std::invalid_argument("unknown train mode: " + s);
}

struct UpdateRecord {
  int64_t step = 0;
  float critic_loss = 0.0f;
  std::optional<float> actor_loss;
};

struct EpisodeRecord {
  int episode = 0;
  float total_reward = 0.0f;
  float arrive_reward = 0.0f;    // summed r_arrive over the episode
  float distance_reward = 0.0f;  // summed r_distance over the episode
  sim::TerminalKind outcome = sim::TerminalKind::None;
  int steps = 0;
  int64_t env_steps = 0;  // cumulative env steps at episode end
};

struct TrainLog {
  std::vector<UpdateRecord> updates;
  std::vector<EpisodeRecord> episodes;
  int64_t expert_rows_sampled = 0;
  std::map<std::string, std::string> meta;
};

// Offline pre-training (TD on the fixed expert dataset): uniform batches,
// critics every step, actor and targets on the policy-delay cadence for all
// three algorithms. Deterministic given the seed.
inline std::pair<nn::ModelParams, TrainLog> pretrain(const expert::ExpertDataset& dataset,
                                                     nn::Algo algo, const HyperParams& hp,
                                                     int64_t steps, uint64_t seed) {
  if (dataset.records.empty()) throw std::invalid_argument("pretrain: empty dataset");
  if (steps < 1) throw std::invalid_argument("pretrain: steps must be >= 1");
  if (static_cast<int>(dataset.records.front().state.size()) != sim::kObservationDim)
    throw std::invalid_argument("pretrain: dataset dimension mismatch");

  Agent agent(algo, nn::NetDims{}, seed, hp);
  Rng sample_rng(seed, 0x5A);
  TrainLog log;
  log.updates.reserve(steps);
  Minibatch batch;

  for (int64_t j = 1; j <= steps; ++j) {
    batch.resize(hp.batch_size);
    for (int r = 0; r < hp.batch_size; ++r) {
      size_t idx = sample_rng.uniform_index(dataset.records.size());
      batch.set_row(r, dataset.records[idx], 1.0f, -1);
    }
    UpdateResult res = agent.update(batch, j);
    UpdateRecord rec;
    rec.step = j;
    rec.critic_loss = static_cast<float>(res.critic_loss);
    if (res.actor_loss) rec.actor_loss = static_cast<float>(*res.actor_loss);
    log.updates.push_back(rec);
  }
  log.meta["algo"] = nn::algo_name(algo);
  log.meta["lr"] = format_number(hp.lr);
  log.meta["batch_size"] = std::to_string(hp.batch_size);
  log.meta["steps"] = std::to_string(steps);
  log.meta["seed"] = std::to_string(seed);
  return {std::move(agent.model()), std::move(log)};
}

struct OnlineConfig {
  TrainMode mode = TrainMode::Scratch;
  nn::Algo algo = nn::Algo::TD3;
  int64_t total_env_steps = 0;
  uint64_t seed = 0;
};

// Online adaptation: act with exploration, store the transition, one gradient
// update per environment step (PER-mixed batches unless scratch), reset on
// terminal. Episode rewards are logged with their arrival and distance parts.
inline std::pair<nn::ModelParams, TrainLog> online_train(sim::Environment& env,
                                                         std::optional<nn::ModelParams> init,
                                                         ExpertBuffer* expert_buf,
                                                         const OnlineConfig& cfg,
                                                         const HyperParams& hp) {
  if (cfg.mode == TrainMode::PretrainPer && !init)
    throw std::invalid_argument("online_train: pretrain_per requires initial parameters");
  if ((cfg.mode == TrainMode::Per || cfg.mode == TrainMode::PretrainPer) && !expert_buf)
    throw std::invalid_argument("online_train: per modes require an expert buffer");
  if (init && init->algo != cfg.algo)
    throw std::invalid_argument("online_train: init model algorithm mismatch");

  Agent agent = init ? Agent(std::move(*init), cfg.seed, hp)
                     : Agent(cfg.algo, nn::NetDims{}, cfg.seed, hp);
  TrainLog log;
  log.meta["mode"] = mode_name(cfg.mode);
  log.meta["algo"] = nn::algo_name(cfg.algo);
  log.meta["lr"] = format_number(hp.lr);
  log.meta["seed"] = std::to_string(cfg.seed);
  if (cfg.total_env_steps <= 0) {
    log.meta["env_steps"] = "0";
    return {std::move(agent.model()), std::move(log)};
  }

  ReplayBuffer online(hp.buffer_capacity);
  Rng sample_rng(cfg.seed, 0x0B);
  Minibatch batch;
  const ExpertBuffer* expert_src = cfg.mode == TrainMode::Scratch ? nullptr : expert_buf;

  sim::Observation obs = env.reset();
  int episode = 0, ep_steps = 0;
  float ep_total = 0.0f, ep_arrive = 0.0f, ep_distance = 0.0f;

  for (int64_t step = 1; step <= cfg.total_env_steps; ++step) {
    std::array<float, 2> action = agent.act(obs, /*explore=*/true);
    sim::StepOutcome out = env.step(action);

    expert::TransitionRecord rec;
    rec.state = obs;
    rec.action = action;
    rec.reward = static_cast<float>(out.reward.total);
    rec.next_state = out.observation;
    rec.done_kind = out.terminal_kind;
    online.push(rec);

    ep_total += static_cast<float>(out.reward.total);
    ep_arrive += static_cast<float>(out.reward.r_arrive);
    ep_distance += static_cast<float>(out.reward.r_distance);
    ++ep_steps;

    if (cfg.mode == TrainMode::Scratch) {
      batch.resize(hp.batch_size);
      for (int r = 0; r < hp.batch_size; ++r) batch.set_row(r, online.sample(sample_rng), 1.0f, -1);
    } else {
      per_sample(expert_src, &online, hp, step, cfg.total_env_steps, sample_rng, batch);
      log.expert_rows_sampled += batch.expert_rows;
    }

    UpdateResult res = agent.update_online(batch, step);
    if (cfg.mode != TrainMode::Scratch && batch.expert_rows > 0 && expert_buf)
      per_update_priorities(*expert_buf, batch.source, res.td_errors);

    UpdateRecord urec;
    urec.step = step;
    urec.critic_loss = static_cast<float>(res.critic_loss);
    if (res.actor_loss) urec.actor_loss = static_cast<float>(*res.actor_loss);
    log.updates.push_back(urec);

    if (out.done) {
      EpisodeRecord erec;
      erec.episode = episode;
      erec.total_reward = ep_total;
      erec.arrive_reward = ep_arrive;
      erec.distance_reward = ep_distance;
      erec.outcome = out.terminal_kind;
      erec.steps = ep_steps;
      erec.env_steps = step;
      log.episodes.push_back(erec);
      ++episode;
      ep_total = ep_arrive = ep_distance = 0.0f;
      ep_steps = 0;
      obs = env.reset();
    } else {
      obs = out.observation;
    }
  }
  log.meta["env_steps"] = std::to_string(cfg.total_env_steps);
  log.meta["expert_rows_sampled"] = std::to_string(log.expert_rows_sampled);
  return {std::move(agent.model()), std::move(log)};
}

}  // namespace navseed::drl

#endif  // NAVSEED_TRAIN_HPP
