#ifndef NAVSEED_REPRO_HPP
#define NAVSEED_REPRO_HPP

#include <filesystem>

#include "navseed/config.hpp"
#include "navseed/report.hpp"

namespace navseed::cli {

struct CriterionVerdict {
  std::string name;
  std::string detail;
  bool pass = false;
};

struct ReproSummary {
  std::vector<CriterionVerdict> verdicts;
  bool all_pass() const {
    for (const auto& v : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

namespace detail {

inline void write_summary_csv(const ReproSummary& s, const std::string& path) {
  auto f = eval::detail::open_write(path);
  std::fprintf(f.get(), "criterion,pass,detail\n");
  for (const auto& v : s.verdicts)
    std::fprintf(f.get(), "%s,%s,\"%s\"\n", v.name.c_str(), v.pass ? "pass" : "fail",
                 v.detail.c_str());
}

inline expert::ExpertDataset dataset_with_target_records(const sim::WorldMap& map,
                                                         const sim::EpisodeConfig& ec,
                                                         const sim::RewardParams& rp,
                                                         const expert::ExpertConfig& xc,
                                                         size_t target_records, uint64_t seed,
                                                         int workers) {
  // generate in slabs until the target is reached, then trim to size
  expert::ExpertDataset ds;
  int episodes_done = 0;
  while (ds.records.size() < target_records) {
    int batch = std::max<int>(32, static_cast<int>((target_records - ds.records.size()) / 30));
    expert::ExpertDataset part;
    {
      // episode seeds continue across slabs so the stream is a prefix property
      std::vector<expert::EpisodeResult> episodes(batch);
      int w = std::max(1, std::min(workers, batch));
      std::vector<std::thread> pool;
      for (int t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
          for (int i = t; i < batch; i += w)
            episodes[i] =
                expert::run_expert_episode(map, ec, rp, xc, seed, episodes_done + i);
        });
      for (auto& th : pool) th.join();
      for (auto& ep : episodes) {
        ++part.stats.episodes;
        if (ep.outcome == sim::TerminalKind::Arrived) {
          ++part.stats.success_episodes;
          part.records.insert(part.records.end(), ep.records.begin(), ep.records.end());
        }
      }
    }
    episodes_done += batch;
    ds.records.insert(ds.records.end(), part.records.begin(), part.records.end());
    ds.stats.episodes += part.stats.episodes;
    ds.stats.success_episodes += part.stats.success_episodes;
    if (episodes_done > 20000)
      throw std::runtime_error("dataset generation is not reaching the record target");
  }
  ds.records.resize(target_records);
  ds.stats = expert::compute_stats(ds.records);
  return ds;
}

}  // namespace detail

struct ReproOptions {
  std::string out_dir;
  std::string scale = "smoke";  // smoke | desk
  uint64_t seed = 20240817;
  int workers = 2;
};

// The end-to-end experiment pipeline: expert dataset, offline comparison,
// online regime comparison, held-out map evaluation, summary verdicts.
// Smoke scale finishes in minutes and exists for determinism checks; desk
// scale runs the full comparisons.
inline ReproSummary run_reproduction_suite(const ReproOptions& opt) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.out_dir);
  auto path = [&](const std::string& name) { return opt.out_dir + "/" + name; };
  bool smoke = opt.scale == "smoke";
  if (!smoke && opt.scale != "desk")
    throw std::invalid_argument("repro: scale must be smoke or desk");

  sim::WorldMap corridor = sim::load_embedded_map("corridor");
  sim::EpisodeConfig ec;
  sim::RewardParams rp;
  expert::ExpertConfig xc;
  drl::HyperParams hp;
  hp.lr = 3e-4;  // desk-scale rate; the paper default 3e-6 needs far longer runs
  hp.batch_size = smoke ? 64 : 256;

  std::vector<uint64_t> seeds;
  for (uint64_t s = 0; s < (smoke ? 1u : 3u); ++s) seeds.push_back(opt.seed + s);
  int64_t pretrain_steps = smoke ? 2000 : 20000;
  int64_t online_steps = smoke ? 5000 : 30000;
  size_t dataset_records = smoke ? 6000 : 20000;

  std::string timing;
  auto stamp = [&](const std::string& label, auto&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing += label + " " + format_number(dt) + " s\n";
  };

  // stage 1: expert dataset
  expert::ExpertDataset ds;
  stamp("dataset", [&] {
    ds = detail::dataset_with_target_records(corridor, ec, rp, xc, dataset_records, opt.seed,
                                             opt.workers);
    expert::write_dataset(ds, path("data.bin"));
  });
  NAVSEED_LOG_INFO("repro: dataset %zu records, expert success %d/%d", ds.records.size(),
                   ds.stats.success_episodes, ds.stats.episodes);

  // stage 2: offline comparison across the three algorithms
  eval::ComparisonReport offline;
  stamp("compare_offline", [&] {
    offline = eval::compare_offline(ds, hp, pretrain_steps, seeds, opt.workers);
    eval::emit_csv(offline, path("report_offline.csv"));
    eval::emit_svg_curves(offline, "critic_loss", path("offline_loss.svg"));
  });
  for (size_t j = 0; j < offline.runs.size(); ++j)
    if (!offline.models.empty())
      nn::save_model(offline.models[j], path("model_" + offline.runs[j].label + ".bin"));
  for (size_t j = 0; j < offline.runs.size(); ++j)
    eval::emit_csv(offline.logs[j], path("pretrain_" + offline.runs[j].label + ".csv"));

  // stage 3: online regimes, initialized from a gentle TD3 pretrain at the
  // paper's learning rate (the desk-scale rate saturates the offline actor)
  nn::ModelParams init_model;
  stamp("init_pretrain", [&] {
    drl::HyperParams init_hp = hp;
    init_hp.lr = 3e-6;
    auto [m, log] = drl::pretrain(ds, nn::Algo::TD3, init_hp, pretrain_steps / 2, opt.seed);
    init_model = std::move(m);
    nn::save_model(init_model, path("model_init.bin"));
  });
  eval::OnlineComparisonSpec spec;
  spec.map = &corridor;
  spec.dataset = &ds;
  spec.init_model = &init_model;
  spec.episode = ec;
  spec.reward = rp;
  spec.env_step_budget = online_steps;
  spec.seeds = seeds;
  eval::ComparisonReport online;
  stamp("compare_online", [&] {
    online = eval::compare_online(spec, hp, opt.workers);
    eval::emit_csv(online, path("report_online.csv"));
    eval::emit_svg_curves(online, "episode_reward", path("online_reward.svg"));
    eval::emit_svg_curves(online, "critic_loss", path("online_loss.svg"));
  });
  for (size_t j = 0; j < online.runs.size(); ++j)
    eval::emit_csv(online.logs[j], path("train_" + online.runs[j].label + ".csv"));

  auto find_run = [&](const eval::ComparisonReport& rep, const std::string& mode,
                      uint64_t seed) -> const eval::RunReport* {
    for (const auto& r : rep.runs)
      if (r.mode == mode && r.seed == seed) return &r;
    return nullptr;
  };
  auto find_model = [&](const eval::ComparisonReport& rep, const std::string& mode,
                        uint64_t seed) -> const nn::ModelParams* {
    for (size_t j = 0; j < rep.runs.size(); ++j)
      if (rep.runs[j].mode == mode && rep.runs[j].seed == seed && !rep.models.empty())
        return &rep.models[j];
    return nullptr;
  };

  // stage 4: generalization of the first-seed pretrain+PER policy
  const nn::ModelParams* final_policy = find_model(online, "pretrain_per", seeds[0]);
  std::map<std::string, eval::EvalMetrics> generalization;
  if (final_policy) {
    stamp("generalization", [&] {
      nn::ModelParams policy = *final_policy;
      nn::save_model(policy, path("model_final.bin"));
      for (const char* name : {"house", "office", "maze"}) {
        sim::WorldMap m = sim::load_embedded_map(name);
        eval::EvalMetrics metrics =
            eval::run_policy(m, ec, rp, policy, smoke ? 20 : 100, opt.seed + 9000, opt.workers);
        eval::emit_csv(metrics, path(std::string("eval_") + name + ".csv"));
        generalization[name] = metrics;
      }
    });
  }

  // summary verdicts (desk maps to the acceptance criteria; smoke reports the
  // same quantities at its reduced scale without gating on them)
  ReproSummary summary;
  {
    CriterionVerdict v;
    v.name = "expert-success";
    double rate = static_cast<double>(ds.stats.success_episodes) /
                  std::max(1, ds.stats.episodes);
    v.pass = rate >= 0.9;
    v.detail = "expert success rate " + format_number(rate);
    summary.verdicts.push_back(v);
  }
  {
    CriterionVerdict v;
    v.name = "offline-convergence-ordering";
    int td3_better = 0, decreasing = 0, total = 0;
    for (uint64_t s : seeds) {
      const eval::RunReport *td3 = nullptr, *ddpg = nullptr, *sac = nullptr;
      for (const auto& r : offline.runs) {
        if (r.seed != s) continue;
        if (r.algo == "td3") td3 = &r;
        if (r.algo == "ddpg") ddpg = &r;
        if (r.algo == "sac") sac = &r;
      }
      if (!td3 || !ddpg || !sac) continue;
      ++total;
      auto steps_of = [&](const eval::RunReport* r) {
        return r->steps_to_convergence ? *r->steps_to_convergence
                                       : std::numeric_limits<int64_t>::max();
      };
      if (steps_of(td3) < steps_of(ddpg) && steps_of(td3) < steps_of(sac)) ++td3_better;
    }
    for (size_t j = 0; j < offline.logs.size(); ++j)
      decreasing += eval::mean_tail_loss(offline.logs[j], 1000) <
                    eval::mean_head_loss(offline.logs[j], 1000);
    v.pass = 2 * td3_better > total && decreasing == static_cast<int>(offline.logs.size());
    v.detail = "td3 fastest in " + std::to_string(td3_better) + "/" + std::to_string(total) +
               " seeds; " + std::to_string(decreasing) + "/" +
               std::to_string(offline.logs.size()) + " losses decreasing";
    summary.verdicts.push_back(v);
  }
  {
    CriterionVerdict v;
    v.name = "online-regime-comparison";
    double pp_mean = 0, scratch_mean = 0;
    int better_success = 0, total = 0;
    for (uint64_t s : seeds) {
      const eval::RunReport* pp = find_run(online, "pretrain_per", s);
      const eval::RunReport* sc = find_run(online, "scratch", s);
      if (!pp || !sc) continue;
      ++total;
      pp_mean += pp->final5_reward;
      scratch_mean += sc->final5_reward;
      better_success += pp->last20_success > sc->last20_success;
    }
    pp_mean /= std::max(1, total);
    scratch_mean /= std::max(1, total);
    v.pass = pp_mean >= 1.5 * scratch_mean && 2 * better_success > total;
    v.detail = "final5 pretrain_per " + format_number(pp_mean) + " vs scratch " +
               format_number(scratch_mean) + "; success better in " +
               std::to_string(better_success) + "/" + std::to_string(total);
    summary.verdicts.push_back(v);
  }
  {
    CriterionVerdict v;
    v.name = "training-step-reduction";
    int pass_seeds = 0, total = 0;
    for (uint64_t s : seeds) {
      const eval::RunReport* pp = find_run(online, "pretrain_per", s);
      const eval::RunReport* per = find_run(online, "per", s);
      if (!pp || !per) continue;
      ++total;
      if (pp->steps_to_success06) {
        if (!per->steps_to_success06 ||
            *pp->steps_to_success06 * 2 <= *per->steps_to_success06)
          ++pass_seeds;
      }
    }
    v.pass = 2 * pass_seeds > total;
    v.detail = "step-reduction holds in " + std::to_string(pass_seeds) + "/" +
               std::to_string(total) + " seeds";
    summary.verdicts.push_back(v);
  }
  for (const auto& [name, metrics] : generalization) {
    CriterionVerdict v;
    v.name = "generalization-" + name;
    v.pass = metrics.collision_rate <= 0.3;
    v.detail = "collision rate " + format_number(metrics.collision_rate) + " over " +
               std::to_string(metrics.episodes) + " episodes";
    summary.verdicts.push_back(v);
  }

  detail::write_summary_csv(summary, path("summary.csv"));
  {
    auto f = eval::detail::open_write(path("timing.txt"));
    std::fprintf(f.get(), "%s", timing.c_str());
  }
  for (const auto& v : summary.verdicts)
    NAVSEED_LOG_INFO("repro %s: %s (%s)", v.pass ? "pass" : "FAIL", v.name.c_str(),
                     v.detail.c_str());
  return summary;
}

}  // namespace navseed::cli

#endif  // NAVSEED_REPRO_HPP
