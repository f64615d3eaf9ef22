#ifndef NAVSEED_DATASET_HPP
#define NAVSEED_DATASET_HPP

#include <array>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "navseed/sim.hpp"

namespace navseed::expert {

// One (s, a, r, s', done) tuple; the unit of the expert dataset and buffers.
struct TransitionRecord {
  std::array<float, sim::kObservationDim> state{};
  std::array<float, sim::kActionDim> action{};
  float reward = 0.0f;
  std::array<float, sim::kObservationDim> next_state{};
  sim::TerminalKind done_kind = sim::TerminalKind::None;

  bool done() const { return done_kind != sim::TerminalKind::None; }
  // arrival and collision are true terminals; timeout is a truncation and
  // still bootstraps in TD targets
  bool terminal_for_bootstrap() const {
    return done_kind == sim::TerminalKind::Arrived || done_kind == sim::TerminalKind::Collided;
  }

  bool operator==(const TransitionRecord&) const = default;
};

struct DatasetStats {
  int episodes = 0;
  int success_episodes = 0;
  int collision_episodes = 0;
  int timeout_episodes = 0;
  double mean_episode_reward = 0.0;
  bool low_success_warning = false;
};

struct ExpertDataset {
  std::vector<TransitionRecord> records;
  DatasetStats stats;
};

class DatasetFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr char kDatasetMagic[4] = {'N', 'A', 'V', 'D'};
constexpr uint32_t kDatasetVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

template <typename T>
void write_pod(std::FILE* f, const T& v) {
  if (std::fwrite(&v, sizeof(T), 1, f) != 1) throw std::runtime_error("dataset: write failed");
}

template <typename T>
T read_pod(std::FILE* f, const char* what) {
  T v;
  if (std::fread(&v, sizeof(T), 1, f) != 1)
    throw DatasetFormatError(std::string("dataset: truncated file reading ") + what);
  return v;
}

}  // namespace detail

/// Recompute stats from the records themselves (episodes end at done records).
inline DatasetStats compute_stats(const std::vector<TransitionRecord>& records) {
  DatasetStats s;
  double ep_reward = 0.0, total = 0.0;
  for (const auto& r : records) {
    ep_reward += r.reward;
    if (r.done()) {
      ++s.episodes;
      if (r.done_kind == sim::TerminalKind::Arrived) ++s.success_episodes;
      if (r.done_kind == sim::TerminalKind::Collided) ++s.collision_episodes;
      if (r.done_kind == sim::TerminalKind::Timeout) ++s.timeout_episodes;
      total += ep_reward;
      ep_reward = 0.0;
    }
  }
  if (s.episodes > 0) s.mean_episode_reward = total / s.episodes;
  s.low_success_warning = s.episodes > 0 && s.success_episodes < s.episodes / 2;
  return s;
}

// Binary format: magic NAVD, u32 version, u32 state_dim, u32 action_dim,
// u64 record_count, then per record little-endian f32
// [state(40), action(2), reward, next_state(40), done_kind].
inline void write_dataset(const ExpertDataset& ds, const std::string& path) {
  detail::FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("dataset: cannot open for write: " + path);
  std::fwrite(detail::kDatasetMagic, 1, 4, f.get());
  detail::write_pod(f.get(), detail::kDatasetVersion);
  detail::write_pod(f.get(), static_cast<uint32_t>(sim::kObservationDim));
  detail::write_pod(f.get(), static_cast<uint32_t>(sim::kActionDim));
  detail::write_pod(f.get(), static_cast<uint64_t>(ds.records.size()));
  for (const auto& r : ds.records) {
    std::fwrite(r.state.data(), sizeof(float), r.state.size(), f.get());
    std::fwrite(r.action.data(), sizeof(float), r.action.size(), f.get());
    detail::write_pod(f.get(), r.reward);
    std::fwrite(r.next_state.data(), sizeof(float), r.next_state.size(), f.get());
    detail::write_pod(f.get(), static_cast<float>(static_cast<int>(r.done_kind)));
  }
}

inline ExpertDataset read_dataset(const std::string& path) {
  detail::FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("dataset: cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, detail::kDatasetMagic, 4) != 0)
    throw DatasetFormatError("dataset: bad magic");
  uint32_t version = detail::read_pod<uint32_t>(f.get(), "version");
  if (version != detail::kDatasetVersion)
    throw DatasetFormatError("dataset: unsupported version " + std::to_string(version));
  uint32_t state_dim = detail::read_pod<uint32_t>(f.get(), "state_dim");
  uint32_t action_dim = detail::read_pod<uint32_t>(f.get(), "action_dim");
  if (state_dim != sim::kObservationDim || action_dim != sim::kActionDim)
    throw DatasetFormatError("dataset: dimension mismatch: state " + std::to_string(state_dim) +
                             ", action " + std::to_string(action_dim));
  uint64_t count = detail::read_pod<uint64_t>(f.get(), "record_count");

  ExpertDataset ds;
  ds.records.resize(count);
  for (uint64_t i = 0; i < count; ++i) {
    auto& r = ds.records[i];
    auto read_block = [&](float* dst, size_t n, const char* what) {
      if (std::fread(dst, sizeof(float), n, f.get()) != n)
        throw DatasetFormatError(std::string("dataset: truncated file reading ") + what);
    };
    read_block(r.state.data(), r.state.size(), "state");
    read_block(r.action.data(), r.action.size(), "action");
    r.reward = detail::read_pod<float>(f.get(), "reward");
    read_block(r.next_state.data(), r.next_state.size(), "next_state");
    float kind = detail::read_pod<float>(f.get(), "done_kind");
    int k = static_cast<int>(kind);
    if (k < 0 || k > 3 || static_cast<float>(k) != kind)
      throw DatasetFormatError("dataset: invalid done_kind value");
    r.done_kind = static_cast<sim::TerminalKind>(k);
  }
  ds.stats = compute_stats(ds.records);
  return ds;
}

}  // namespace navseed::expert

#endif  // NAVSEED_DATASET_HPP
