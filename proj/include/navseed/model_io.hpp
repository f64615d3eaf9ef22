#ifndef NAVSEED_MODEL_IO_HPP
#define NAVSEED_MODEL_IO_HPP

#include <cstdio>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include "navseed/net.hpp"

namespace navseed::nn {

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr char kModelMagic[4] = {'N', 'A', 'V', 'M'};
constexpr uint32_t kModelVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline void write_u32(std::FILE* f, uint32_t v) {
  if (std::fwrite(&v, 4, 1, f) != 1) throw std::runtime_error("model: write failed");
}

inline uint32_t read_u32(std::FILE* f, const char* what) {
  uint32_t v;
  if (std::fread(&v, 4, 1, f) != 1)
    throw ModelFormatError(std::string("model: truncated file reading ") + what);
  return v;
}

// weight/bias tensor pairs in declaration order: actor, critic q1, critic q2,
// then the same three target networks
inline std::vector<Param*> layer_order(ModelParams& m) {
  std::vector<Param*> out = m.actor.params();
  for (auto* p : m.critic.params()) out.push_back(p);
  for (auto* p : m.target_actor.params()) out.push_back(p);
  for (auto* p : m.target_critic.params()) out.push_back(p);
  return out;
}

}  // namespace detail

// Model file: magic NAVM, u32 version, u8 algorithm tag, u32 layer count,
// per-layer (rows, cols) u32 pairs, then f32 weights and biases per layer for
// the online and target networks.
inline void save_model(ModelParams& m, const std::string& path) {
  detail::FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("model: cannot open for write: " + path);
  std::fwrite(detail::kModelMagic, 1, 4, f.get());
  detail::write_u32(f.get(), detail::kModelVersion);
  uint8_t tag = static_cast<uint8_t>(m.algo);
  std::fwrite(&tag, 1, 1, f.get());

  std::vector<Param*> tensors = detail::layer_order(m);
  uint32_t layers = static_cast<uint32_t>(tensors.size() / 2);
  detail::write_u32(f.get(), layers);
  for (uint32_t i = 0; i < layers; ++i) {
    detail::write_u32(f.get(), static_cast<uint32_t>(tensors[2 * i]->value.rows));
    detail::write_u32(f.get(), static_cast<uint32_t>(tensors[2 * i]->value.cols));
  }
  for (uint32_t i = 0; i < layers; ++i) {
    const auto& w = tensors[2 * i]->value;
    const auto& b = tensors[2 * i + 1]->value;
    std::fwrite(w.data.data(), sizeof(float), w.size(), f.get());
    std::fwrite(b.data.data(), sizeof(float), b.size(), f.get());
  }
}

inline ModelParams load_model(const std::string& path,
                              std::optional<Algo> required = std::nullopt) {
  detail::FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("model: cannot open: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f.get()) != 4 || std::memcmp(magic, detail::kModelMagic, 4) != 0)
    throw ModelFormatError("model: bad magic");
  uint32_t version = detail::read_u32(f.get(), "version");
  if (version != detail::kModelVersion)
    throw ModelFormatError("model: unsupported version " + std::to_string(version));
  uint8_t tag;
  if (std::fread(&tag, 1, 1, f.get()) != 1) throw ModelFormatError("model: truncated header");
  if (tag > 2) throw ModelFormatError("model: unknown algorithm tag");
  Algo algo = static_cast<Algo>(tag);
  if (required && *required != algo)
    throw ModelFormatError(std::string("model: architecture mismatch: file is ") +
                           algo_name(algo) + ", expected " + algo_name(*required));

  uint32_t layers = detail::read_u32(f.get(), "layer count");
  std::vector<std::pair<uint32_t, uint32_t>> shapes(layers);
  for (auto& s : shapes) {
    s.first = detail::read_u32(f.get(), "layer rows");
    s.second = detail::read_u32(f.get(), "layer cols");
  }
  if (layers != 24)
    throw ModelFormatError("model: expected 24 layers, got " + std::to_string(layers));

  NetDims dims;
  dims.obs = static_cast<int>(shapes[0].first);
  dims.hidden = static_cast<int>(shapes[0].second);
  uint32_t head = shapes[3].second;
  dims.action = static_cast<int>(algo == Algo::SAC ? head / 2 : head);

  ModelParams m;
  m.init(algo, dims, 0);
  std::vector<Param*> tensors = detail::layer_order(m);
  for (uint32_t i = 0; i < layers; ++i) {
    auto& w = tensors[2 * i]->value;
    if (w.rows != static_cast<int>(shapes[i].first) || w.cols != static_cast<int>(shapes[i].second))
      throw ModelFormatError("model: layer " + std::to_string(i) + " shape mismatch");
  }
  for (uint32_t i = 0; i < layers; ++i) {
    auto& w = tensors[2 * i]->value;
    auto& b = tensors[2 * i + 1]->value;
    if (std::fread(w.data.data(), sizeof(float), w.size(), f.get()) != w.size())
      throw ModelFormatError("model: truncated weights at layer " + std::to_string(i));
    if (std::fread(b.data.data(), sizeof(float), b.size(), f.get()) != b.size())
      throw ModelFormatError("model: truncated biases at layer " + std::to_string(i));
  }
  return m;
}

}  // namespace navseed::nn

#endif  // NAVSEED_MODEL_IO_HPP
