#ifndef NAVSEED_COMMON_HPP
#define NAVSEED_COMMON_HPP

#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace navseed {

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Normalize an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

template <typename T>
inline T clamp(T v, T lo, T hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Deterministic RNG. xoshiro256++ core with hand-rolled uniform/normal draws
// so sequences are identical across compilers and standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0) {
    // splitmix64 expansion of (seed, stream) into the state
    uint64_t x = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
    for (auto& s : state_) {
      x += 0x9E3779B97F4A7C15ull;
      uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      s = z ^ (z >> 31);
    }
  }

  uint64_t next_u64() {
    auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) {
    // rejection-free modulo bias is negligible for n << 2^64, but stay exact
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  uint64_t state_[4] = {};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("NAVSEED_LOG");
    if (!env) return LogLevel::Info;
    std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

inline void log_msg(LogLevel lvl, const char* fmt, ...) {
  if (lvl > log_level()) return;
  const char* tag = lvl == LogLevel::Error ? "error" : (lvl == LogLevel::Info ? "info" : "debug");
  std::fprintf(stderr, "[navseed %s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fprintf(stderr, "\n");
}

#define NAVSEED_LOG_INFO(...) ::navseed::log_msg(::navseed::LogLevel::Info, __VA_ARGS__)
#define NAVSEED_LOG_DEBUG(...) ::navseed::log_msg(::navseed::LogLevel::Debug, __VA_ARGS__)
#define NAVSEED_LOG_ERROR(...) ::navseed::log_msg(::navseed::LogLevel::Error, __VA_ARGS__)

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace navseed

#endif  // NAVSEED_COMMON_HPP
