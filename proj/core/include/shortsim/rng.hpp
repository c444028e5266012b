#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace shortsim {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a, stable across platforms (std::hash is not).
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(seed ^ mix64(key));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  return derive_seed(seed, hash_label(label));
}

template <typename... Keys>
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k0, std::uint64_t k1,
                                    Keys... rest) noexcept {
  return derive_seed(derive_seed(seed, k0), k1, rest...);
}

/// The independent random streams of one run, all derived from the run seed.
struct RunStreams {
  Rng environment;
  Rng observation;
  Rng agent;
  std::uint64_t planning_seed;

  explicit RunStreams(std::uint64_t run_seed)
      : environment(derive_seed(run_seed, "environment")),
        observation(derive_seed(run_seed, "observation")),
        agent(derive_seed(run_seed, "agent")),
        planning_seed(derive_seed(run_seed, "planning")) {}
};

inline double sample_normal(Rng& rng, double mean, double stddev) {
  if (stddev <= 0.0) return mean;
  std::normal_distribution<double> dist(mean, stddev);
  return dist(rng);
}

inline double sample_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool happens(Rng& rng, double probability) {
  if (probability <= 0.0) return false;
  if (probability >= 1.0) return true;
  return sample_uniform(rng) < probability;
}

inline int sample_int(Rng& rng, int lo, int hi) {
  if (lo >= hi) return lo;
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace shortsim
