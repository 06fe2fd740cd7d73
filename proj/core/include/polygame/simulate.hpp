#pragma once

#include <polygame/solver.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace polygame {

/// SplitMix64 (Steele, Lea & Flood 2014). Fixed here as the repository's
/// simulation generator so that seeded runs are reproducible bit-for-bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) from the top 53 bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Stream derivation: run i draws from SplitMix64 seeded with
  /// mix(seed ^ (i+1) * 0x9E3779B97F4A7C15), making per-run sequences
  /// independent of execution order and thread count.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t run) {
    SplitMix64 g(seed ^ ((run + 1) * 0x9E3779B97F4A7C15ULL));
    return SplitMix64(g.next());
  }

 private:
  std::uint64_t state_;
};

struct SimConfig {
  std::uint64_t runs = 1000;
  std::uint64_t seed = 0;
  std::uint64_t horizon = 10000;
  Objective objective = Objective::total();
};

struct SimReport {
  double mean = 0.0;
  double std_error = 0.0;
  /// False when runs == 1; the standard error is then reported as 0.
  bool std_error_defined = true;
  std::uint64_t runs_completed = 0;
  /// gamma^horizon * r_max / (1 - gamma) for Discounted, 0 otherwise.
  double truncation_bound = 0.0;
};

/// Samples one play under the fixed strategy pair: at most `horizon`
/// transitions, truncated early on terminal absorption (and on goal entry for
/// Reach). Returns the visited states and the objective's payoff. The payoff
/// is the goal-visit indicator (Reach), the reward sum (Total), the
/// discounted reward sum (Discounted), or the post-burn-in window average
/// over the full horizon (Average, burn-in horizon/10).
std::pair<std::vector<std::size_t>, double> sample_path(const ExtremeGame& game,
                                                        const Strategy& box,
                                                        const Strategy& diamond,
                                                        std::uint64_t horizon, SplitMix64& rng,
                                                        const Objective& objective);

/// Monte Carlo estimate over config.runs independent plays. Per-run seeds
/// come from SplitMix64::stream, so the report depends only on the config,
/// not on scheduling; POLYGAME_THREADS caps the worker threads.
SimReport estimate(const ExtremeGame& game, const Strategy& box, const Strategy& diamond,
                   const SimConfig& config);

}  // namespace polygame
