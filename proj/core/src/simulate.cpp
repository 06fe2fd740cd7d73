#include <polygame/simulate.hpp>

#include <polygame/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace polygame {

namespace {

std::size_t worker_threads() {
  if (const char* env = std::getenv("POLYGAME_THREADS")) {
    long v = std::atol(env);
    if (v > 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

std::size_t sample_successor(const ExtremeAction& action, SplitMix64& rng) {
  const double u = rng.u01();
  double acc = 0.0;
  for (const auto& [t, p] : action.dist_f) {
    acc += p;
    if (u < acc) return t;
  }
  return action.dist_f.back().first;  // guards rounding at the top end
}

}  // namespace

std::pair<std::vector<std::size_t>, double> sample_path(const ExtremeGame& game,
                                                        const Strategy& box,
                                                        const Strategy& diamond,
                                                        std::uint64_t horizon, SplitMix64& rng,
                                                        const Objective& objective) {
  if (horizon < 1) throw Error("BadOptions", "horizon must be at least 1");

  std::vector<bool> goal(game.num_states(), false);
  if (objective.kind == Objective::Kind::Reach) {
    for (const auto& name : objective.goal) goal[game.state_index(name)] = true;
  }
  const double gamma =
      objective.kind == Objective::Kind::Discounted ? static_cast<double>(objective.gamma) : 1.0;
  const std::uint64_t burn_in =
      objective.kind == Objective::Kind::Average ? horizon / 10 : 0;

  std::vector<std::size_t> path;
  path.push_back(game.initial);

  double payoff = 0.0;
  double discount = 1.0;
  std::size_t s = game.initial;

  for (std::uint64_t step = 0;; ++step) {
    switch (objective.kind) {
      case Objective::Kind::Reach:
        if (goal[s]) return {std::move(path), 1.0};
        break;
      case Objective::Kind::Total:
        payoff += game.reward_f[s];
        break;
      case Objective::Kind::Discounted:
        payoff += discount * game.reward_f[s];
        discount *= gamma;
        break;
      case Objective::Kind::Average:
        if (step >= burn_in) payoff += game.reward_f[s];
        break;
    }
    if (step == horizon) break;
    if (game.terminal[s]) {
      if (objective.kind == Objective::Kind::Average) {
        // Absorbed plays sit at the terminal (reward 0) for the rest of the
        // window; account for it without walking the self-loop.
        break;
      }
      break;
    }
    const Strategy& strat = game.owner[s] == Player::Box ? box : diamond;
    s = sample_successor(game.actions[s][strat.at(s)], rng);
    path.push_back(s);
  }

  if (objective.kind == Objective::Kind::Average) {
    payoff /= static_cast<double>(horizon + 1 - burn_in);
  }
  return {std::move(path), payoff};
}

SimReport estimate(const ExtremeGame& game, const Strategy& box, const Strategy& diamond,
                   const SimConfig& config) {
  if (config.runs < 1) throw Error("BadOptions", "runs must be at least 1");

  std::vector<double> payoffs(config.runs);
  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      SplitMix64 rng = SplitMix64::stream(config.seed, i);
      payoffs[i] = sample_path(game, box, diamond, config.horizon, rng, config.objective).second;
    }
  };

  const std::size_t threads = std::min<std::size_t>(worker_threads(), config.runs);
  if (threads <= 1) {
    run_range(0, config.runs);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (config.runs + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::uint64_t lo = t * chunk;
      const std::uint64_t hi = std::min<std::uint64_t>(config.runs, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Aggregate strictly in run order so thread count never changes the result.
  double mean = 0.0;
  for (std::uint64_t i = 0; i < config.runs; ++i) mean += payoffs[i];
  mean /= static_cast<double>(config.runs);

  SimReport report;
  report.mean = mean;
  report.runs_completed = config.runs;
  if (config.runs > 1) {
    double ss = 0.0;
    for (std::uint64_t i = 0; i < config.runs; ++i) {
      const double d = payoffs[i] - mean;
      ss += d * d;
    }
    report.std_error =
        std::sqrt(ss / (static_cast<double>(config.runs) * (static_cast<double>(config.runs) - 1.0)));
    report.std_error_defined = true;
  } else {
    report.std_error = 0.0;
    report.std_error_defined = false;
  }
  if (config.objective.kind == Objective::Kind::Discounted) {
    const double gamma = static_cast<double>(config.objective.gamma);
    double rmax = 0.0;
    for (double r : game.reward_f) rmax = std::max(rmax, r);
    report.truncation_bound =
        std::pow(gamma, static_cast<double>(config.horizon)) * rmax / (1.0 - gamma);
  }
  return report;
}

}  // namespace polygame
