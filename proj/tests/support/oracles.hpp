#pragma once

// Independent test oracles. Everything here recomputes results through a
// different route than the library: Laplace/Cramer instead of Gaussian
// elimination, exhaustive strategy-pair enumeration instead of fixpoints,
// exhaustive path sums instead of linear systems.

#include <polygame/extreme.hpp>
#include <polygame/polytope.hpp>
#include <polygame/solver.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace oracles {

using polygame::DistPolytope;
using polygame::ExtremeGame;
using polygame::LinearConstraint;
using polygame::Player;
using polygame::Rational;
using polygame::Rel;
using polygame::Strategy;

// ---------------------------------------------------------------------------
// Vertex enumeration oracle: every size-n subset of the full row list (user
// rows, nonnegativity, the sum row) is solved as an equality system by
// Cramer's rule with Laplace-expansion determinants.

inline Rational laplace_det(const std::vector<std::vector<Rational>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return Rational(1);
  if (n == 1) return m[0][0];
  Rational det(0);
  int sign = 1;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] != 0) {
      std::vector<std::vector<Rational>> minor(n - 1, std::vector<Rational>(n - 1));
      for (std::size_t i = 1; i < n; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < n; ++j) {
          if (j != c) minor[i - 1][k++] = m[i][j];
        }
      }
      det += sign * m[0][c] * laplace_det(minor);
    }
    sign = -sign;
  }
  return det;
}

inline std::vector<std::vector<Rational>> vertex_oracle(const DistPolytope& poly) {
  const auto& support = poly.support();
  const std::size_t n = support.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(support[i], i);

  struct Row {
    std::vector<Rational> a;
    Rational b;
    Rel rel;
  };
  std::vector<Row> rows;
  rows.push_back({std::vector<Rational>(n, Rational(1)), Rational(1), Rel::Eq});  // sum
  for (const auto& c : poly.constraints()) {
    Row row{std::vector<Rational>(n, Rational(0)), c.bound, c.rel};
    for (const auto& [s, v] : c.coeffs) row.a[index.at(s)] = v;
    rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < n; ++i) {
    Row row{std::vector<Rational>(n, Rational(0)), Rational(0), Rel::Ge};
    row.a[i] = Rational(1);
    rows.push_back(std::move(row));
  }

  auto feasible = [&](const std::vector<Rational>& x) {
    for (const auto& row : rows) {
      Rational acc(0);
      for (std::size_t i = 0; i < n; ++i) acc += row.a[i] * x[i];
      if (row.rel == Rel::Eq && acc != row.b) return false;
      if (row.rel == Rel::Le && acc > row.b) return false;
      if (row.rel == Rel::Ge && acc < row.b) return false;
    }
    return true;
  };

  std::vector<std::vector<Rational>> found;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == n) {
      std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
      for (std::size_t r = 0; r < n; ++r) a[r] = rows[pick[r]].a;
      const Rational det = laplace_det(a);
      if (det == 0) return;
      std::vector<Rational> x(n);
      for (std::size_t col = 0; col < n; ++col) {
        auto ac = a;
        for (std::size_t r = 0; r < n; ++r) ac[r][col] = rows[pick[r]].b;
        x[col] = laplace_det(ac) / det;
      }
      if (feasible(x)) found.push_back(std::move(x));
      return;
    }
    for (std::size_t i = start; i < rows.size(); ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);

  std::sort(found.begin(), found.end(), polygame::lex_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return found;
}

// v in conv(points)? Encoded as feasibility of the convex-combination system,
// which is itself a DistPolytope over pseudo-states.
inline bool in_convex_hull(const std::vector<Rational>& v,
                           const std::vector<std::vector<Rational>>& points) {
  if (points.empty()) return false;
  std::vector<std::string> pseudo;
  for (std::size_t i = 0; i < points.size(); ++i) pseudo.push_back("w" + std::to_string(i));
  std::vector<LinearConstraint> rows;
  for (std::size_t c = 0; c < v.size(); ++c) {
    LinearConstraint row;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i][c] != 0) row.coeffs[pseudo[i]] = points[i][c];
    }
    row.rel = Rel::Eq;
    row.bound = v[c];
    rows.push_back(std::move(row));
  }
  try {
    DistPolytope probe(pseudo, rows);
    return true;
  } catch (const polygame::Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Strategy-pair enumeration utilities

inline std::vector<Strategy> all_strategies(const ExtremeGame& game, Player player) {
  std::vector<std::size_t> states;
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    if (game.owner[s] == player) states.push_back(s);
  }
  std::vector<Strategy> out;
  Strategy cur;
  for (std::size_t s : states) cur.choice[s] = 0;
  while (true) {
    out.push_back(cur);
    std::size_t i = 0;
    for (; i < states.size(); ++i) {
      const std::size_t s = states[i];
      if (cur.choice[s] + 1 < game.actions[s].size()) {
        cur.choice[s] += 1;
        for (std::size_t j = 0; j < i; ++j) cur.choice[states[j]] = 0;
        break;
      }
    }
    if (i == states.size()) break;
  }
  return out;
}

// Chain successor sets under a fixed pair.
inline std::vector<std::vector<std::size_t>> chain_edges(const ExtremeGame& game,
                                                         const Strategy& box,
                                                         const Strategy& diamond) {
  std::vector<std::vector<std::size_t>> edges(game.num_states());
  for (std::size_t s = 0; s < game.num_states(); ++s) {
    const Strategy& strat = game.owner[s] == Player::Box ? box : diamond;
    for (const auto& [t, p] : game.actions[s][strat.at(s)].dist) {
      (void)p;
      edges[s].push_back(t);
    }
  }
  return edges;
}

// A fixed pair reaches T almost surely iff no nonempty set of non-terminal
// states is closed under the chain.
inline bool pair_reaches_terminals(const ExtremeGame& game, const Strategy& box,
                                   const Strategy& diamond) {
  const auto edges = chain_edges(game, box, diamond);
  std::vector<bool> in(game.num_states());
  for (std::size_t s = 0; s < game.num_states(); ++s) in[s] = !game.terminal[s];
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < game.num_states(); ++s) {
      if (!in[s]) continue;
      for (std::size_t t : edges[s]) {
        if (!in[t]) {
          in[s] = false;
          changed = true;
          break;
        }
      }
    }
  }
  return std::none_of(in.begin(), in.end(), [](bool b) { return b; });
}

inline bool stopping_by_enumeration(const ExtremeGame& game) {
  for (const auto& box : all_strategies(game, Player::Box)) {
    for (const auto& diamond : all_strategies(game, Player::Diamond)) {
      if (!pair_reaches_terminals(game, box, diamond)) return false;
    }
  }
  return true;
}

inline bool pair_strongly_connected(const ExtremeGame& game, const Strategy& box,
                                    const Strategy& diamond) {
  const auto edges = chain_edges(game, box, diamond);
  const std::size_t n = game.num_states();
  for (std::size_t from = 0; from < n; ++from) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      const std::size_t s = stack.back();
      stack.pop_back();
      for (std::size_t t : edges[s]) {
        if (!seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    if (std::any_of(seen.begin(), seen.end(), [](bool b) { return !b; })) return false;
  }
  return true;
}

inline bool irreducible_by_enumeration(const ExtremeGame& game) {
  for (const auto& box : all_strategies(game, Player::Box)) {
    for (const auto& diamond : all_strategies(game, Player::Diamond)) {
      if (!pair_strongly_connected(game, box, diamond)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Exhaustive path-sum check of the reward-via-reachability identity:
//   sum_{paths of length n+1} P(path) * sum_i f(i,n) r(path_i)
//     == sum_{i<=n} sum_{s'} P(state s' at step i) * f(i,n) * r(s')
// for f(i,n) in {1, gamma^i, 1/(n+1)}. Returns the largest absolute gap over
// the three shapes and all horizons up to max_n.

inline double lemma1_max_gap(const ExtremeGame& game, const Strategy& box,
                             const Strategy& diamond, std::size_t max_n, double gamma) {
  const std::size_t n_states = game.num_states();
  std::vector<const std::vector<std::pair<std::size_t, double>>*> rows(n_states);
  for (std::size_t s = 0; s < n_states; ++s) {
    const Strategy& strat = game.owner[s] == Player::Box ? box : diamond;
    rows[s] = &game.actions[s][strat.at(s)].dist_f;
  }

  double worst = 0.0;
  for (std::size_t n = 0; n <= max_n; ++n) {
    double lhs_total = 0.0, lhs_disc = 0.0;

    // Depth-first over all positive-probability paths of length n+1.
    std::function<void(std::size_t, std::size_t, double, double, double)> rec =
        [&](std::size_t s, std::size_t depth, double prob, double sum_r, double sum_gr) {
          sum_r += game.reward_f[s];
          sum_gr += std::pow(gamma, static_cast<double>(depth)) * game.reward_f[s];
          if (depth == n) {
            lhs_total += prob * sum_r;
            lhs_disc += prob * sum_gr;
            return;
          }
          for (const auto& [t, p] : *rows[s]) rec(t, depth + 1, prob * p, sum_r, sum_gr);
        };
    rec(game.initial, 0, 1.0, 0.0, 0.0);

    // Step distributions d_i for the right-hand side.
    std::vector<double> d(n_states, 0.0);
    d[game.initial] = 1.0;
    double rhs_total = 0.0, rhs_disc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t s = 0; s < n_states; ++s) {
        rhs_total += d[s] * game.reward_f[s];
        rhs_disc += d[s] * std::pow(gamma, static_cast<double>(i)) * game.reward_f[s];
      }
      if (i == n) break;
      std::vector<double> next(n_states, 0.0);
      for (std::size_t s = 0; s < n_states; ++s) {
        if (d[s] == 0.0) continue;
        for (const auto& [t, p] : *rows[s]) next[t] += d[s] * p;
      }
      d = std::move(next);
    }

    const double scale = 1.0 / static_cast<double>(n + 1);
    worst = std::max(worst, std::abs(lhs_total - rhs_total));
    worst = std::max(worst, std::abs(lhs_disc - rhs_disc));
    worst = std::max(worst, std::abs(lhs_total * scale - rhs_total * scale));
  }
  return worst;
}

}  // namespace oracles
