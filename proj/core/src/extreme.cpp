#include <polygame/extreme.hpp>

#include <polygame/errors.hpp>

#include <algorithm>
#include <map>

namespace polygame {

std::size_t ExtremeGame::state_index(const std::string& name) const {
  auto it = std::find(states.begin(), states.end(), name);
  if (it == states.end()) throw Error("UnknownState", "no state named '" + name + "'");
  return static_cast<std::size_t>(it - states.begin());
}

std::size_t ExtremeGame::total_actions() const {
  std::size_t n = 0;
  for (const auto& a : actions) n += a.size();
  return n;
}

ExtremeGame build_extreme_game(const PSG& game) {
  auto diags = validate(game);
  if (!diags.ok()) {
    const auto& first = diags.errors.front();
    throw Error("InvalidModel",
                "model does not validate: " + first.code + ": " + first.message, first.locus);
  }

  ExtremeGame h;
  h.states = game.states;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < h.states.size(); ++i) index.emplace(h.states[i], i);

  h.owner.reserve(h.states.size());
  h.reward.reserve(h.states.size());
  for (const auto& s : h.states) {
    h.owner.push_back(game.owner.at(s));
    h.reward.push_back(game.reward_of(s));
    h.reward_f.push_back(static_cast<double>(h.reward.back()));
    h.terminal.push_back(game.is_terminal(s));
  }
  h.initial = index.at(game.initial);

  h.actions.resize(h.states.size());
  for (std::size_t si = 0; si < h.states.size(); ++si) {
    const auto& polys = game.theta.at(h.states[si]);
    for (std::size_t ki = 0; ki < polys.size(); ++ki) {
      const auto& support = polys[ki].support();
      const auto& verts = enumerate_vertices(polys[ki]);
      for (std::size_t vi = 0; vi < verts.size(); ++vi) {
        ExtremeAction a;
        a.polytope_index = ki;
        a.vertex_index = vi;
        for (std::size_t c = 0; c < support.size(); ++c) {
          const Rational& p = verts.vertices[vi][c];
          if (p == 0) continue;
          a.dist.emplace_back(index.at(support[c]), p);
        }
        std::sort(a.dist.begin(), a.dist.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [t, p] : a.dist) a.dist_f.emplace_back(t, static_cast<double>(p));
        h.actions[si].push_back(std::move(a));
      }
    }
  }
  return h;
}

namespace {

// Greatest subset of `candidates` in which every state keeps some action
// whose support stays inside the subset; iterative deletion.
std::vector<bool> largest_closed_subset(const ExtremeGame& game, std::vector<bool> in) {
  const std::size_t n = game.num_states();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      if (!in[s]) continue;
      bool has_closed_action = false;
      for (const auto& a : game.actions[s]) {
        bool closed = true;
        for (const auto& [t, p] : a.dist) {
          (void)p;
          if (!in[t]) {
            closed = false;
            break;
          }
        }
        if (closed) {
          has_closed_action = true;
          break;
        }
      }
      if (!has_closed_action) {
        in[s] = false;
        changed = true;
      }
    }
  }
  return in;
}

}  // namespace

bool check_stopping(const ExtremeGame& game) {
  const std::size_t n = game.num_states();
  // Collapse both players into one adversary avoiding T: stopping holds iff
  // no state can commit to a T-free closed set.
  std::vector<bool> in(n);
  for (std::size_t s = 0; s < n; ++s) in[s] = !game.terminal[s];
  in = largest_closed_subset(game, std::move(in));
  return std::none_of(in.begin(), in.end(), [](bool b) { return b; });
}

bool check_irreducible(const ExtremeGame& game) {
  const std::size_t n = game.num_states();
  for (std::size_t target = 0; target < n; ++target) {
    std::vector<bool> in(n, true);
    in[target] = false;
    in = largest_closed_subset(game, std::move(in));
    // Any survivor can avoid `target` forever under some strategy pair.
    if (std::any_of(in.begin(), in.end(), [](bool b) { return b; })) return false;
  }
  return true;
}

}  // namespace polygame
