#include <polygame/polytope.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "ratlin.hpp"

namespace polygame {

namespace {

// Combined row view of a polytope: equalities (sum row + user Eq rows) and
// inequalities normalized to a.x <= b (user rows + nonnegativity).
struct RowSystem {
  ratlin::Matrix eq;
  ratlin::Row eq_rhs;
  ratlin::Matrix le;
  ratlin::Row le_rhs;
};

RowSystem compile_rows(std::size_t n, const std::vector<std::string>& support,
                       const std::vector<LinearConstraint>& constraints) {
  RowSystem sys;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(support[i], i);

  sys.eq.push_back(ratlin::Row(n, Rational(1)));  // sum mu = 1
  sys.eq_rhs.push_back(Rational(1));

  for (const auto& c : constraints) {
    ratlin::Row row(n, Rational(0));
    for (const auto& [state, coeff] : c.coeffs) {
      auto it = index.find(state);
      if (it == index.end()) {
        throw Error("UnknownState", "constraint references undeclared successor '" + state + "'");
      }
      row[it->second] = coeff;
    }
    switch (c.rel) {
      case Rel::Eq:
        sys.eq.push_back(row);
        sys.eq_rhs.push_back(c.bound);
        break;
      case Rel::Le:
        sys.le.push_back(row);
        sys.le_rhs.push_back(c.bound);
        break;
      case Rel::Ge:
        for (auto& v : row) v = -v;
        sys.le.push_back(std::move(row));
        sys.le_rhs.push_back(-c.bound);
        break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {  // mu(s) >= 0
    ratlin::Row row(n, Rational(0));
    row[i] = Rational(-1);
    sys.le.push_back(std::move(row));
    sys.le_rhs.push_back(Rational(0));
  }
  return sys;
}

bool satisfies(const RowSystem& sys, const ratlin::Row& x) {
  for (std::size_t r = 0; r < sys.eq.size(); ++r) {
    Rational acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += sys.eq[r][j] * x[j];
    if (acc != sys.eq_rhs[r]) return false;
  }
  for (std::size_t r = 0; r < sys.le.size(); ++r) {
    Rational acc = 0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += sys.le[r][j] * x[j];
    if (acc > sys.le_rhs[r]) return false;
  }
  return true;
}

// Basic-feasible-solution enumeration: every vertex is the unique solution of
// the equality rows plus some choice of (n - rank(eq)) active inequality rows.
VertexSet enumerate_impl(std::size_t n, const RowSystem& sys) {
  const std::size_t eq_rank = ratlin::rank(sys.eq);
  {
    // Inconsistent equalities mean an empty feasible set.
    ratlin::Matrix aug = sys.eq;
    for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(sys.eq_rhs[r]);
    if (ratlin::rank(std::move(aug)) != eq_rank) return {};
  }

  const std::size_t free = n - eq_rank;
  const std::size_t m = sys.le.size();
  if (free > m) return {};

  {
    // C(m, free) subset guard; the dimension here is small by contract.
    long double combos = 1;
    for (std::size_t i = 0; i < free; ++i) combos *= static_cast<long double>(m - i) / (i + 1);
    if (combos > 5e6L) {
      throw Error("PolytopeTooComplex",
                  "vertex enumeration would test more than 5e6 constraint subsets");
    }
  }

  std::vector<std::vector<Rational>> found;
  std::vector<std::size_t> pick(free);
  for (std::size_t i = 0; i < free; ++i) pick[i] = i;

  auto advance = [&]() -> bool {
    std::size_t i = free;
    while (i-- > 0) {
      if (pick[i] != i + m - free) {
        ++pick[i];
        for (std::size_t j = i + 1; j < free; ++j) pick[j] = pick[j - 1] + 1;
        return true;
      }
    }
    return false;
  };

  bool more = true;
  while (more) {
    ratlin::Matrix a = sys.eq;
    ratlin::Row b = sys.eq_rhs;
    for (std::size_t i : pick) {
      a.push_back(sys.le[i]);
      b.push_back(sys.le_rhs[i]);
    }
    if (auto x = ratlin::solve_unique(std::move(a), std::move(b))) {
      if (satisfies(sys, *x)) found.push_back(std::move(*x));
    }
    more = advance();
  }

  std::sort(found.begin(), found.end(), lex_less);
  found.erase(std::unique(found.begin(), found.end()), found.end());
  return VertexSet{std::move(found)};
}

}  // namespace

std::string rel_to_string(Rel rel) {
  switch (rel) {
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
  }
  return "<=";
}

Rel rel_from_string(const std::string& text) {
  if (text == "<=") return Rel::Le;
  if (text == "=" || text == "==") return Rel::Eq;
  if (text == ">=") return Rel::Ge;
  throw Error("BadRelation", "unknown constraint relation '" + text + "'");
}

DistPolytope::DistPolytope(std::vector<std::string> support,
                           std::vector<LinearConstraint> constraints)
    : support_(std::move(support)), constraints_(std::move(constraints)) {
  if (support_.empty()) throw Error("EmptyPolytope", "polytope support is empty");
  {
    std::set<std::string> seen;
    for (const auto& s : support_) {
      if (!seen.insert(s).second) {
        throw Error("UnknownState", "duplicate successor '" + s + "' in support");
      }
    }
  }
  auto sys = compile_rows(support_.size(), support_, constraints_);
  vertices_ = enumerate_impl(support_.size(), sys);
  if (vertices_.size() == 0) {
    throw Error("EmptyPolytope", "constraint system has no probability solution");
  }
}

bool DistPolytope::contains(const std::vector<Rational>& point) const {
  if (point.size() != support_.size()) {
    throw Error("BadPoint", "point dimension does not match polytope support");
  }
  auto sys = compile_rows(support_.size(), support_, constraints_);
  return satisfies(sys, point);
}

DistPolytope build_dist_polytope(std::vector<std::string> support,
                                 std::vector<LinearConstraint> constraints) {
  return DistPolytope(std::move(support), std::move(constraints));
}

DistPolytope dirac_polytope(const std::string& state) {
  return DistPolytope({state}, {});
}

const VertexSet& enumerate_vertices(const DistPolytope& poly) { return poly.vertices(); }

bool contains(const DistPolytope& poly, const std::vector<Rational>& point) {
  return poly.contains(point);
}

namespace {

using Coords = std::vector<std::vector<Rational>>;

Rational orient(const Coords& local, const std::vector<std::size_t>& face, std::size_t x) {
  const std::size_t d = local[0].size();
  ratlin::Matrix m;
  m.reserve(d);
  for (std::size_t j = 1; j < face.size(); ++j) {
    ratlin::Row row(d);
    for (std::size_t c = 0; c < d; ++c) row[c] = local[face[j]][c] - local[face[0]][c];
    m.push_back(std::move(row));
  }
  ratlin::Row row(d);
  for (std::size_t c = 0; c < d; ++c) row[c] = local[x][c] - local[face[0]][c];
  m.push_back(std::move(row));
  return ratlin::determinant(std::move(m));
}

std::size_t affine_rank(const Coords& local, const std::vector<std::size_t>& pts) {
  if (pts.size() <= 1) return 0;
  const std::size_t d = local[0].size();
  ratlin::Matrix m;
  for (std::size_t j = 1; j < pts.size(); ++j) {
    ratlin::Row row(d);
    for (std::size_t c = 0; c < d; ++c) row[c] = local[pts[j]][c] - local[pts[0]][c];
    m.push_back(std::move(row));
  }
  return ratlin::rank(std::move(m));
}

}  // namespace

std::vector<Simplex> triangulate(const DistPolytope& poly, const VertexSet& verts) {
  if (verts.vertices != poly.vertices().vertices) {
    throw Error("BadVertexSet", "triangulate requires the polytope's own vertex set");
  }
  const std::size_t k = verts.size();
  const std::size_t n = poly.support().size();

  auto make_simplex = [&](std::vector<std::size_t> idx) {
    std::sort(idx.begin(), idx.end());
    Simplex s;
    s.indices = idx;
    for (std::size_t i : idx) s.vertices.push_back(verts.vertices[i]);
    return s;
  };

  if (k == 1) return {make_simplex({0})};

  // Exact local coordinates: project the affine hull onto its pivot axes.
  ratlin::Matrix diff;
  for (std::size_t i = 1; i < k; ++i) {
    ratlin::Row row(n);
    for (std::size_t c = 0; c < n; ++c) row[c] = verts.vertices[i][c] - verts.vertices[0][c];
    diff.push_back(std::move(row));
  }
  const std::vector<std::size_t> axes = ratlin::pivot_columns(std::move(diff));
  const std::size_t d = axes.size();

  Coords local(k, std::vector<Rational>(d));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      local[i][c] = verts.vertices[i][axes[c]] - verts.vertices[0][axes[c]];
    }
  }

  // Seed simplex: first d+1 affinely independent vertices in canonical order.
  std::vector<std::size_t> seed{0};
  std::vector<bool> in_seed(k, false);
  in_seed[0] = true;
  for (std::size_t i = 1; i < k && seed.size() < d + 1; ++i) {
    seed.push_back(i);
    if (affine_rank(local, seed) == seed.size() - 1) {
      in_seed[i] = true;
    } else {
      seed.pop_back();
    }
  }

  std::vector<std::vector<std::size_t>> cells{seed};

  // Placing: every remaining vertex is an extreme point, hence strictly
  // outside the current hull; cone it over the visible boundary facets.
  for (std::size_t p = 0; p < k; ++p) {
    if (in_seed[p]) continue;

    std::map<std::vector<std::size_t>, std::pair<int, std::size_t>> faces;
    for (const auto& cell : cells) {
      for (std::size_t omit = 0; omit < cell.size(); ++omit) {
        std::vector<std::size_t> face;
        for (std::size_t j = 0; j < cell.size(); ++j) {
          if (j != omit) face.push_back(cell[j]);
        }
        auto [it, inserted] = faces.emplace(std::move(face), std::make_pair(1, cell[omit]));
        if (!inserted) it->second.first += 1;
      }
    }

    std::vector<std::vector<std::size_t>> added;
    for (const auto& [face, info] : faces) {
      if (info.first != 1) continue;  // interior face
      const Rational op = orient(local, face, p);
      if (op == 0) continue;
      const Rational oq = orient(local, face, info.second);
      if ((op > 0) == (oq > 0)) continue;  // p on the inner side
      auto cell = face;
      cell.push_back(p);
      std::sort(cell.begin(), cell.end());
      added.push_back(std::move(cell));
    }
    cells.insert(cells.end(), added.begin(), added.end());
  }

  std::sort(cells.begin(), cells.end());
  std::vector<Simplex> out;
  out.reserve(cells.size());
  for (auto& cell : cells) out.push_back(make_simplex(std::move(cell)));
  return out;
}

BarycentricCoords barycentric(const Simplex& simplex, const std::vector<Rational>& point) {
  const std::size_t k = simplex.vertices.size();
  if (k == 0) throw Error("BadSimplex", "simplex has no vertices");
  const std::size_t n = simplex.vertices[0].size();
  if (point.size() != n) {
    throw Error("BadPoint", "point dimension does not match simplex vertices");
  }

  // Coordinate rows plus the affine row sum(w) = 1; affine independence of
  // the simplex makes the solution unique whenever it exists.
  ratlin::Matrix a(n + 1, ratlin::Row(k));
  ratlin::Row b(n + 1);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < k; ++i) a[c][i] = simplex.vertices[i][c];
    b[c] = point[c];
  }
  for (std::size_t i = 0; i < k; ++i) a[n][i] = Rational(1);
  b[n] = Rational(1);

  auto w = ratlin::solve_unique(std::move(a), std::move(b));
  if (!w) throw Error("NotInSimplex", "point lies outside the simplex's affine hull");
  for (const auto& wi : *w) {
    if (wi < 0) throw Error("NotInSimplex", "point lies outside the simplex");
  }
  return BarycentricCoords{std::move(*w)};
}

}  // namespace polygame
