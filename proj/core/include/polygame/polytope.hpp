#pragma once

#include <polygame/errors.hpp>
#include <polygame/rational.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace polygame {

enum class Rel { Le, Eq, Ge };

std::string rel_to_string(Rel rel);
Rel rel_from_string(const std::string& text);

/// One row of a linear system over distribution weights:
///   sum_s coeffs[s] * mu(s)  rel  bound.
/// Coefficient keys must be members of the polytope's support.
struct LinearConstraint {
  std::map<std::string, Rational> coeffs;
  Rel rel = Rel::Le;
  Rational bound = Rational(0);
};

/// The extreme points of a distribution polytope, each a probability vector
/// over the owning polytope's support. Kept in lexicographic order over the
/// coordinate vectors, without duplicates; every entry is exact.
struct VertexSet {
  std::vector<std::vector<Rational>> vertices;

  std::size_t size() const { return vertices.size(); }
  bool operator==(const VertexSet& other) const { return vertices == other.vertices; }
};

/// A simplex drawn from a VertexSet: affinely independent vertices, stored
/// both as indices into the source set and as coordinate rows.
struct Simplex {
  std::vector<std::size_t> indices;
  std::vector<std::vector<Rational>> vertices;
};

/// Unique convex weights of a point relative to a simplex; aligned with the
/// simplex vertex order. Weights sum to 1 and reconstruct the point exactly.
struct BarycentricCoords {
  std::vector<Rational> weights;
};

/// An H-representation polytope intersected with the probability simplex over
/// an ordered support set. Only user rows are stored; the simplex rows
/// (sum mu = 1, mu >= 0) are implicit. Construction verifies feasibility
/// exactly and caches the vertex set.
///
/// Vertex enumeration tests basic feasible solutions over subsets of active
/// constraints, so its cost grows with C(#rows, dim); supports beyond
/// dimension ~10 are not practical.
class DistPolytope {
 public:
  /// Throws Error("UnknownState") if a constraint references a state outside
  /// the support and Error("EmptyPolytope") if the feasible set is empty.
  DistPolytope(std::vector<std::string> support, std::vector<LinearConstraint> constraints);

  const std::vector<std::string>& support() const { return support_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const VertexSet& vertices() const { return vertices_; }

  /// Exact membership test; `point` is over the same support, same order.
  bool contains(const std::vector<Rational>& point) const;

  /// True when the feasible set is a single point.
  bool is_point() const { return vertices_.size() == 1; }

 private:
  std::vector<std::string> support_;
  std::vector<LinearConstraint> constraints_;
  VertexSet vertices_;
};

/// Builds the polytope; identical to the constructor, provided as the
/// operation-style entry point.
DistPolytope build_dist_polytope(std::vector<std::string> support,
                                 std::vector<LinearConstraint> constraints);

/// The polytope containing exactly the Dirac distribution on `state`.
DistPolytope dirac_polytope(const std::string& state);

/// Extreme points in canonical (lexicographic) order, exact arithmetic.
const VertexSet& enumerate_vertices(const DistPolytope& poly);

/// Vertex-preserving triangulation: returned simplices have pairwise disjoint
/// relative interiors, their union equals the polytope, and the union of
/// their vertex sets equals `verts` exactly. Deterministic lexicographic
/// placing order. `verts` must be the polytope's vertex set.
std::vector<Simplex> triangulate(const DistPolytope& poly, const VertexSet& verts);

/// Unique convex weights of `point` in `simplex`; throws
/// Error("NotInSimplex") when the point lies outside.
BarycentricCoords barycentric(const Simplex& simplex, const std::vector<Rational>& point);

/// Exact membership test, operation-style entry point.
bool contains(const DistPolytope& poly, const std::vector<Rational>& point);

}  // namespace polygame
