#pragma once

// Small dense linear algebra over exact rationals. Everything here is sized
// for polytope work in dimension <= ~10; no attempt is made to be fast on
// large systems.

#include <polygame/rational.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace polygame::ratlin {

using Row = std::vector<Rational>;
using Matrix = std::vector<Row>;

/// Row rank via fraction-preserving Gaussian elimination.
std::size_t rank(Matrix m);

/// Solves A x = b for the unique solution of an (m x n) system, m >= n.
/// Returns nullopt when the system is rank-deficient in x or inconsistent.
std::optional<Row> solve_unique(Matrix a, Row b);

/// Determinant of a square matrix.
Rational determinant(Matrix m);

/// Pivot column indices of a matrix (columns where Gaussian elimination
/// places a leading entry), in increasing order.
std::vector<std::size_t> pivot_columns(Matrix m);

}  // namespace polygame::ratlin
