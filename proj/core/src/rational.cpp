#include <polygame/rational.hpp>

#include <polygame/errors.hpp>

#include <cctype>
#include <cstddef>

#include "ratlin.hpp"

namespace polygame {

namespace {

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  if (s.empty()) throw Error("BadNumber", "empty numeric literal: '" + text + "'");

  Rational value;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error("BadNumber", "malformed fraction: '" + text + "'");
    }
    Rational d{boost::multiprecision::mpz_int(den)};
    if (d == 0) throw Error("BadNumber", "zero denominator: '" + text + "'");
    value = Rational(boost::multiprecision::mpz_int(num)) / d;
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || !all_digits(frac)) {
      throw Error("BadNumber", "malformed decimal: '" + text + "'");
    }
    // Exact decimal: 0.3 -> 3/10, never a binary float.
    Rational scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    value = Rational(boost::multiprecision::mpz_int(whole)) +
            Rational(boost::multiprecision::mpz_int(frac.empty() ? "0" : frac)) / scale;
  } else {
    if (!all_digits(s)) throw Error("BadNumber", "malformed number: '" + text + "'");
    value = Rational(boost::multiprecision::mpz_int(s));
  }
  return negative ? -value : value;
}

std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

bool lex_less(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return a.size() < b.size();
}

namespace ratlin {

namespace {

// Forward elimination in place; returns the pivot (row, col) pairs.
std::vector<std::pair<std::size_t, std::size_t>> eliminate(Matrix& m) {
  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pivot = r;
    while (pivot < rows && m[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[r], m[pivot]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[r][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.emplace_back(r, c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t rank(Matrix m) { return eliminate(m).size(); }

std::vector<std::size_t> pivot_columns(Matrix m) {
  std::vector<std::size_t> cols;
  for (auto [r, c] : eliminate(m)) cols.push_back(c);
  return cols;
}

std::optional<Row> solve_unique(Matrix a, Row b) {
  const std::size_t rows = a.size();
  if (rows != b.size()) return std::nullopt;
  const std::size_t n = rows == 0 ? 0 : a[0].size();
  for (std::size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);

  auto pivots = eliminate(a);
  // Unique solution requires a pivot in every unknown column and none in the
  // augmented column (which would mean 0 = c).
  if (pivots.size() < n) return std::nullopt;
  for (auto [r, c] : pivots) {
    if (c >= n) return std::nullopt;
  }

  Row x(n, Rational(0));
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    auto [r, c] = *it;
    Rational acc = a[r][n];
    for (std::size_t j = c + 1; j < n; ++j) acc -= a[r][j] * x[j];
    x[c] = acc / a[r][c];
  }
  return x;
}

Rational determinant(Matrix m) {
  const std::size_t n = m.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && m[pivot][c] == 0) ++pivot;
    if (pivot == n) return Rational(0);
    if (pivot != c) {
      std::swap(m[c], m[pivot]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

}  // namespace ratlin

}  // namespace polygame
