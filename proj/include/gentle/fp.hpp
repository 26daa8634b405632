// Dense linear algebra over a small prime field F_p.
// Matrices here are tiny (tens of rows), so plain Gaussian elimination is fine.
#pragma once

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gentle {

// Arithmetic mod p with p a small prime (p < 2^15 so products fit in int32).
struct PrimeField {
  int p;

  explicit PrimeField(int p_) : p(p_) {
    if (p_ < 2 || p_ >= (1 << 15)) throw std::invalid_argument("field order out of range");
    for (int d = 2; d * d <= p_; ++d)
      if (p_ % d == 0) throw std::invalid_argument("field order must be prime");
  }

  int norm(long long x) const {
    int r = static_cast<int>(x % p);
    return r < 0 ? r + p : r;
  }
  int add(int a, int b) const { return (a + b) % p; }
  int sub(int a, int b) const { return (a - b + p) % p; }
  int mul(int a, int b) const { return static_cast<int>((static_cast<long long>(a) * b) % p); }
  int neg(int a) const { return (p - a) % p; }
  int inv(int a) const {
    // Fermat; p is prime and a != 0.
    if (a % p == 0) throw std::domain_error("inverse of zero");
    int r = 1, base = a % p, e = p - 2;
    while (e) {
      if (e & 1) r = mul(r, base);
      base = mul(base, base);
      e >>= 1;
    }
    return r;
  }
};

// Row-major dense matrix over F_p.
struct FpMat {
  int rows = 0, cols = 0;
  std::vector<int> a;  // rows*cols entries in [0,p)

  FpMat() = default;
  FpMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0) {}

  int& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  int at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

// Reduced row echelon form in place; returns pivot column list (rank = size).
inline std::vector<int> rref(const PrimeField& F, FpMat& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int sel = -1;
    for (int i = r; i < m.rows; ++i)
      if (m.at(i, c) != 0) { sel = i; break; }
    if (sel < 0) continue;
    if (sel != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(sel, j), m.at(r, j));
    int iv = F.inv(m.at(r, c));
    for (int j = c; j < m.cols; ++j) m.at(r, j) = F.mul(m.at(r, j), iv);
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      int f = m.at(i, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) = F.sub(m.at(i, j), F.mul(f, m.at(r, j)));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(const PrimeField& F, FpMat m) { return static_cast<int>(rref(F, m).size()); }

// Basis of the right nullspace {x : m x = 0}, one vector per column.
inline std::vector<std::vector<int>> nullspace(const PrimeField& F, FpMat m) {
  std::vector<int> pivots = rref(F, m);
  std::vector<bool> is_pivot(m.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<int>> basis;
  for (int c = 0; c < m.cols; ++c) {
    if (is_pivot[c]) continue;
    std::vector<int> v(m.cols, 0);
    v[c] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = F.neg(m.at(static_cast<int>(r), c));
    basis.push_back(std::move(v));
  }
  return basis;
}

// Incremental span of row vectors, used for quotient bases and membership tests.
struct Span {
  const PrimeField* F;
  int dim;                            // ambient dimension
  std::vector<std::vector<int>> rows;  // echelonized, leading entries 1
  std::vector<int> lead;               // leading column per row

  Span(const PrimeField& f, int n) : F(&f), dim(n) {}

  int size() const { return static_cast<int>(rows.size()); }

  // Reduce v against the span; returns the residue (zero vector iff v in span).
  std::vector<int> residue(std::vector<int> v) const {
    for (size_t i = 0; i < rows.size(); ++i) {
      int c = lead[i];
      if (v[c] == 0) continue;
      int f = v[c];
      for (int j = 0; j < dim; ++j) v[j] = F->sub(v[j], F->mul(f, rows[i][j]));
    }
    return v;
  }

  // Like residue, but also records the coefficients used against each row.
  std::vector<int> residue_with_coords(std::vector<int> v, std::vector<int>& coords) const {
    coords.assign(rows.size(), 0);
    for (size_t i = 0; i < rows.size(); ++i) {
      int c = lead[i];
      if (v[c] == 0) continue;
      int f = v[c];
      coords[i] = f;
      for (int j = 0; j < dim; ++j) v[j] = F->sub(v[j], F->mul(f, rows[i][j]));
    }
    return v;
  }

  // Insert v; returns true if it enlarged the span.
  bool insert(std::vector<int> v) {
    v = residue(std::move(v));
    int c = 0;
    while (c < dim && v[c] == 0) ++c;
    if (c == dim) return false;
    int iv = F->inv(v[c]);
    for (int j = 0; j < dim; ++j) v[j] = F->mul(v[j], iv);
    // Keep earlier rows reduced against the new one for a clean echelon form.
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      int f = rows[i][c];
      for (int j = 0; j < dim; ++j) rows[i][j] = F->sub(rows[i][j], F->mul(f, v[j]));
    }
    rows.push_back(std::move(v));
    lead.push_back(c);
    // Maintain rows sorted by leading column.
    for (size_t i = rows.size() - 1; i > 0 && lead[i - 1] > lead[i]; --i) {
      std::swap(rows[i - 1], rows[i]);
      std::swap(lead[i - 1], lead[i]);
    }
    return true;
  }

  bool contains(std::vector<int> v) const {
    v = residue(std::move(v));
    for (int x : v)
      if (x != 0) return false;
    return true;
  }
};

}  // namespace gentle
