#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "gcgeo/gaussian.hpp"
#include "gcgeo/rational.hpp"

namespace gcgeo {

// Dense matrix over an exact field, row-major, acting on column vectors.
template <class F>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<F> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, F(0)) {
    if (r < 0 || c < 0) throw std::invalid_argument("negative matrix shape");
  }
  static Mat zero(int r, int c) { return Mat(r, c); }
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = F(1);
    return m;
  }

  F& at(int i, int j) { return a.at(static_cast<std::size_t>(i) * cols + j); }
  const F& at(int i, int j) const { return a.at(static_cast<std::size_t>(i) * cols + j); }

  bool operator==(const Mat&) const = default;

  bool is_zero() const {
    for (const auto& v : a)
      if (!(v == F(0))) return false;
    return true;
  }

  Mat transpose() const {
    Mat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t.at(j, i) = at(i, j);
    return t;
  }

  Mat operator-() const {
    Mat m = *this;
    for (auto& v : m.a) v = -v;
    return m;
  }
  friend Mat operator+(Mat x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw std::invalid_argument("shape mismatch");
    for (std::size_t k = 0; k < x.a.size(); ++k) x.a[k] += y.a[k];
    return x;
  }
  friend Mat operator-(Mat x, const Mat& y) { return x + (-y); }
  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw std::invalid_argument("shape mismatch");
    Mat m(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
      for (int k = 0; k < x.cols; ++k) {
        const F& v = x.at(i, k);
        if (v == F(0)) continue;
        for (int j = 0; j < y.cols; ++j) m.at(i, j) += v * y.at(k, j);
      }
    return m;
  }
  friend Mat operator*(const F& s, Mat x) {
    for (auto& v : x.a) v = s * v;
    return x;
  }

  Mat block(int i0, int j0, int r, int c) const {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m.at(i, j) = at(i0 + i, j0 + j);
    return m;
  }
  void paste(int i0, int j0, const Mat& m) {
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) at(i0 + i, j0 + j) = m.at(i, j);
  }
  Mat col(int j) const { return block(0, j, rows, 1); }
};

using QMat = Mat<Rational>;
using CMat = Mat<GaussianRational>;

template <class F>
Mat<F> hstack(const Mat<F>& x, const Mat<F>& y) {
  if (x.rows != y.rows) throw std::invalid_argument("shape mismatch");
  Mat<F> m(x.rows, x.cols + y.cols);
  m.paste(0, 0, x);
  m.paste(0, x.cols, y);
  return m;
}

template <class F>
Mat<F> vstack(const Mat<F>& x, const Mat<F>& y) {
  if (x.cols != y.cols) throw std::invalid_argument("shape mismatch");
  Mat<F> m(x.rows + y.rows, x.cols);
  m.paste(0, 0, x);
  m.paste(x.rows, 0, y);
  return m;
}

// Reduced row echelon form; returns the pivot columns.
template <class F>
std::vector<int> rref_in_place(Mat<F>& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int p = -1;
    for (int i = row; i < m.rows; ++i)
      if (!(m.at(i, col) == F(0))) {
        p = i;
        break;
      }
    if (p < 0) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(row, j), m.at(p, j));
    F inv = F(1) / m.at(row, col);
    for (int j = col; j < m.cols; ++j) m.at(row, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == row) continue;
      F factor = m.at(i, col);
      if (factor == F(0)) continue;
      for (int j = col; j < m.cols; ++j) m.at(i, j) -= factor * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class F>
int rank(Mat<F> m) {
  return static_cast<int>(rref_in_place(m).size());
}

// Columns form a basis of the null space.
template <class F>
Mat<F> kernel_basis(Mat<F> m) {
  int n = m.cols;
  auto pivots = rref_in_place(m);
  std::vector<int> free_cols;
  {
    std::size_t k = 0;
    for (int j = 0; j < n; ++j) {
      if (k < pivots.size() && pivots[k] == j)
        ++k;
      else
        free_cols.push_back(j);
    }
  }
  Mat<F> basis(n, static_cast<int>(free_cols.size()));
  for (std::size_t b = 0; b < free_cols.size(); ++b) {
    basis.at(free_cols[b], static_cast<int>(b)) = F(1);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      basis.at(pivots[r], static_cast<int>(b)) = -m.at(static_cast<int>(r), free_cols[b]);
  }
  return basis;
}

// Any solution of A x = b (possibly many columns of b at once).
template <class F>
std::optional<Mat<F>> solve(const Mat<F>& A, const Mat<F>& b) {
  if (A.rows != b.rows) throw std::invalid_argument("shape mismatch");
  Mat<F> aug = hstack(A, b);
  auto pivots = rref_in_place(aug);
  // a pivot inside the right-hand block is exactly an inconsistent row
  for (int c : pivots)
    if (c >= A.cols) return std::nullopt;
  Mat<F> x(A.cols, b.cols);
  for (std::size_t r = 0; r < pivots.size(); ++r)
    for (int j = 0; j < b.cols; ++j) x.at(pivots[r], j) = aug.at(static_cast<int>(r), A.cols + j);
  return x;
}

template <class F>
std::optional<Mat<F>> inverse(const Mat<F>& m) {
  if (m.rows != m.cols) throw std::invalid_argument("not square");
  Mat<F> aug = hstack(m, Mat<F>::identity(m.rows));
  auto pivots = rref_in_place(aug);
  // invertible iff the pivots are exactly the left block's columns
  if (static_cast<int>(pivots.size()) != m.rows || (m.rows > 0 && pivots.back() >= m.cols))
    return std::nullopt;
  return aug.block(0, m.cols, m.rows, m.cols);
}

// Column span of x contains column span of y.
template <class F>
bool span_contains(const Mat<F>& x, const Mat<F>& y) {
  return rank(x) == rank(hstack(x, y));
}

template <class F>
bool same_span(const Mat<F>& x, const Mat<F>& y) {
  return span_contains(x, y) && span_contains(y, x);
}

// Independent columns spanning the column space (rows of the reduced transpose).
template <class F>
Mat<F> column_space_basis(const Mat<F>& m) {
  Mat<F> t = m.transpose();
  rref_in_place(t);
  int r = 0;
  for (int i = 0; i < t.rows; ++i) {
    bool nz = false;
    for (int j = 0; j < t.cols; ++j)
      if (!(t.at(i, j) == F(0))) nz = true;
    if (nz) ++r;
  }
  Mat<F> out(m.rows, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < m.rows; ++j) out.at(j, i) = t.at(i, j);
  return out;
}

// Basis of the intersection of two column spans over the same space.
template <class F>
Mat<F> span_intersection(const Mat<F>& x, const Mat<F>& y) {
  if (x.rows != y.rows) throw std::invalid_argument("shape mismatch");
  Mat<F> ker = kernel_basis(hstack(x, -y));
  Mat<F> xpart = ker.block(0, 0, x.cols, ker.cols);
  return column_space_basis(x * xpart);
}

template <class F>
Mat<F> complexify_like(const Mat<Rational>& m, const F&) {
  Mat<F> out(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out.at(i, j) = F(m.at(i, j));
  return out;
}

inline CMat complexify(const QMat& m) { return complexify_like(m, GaussianRational()); }

inline CMat conj(CMat m) {
  for (auto& v : m.a) v = v.conj();
  return m;
}

}  // namespace gcgeo
