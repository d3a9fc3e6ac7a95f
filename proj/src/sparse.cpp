#include "sfcdd/sparse.hpp"

#include <algorithm>

namespace sfcdd {

SparseMatrix SparseMatrix::from_triplets(int64_t rows, int64_t cols,
                                         std::vector<Triplet> t,
                                         bool symmetric) {
  if (rows < 0 || cols < 0) throw InvalidInput("negative matrix dimension");
  for (const Triplet& e : t) {
    if (e.r < 0 || e.r >= rows || e.c < 0 || e.c >= cols)
      throw InvalidInput("triplet index out of range");
  }
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });

  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.symmetric = symmetric;
  m.row_ptr.assign(static_cast<size_t>(rows) + 1, 0);
  m.col.reserve(t.size());
  m.val.reserve(t.size());

  size_t i = 0;
  for (int64_t r = 0; r < rows; ++r) {
    while (i < t.size() && t[i].r == r) {
      int32_t c = t[i].c;
      double v = 0.0;
      while (i < t.size() && t[i].r == r && t[i].c == c) v += t[i++].v;
      m.col.push_back(c);
      m.val.push_back(v);
    }
    m.row_ptr[static_cast<size_t>(r) + 1] = static_cast<int64_t>(m.col.size());
  }
  return m;
}

SparseMatrix SparseMatrix::from_csr(int64_t rows, int64_t cols,
                                    std::vector<int64_t> row_ptr,
                                    std::vector<int32_t> col,
                                    std::vector<double> val,
                                    bool symmetric) {
  if (rows < 0 || cols < 0) throw InvalidInput("negative matrix dimension");
  if (row_ptr.size() != static_cast<size_t>(rows) + 1 || row_ptr[0] != 0 ||
      row_ptr.back() != static_cast<int64_t>(col.size()) ||
      col.size() != val.size())
    throw InvalidInput("inconsistent CSR arrays");
  for (int64_t r = 0; r < rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw InvalidInput("row_ptr not monotone");
    for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col[k] < 0 || col[k] >= cols)
        throw InvalidInput("column index out of range");
      if (k > row_ptr[r] && col[k] <= col[k - 1])
        throw InvalidInput("column indices not strictly increasing");
    }
  }
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.symmetric = symmetric;
  m.row_ptr = std::move(row_ptr);
  m.col = std::move(col);
  m.val = std::move(val);
  return m;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  if (x.size() != cols) throw InvalidInput("matvec dimension mismatch");
  y.resize(rows);
  for (int64_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      s += val[k] * x[col[k]];
    y[r] = s;
  }
}

Vector SparseMatrix::operator*(const Vector& x) const {
  Vector y;
  multiply(x, y);
  return y;
}

void SparseMatrix::add_transpose_multiply(const Vector& x, Vector& y,
                                          double alpha) const {
  if (x.size() != rows || y.size() != cols)
    throw InvalidInput("transpose matvec dimension mismatch");
  for (int64_t r = 0; r < rows; ++r) {
    double xr = alpha * x[r];
    if (xr == 0.0) continue;
    for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      y[col[k]] += val[k] * xr;
  }
}

double SparseMatrix::at(int64_t r, int64_t c) const {
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw InvalidInput("index out of range");
  const int32_t* lo = col.data() + row_ptr[r];
  const int32_t* hi = col.data() + row_ptr[r + 1];
  const int32_t* p = std::lower_bound(lo, hi, static_cast<int32_t>(c));
  if (p != hi && *p == c) return val[p - col.data()];
  return 0.0;
}

Eigen::MatrixXd SparseMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, cols);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) d(r, col[k]) = val[k];
  return d;
}

Eigen::SparseMatrix<double> SparseMatrix::to_eigen() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(nnz()));
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      t.emplace_back(static_cast<int>(r), static_cast<int>(col[k]), val[k]);
  Eigen::SparseMatrix<double> m(static_cast<int>(rows),
                                static_cast<int>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace sfcdd
