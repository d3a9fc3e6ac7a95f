#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "sfcdd/errors.hpp"

namespace sfcdd {

using Vector = Eigen::VectorXd;

struct Triplet {
  int32_t r;
  int32_t c;
  double v;
};

// Compressed-row sparse matrix. Column indices are strictly increasing within
// each row; duplicate triplets are summed during construction.
class SparseMatrix {
 public:
  int64_t rows = 0;
  int64_t cols = 0;
  std::vector<int64_t> row_ptr;  // size rows+1
  std::vector<int32_t> col;
  std::vector<double> val;
  bool symmetric = false;

  SparseMatrix() = default;

  static SparseMatrix from_triplets(int64_t rows, int64_t cols,
                                    std::vector<Triplet> t,
                                    bool symmetric = false);

  // Adopts pre-built CSR arrays after validating the layout invariants.
  static SparseMatrix from_csr(int64_t rows, int64_t cols,
                               std::vector<int64_t> row_ptr,
                               std::vector<int32_t> col,
                               std::vector<double> val,
                               bool symmetric = false);

  int64_t nnz() const { return static_cast<int64_t>(val.size()); }

  void multiply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;

  // y += alpha * A^T x, using the CSR layout directly
  void add_transpose_multiply(const Vector& x, Vector& y,
                              double alpha = 1.0) const;

  double at(int64_t r, int64_t c) const;

  Eigen::MatrixXd to_dense() const;
  Eigen::SparseMatrix<double> to_eigen() const;
};

}  // namespace sfcdd
