#include "sfcdd/coarse.hpp"

#include <algorithm>

namespace sfcdd {

Vector CoarseSpace::apply_R0(const Vector& x) const {
  Vector y = Vector::Zero(N0);
  for (int64_t j = 0; j < x.size(); ++j) y[agg_of_pos[j]] += x[j];
  return y;
}

Vector CoarseSpace::apply_R0T(const Vector& y) const {
  Vector x(agg_of_pos.size());
  for (size_t j = 0; j < agg_of_pos.size(); ++j) x[j] = y[agg_of_pos[j]];
  return x;
}

Vector CoarseSpace::coarse_solve(const Vector& y) const {
  return llt->solve(y);
}

Vector CoarseSpace::apply_F(const Vector& r) const {
  return apply_R0T(coarse_solve(apply_R0(r)));
}

SparseMatrix build_restriction(const Partition& part, int q) {
  int64_t min_size = *std::min_element(part.tilde_size.begin(),
                                       part.tilde_size.end());
  if (q < 1 || q > min_size)
    throw InvalidConfig("coarse dof per subdomain outside [1, min block]");

  const int64_t N0 = static_cast<int64_t>(q) * part.P;
  std::vector<int64_t> row_ptr(N0 + 1, 0);
  std::vector<int32_t> cols;
  std::vector<double> vals;
  cols.reserve(part.N);
  vals.reserve(part.N);

  for (int i = 0; i < part.P; ++i) {
    int64_t size = part.tilde_size[i];
    int64_t base = size / q;
    int64_t rem = size % q;
    int64_t at = part.tilde_a[i];
    for (int m = 1; m <= q; ++m) {
      int64_t len = base + (m <= rem ? 1 : 0);
      for (int64_t t = 0; t < len; ++t) {
        cols.push_back(static_cast<int32_t>(at + t));
        vals.push_back(1.0);
      }
      at += len;
      row_ptr[static_cast<int64_t>(i) * q + m] =
          static_cast<int64_t>(cols.size());
    }
  }
  return SparseMatrix::from_csr(N0, part.N, std::move(row_ptr),
                                std::move(cols), std::move(vals), false);
}

SparseMatrix galerkin_coarse(const SparseMatrix& A, const SparseMatrix& R0) {
  if (R0.cols != A.rows || A.rows != A.cols)
    throw InvalidInput("Galerkin product dimension mismatch");
  const int64_t N0 = R0.rows;
  const int64_t N = A.rows;

  // CSC view of R0 for the right factor
  std::vector<int64_t> cptr(N + 1, 0);
  for (int64_t k = 0; k < R0.nnz(); ++k) ++cptr[R0.col[k] + 1];
  for (int64_t c = 0; c < N; ++c) cptr[c + 1] += cptr[c];
  std::vector<int32_t> crow(R0.nnz());
  std::vector<double> cval(R0.nnz());
  {
    std::vector<int64_t> fill(cptr.begin(), cptr.end() - 1);
    for (int64_t r = 0; r < N0; ++r)
      for (int64_t k = R0.row_ptr[r]; k < R0.row_ptr[r + 1]; ++k) {
        int64_t slot = fill[R0.col[k]]++;
        crow[slot] = static_cast<int32_t>(r);
        cval[slot] = R0.val[k];
      }
  }

  std::vector<double> fine(N, 0.0);
  std::vector<int64_t> fine_touched;
  std::vector<double> acc(N0, 0.0);
  std::vector<int64_t> acc_touched;
  std::vector<Triplet> t;

  for (int64_t a = 0; a < N0; ++a) {
    fine_touched.clear();
    for (int64_t k = R0.row_ptr[a]; k < R0.row_ptr[a + 1]; ++k) {
      int64_t j = R0.col[k];
      double w = R0.val[k];
      for (int64_t kk = A.row_ptr[j]; kk < A.row_ptr[j + 1]; ++kk) {
        int64_t c = A.col[kk];
        if (fine[c] == 0.0 && A.val[kk] != 0.0) fine_touched.push_back(c);
        fine[c] += w * A.val[kk];
      }
    }
    acc_touched.clear();
    for (int64_t c : fine_touched) {
      double s = fine[c];
      fine[c] = 0.0;
      if (s == 0.0) continue;
      for (int64_t k = cptr[c]; k < cptr[c + 1]; ++k) {
        int64_t b = crow[k];
        if (acc[b] == 0.0) acc_touched.push_back(b);
        acc[b] += cval[k] * s;
      }
    }
    std::sort(acc_touched.begin(), acc_touched.end());
    for (int64_t b : acc_touched) {
      if (acc[b] != 0.0)
        t.push_back({static_cast<int32_t>(a), static_cast<int32_t>(b),
                     acc[b]});
      acc[b] = 0.0;
    }
  }
  return SparseMatrix::from_triplets(N0, N0, std::move(t), A.symmetric);
}

CoarseSpace build_coarse_space(const Partition& part, int q,
                               const SparseMatrix& A) {
  CoarseSpace cs;
  cs.q = q;
  cs.R0 = build_restriction(part, q);
  cs.N0 = cs.R0.rows;
  cs.agg_of_pos.assign(part.N, -1);
  for (int64_t r = 0; r < cs.N0; ++r)
    for (int64_t k = cs.R0.row_ptr[r]; k < cs.R0.row_ptr[r + 1]; ++k)
      cs.agg_of_pos[cs.R0.col[k]] = static_cast<int32_t>(r);
  cs.A0 = galerkin_coarse(A, cs.R0);
  cs.llt = std::make_shared<
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  cs.llt->compute(cs.A0.to_eigen());
  if (cs.llt->info() != Eigen::Success)
    throw InvalidMatrix("coarse matrix factorization failed");
  return cs;
}

}  // namespace sfcdd
