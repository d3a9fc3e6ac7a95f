#pragma once

#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <vector>

#include "sfcdd/partition.hpp"
#include "sfcdd/sparse.hpp"

namespace sfcdd {

// Agglomeration coarse space: q piecewise-constant basis functions per
// subdomain, supported on consecutive chunks of the non-overlapping blocks.
// The coarse matrix is the Galerkin product A0 = R0 A R0^T, factorized once.
struct CoarseSpace {
  int q = 0;
  int64_t N0 = 0;
  SparseMatrix R0;
  std::vector<int32_t> agg_of_pos;  // global position -> coarse row
  SparseMatrix A0;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt;

  Vector apply_R0(const Vector& x) const;
  Vector apply_R0T(const Vector& y) const;
  Vector coarse_solve(const Vector& y) const;
  // F = R0^T A0^{-1} R0: one coarse solve per call
  Vector apply_F(const Vector& r) const;
};

// Indicator restriction per the agglomerate-size rule: subdomain i of size
// S contributes q rows; the first S mod q of them hold floor(S/q)+1
// positions, the rest floor(S/q).
SparseMatrix build_restriction(const Partition& part, int q);

// Sparse Galerkin triple product for arbitrary R0.
SparseMatrix galerkin_coarse(const SparseMatrix& A, const SparseMatrix& R0);

CoarseSpace build_coarse_space(const Partition& part, int q,
                               const SparseMatrix& A);

// Matrix-free balancing operators F = R0^T A0^{-1} R0 and G = I - A F;
// G^T = I - F A because A and F are symmetric.
struct BalancingOperators {
  const SparseMatrix* A = nullptr;
  const CoarseSpace* cs = nullptr;

  Vector apply_F(const Vector& r) const { return cs->apply_F(r); }
  Vector apply_G(const Vector& r) const { return r - (*A) * cs->apply_F(r); }
  Vector apply_GT(const Vector& r) const { return r - cs->apply_F((*A) * r); }
};

}  // namespace sfcdd
