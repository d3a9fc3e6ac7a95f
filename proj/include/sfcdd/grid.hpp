#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sfcdd/sfc.hpp"
#include "sfcdd/sparse.hpp"

namespace sfcdd {

// Tensor grid of interior points on the unit cube with zero Dirichlet
// boundary. Dyadic grids carry levels l_j (n_j = 2^{l_j}-1, h_j = 2^{-l_j});
// line() builds a 1D grid of arbitrary size for scaling studies, with
// h = 1/(n+1).
struct GridSpec {
  int d = 0;
  std::vector<int> levels;  // empty for non-dyadic line grids
  std::vector<int64_t> n;   // interior points per dimension
  std::vector<double> h;    // mesh widths
  int64_t N = 0;

  static GridSpec from_levels(const std::vector<int>& levels);
  static GridSpec line(int64_t n_points);

  bool dyadic() const { return !levels.empty(); }
};

// Interior points in curve order; coordinates are flattened index-major
// (N * d entries, 1-based). Grids whose interior set varies in at most one
// dimension are chains and keep integer order along the varying axis, like
// the one-dimensional curve.
struct SfcGrid {
  GridSpec spec;
  std::vector<uint32_t> coords;

  GridIndex index_at(int64_t i) const;
};

SfcGrid build_sfc_grid(const GridSpec& spec);

// Second-order central differences for -div(alpha grad u) with a constant
// per-direction coefficient vector alpha, zero Dirichlet data. Rows and
// columns are indexed by curve position, so subdomains get contiguous rows.
SparseMatrix assemble_diffusion(const SfcGrid& grid,
                                const std::vector<double>& alpha);
SparseMatrix assemble_laplace(const SfcGrid& grid);
SparseMatrix assemble_laplace(const GridSpec& spec);

// Symmetrically scaled system: Ahat = T A T with T = diag(A)^{-1/2}, so
// diag(Ahat) is exactly one. Iterates map back via x = T xhat.
struct TransformedSystem {
  SparseMatrix Ahat;
  Vector bhat;
  Vector t;

  Vector untransform(const Vector& xhat) const;
};

TransformedSystem diagonal_transform(const SparseMatrix& A, const Vector& b);

// sqrt(x^T A x); A must be symmetric positive definite for this to be a norm.
double energy_norm(const SparseMatrix& A, const Vector& x);

// Coordinate-format export for debugging.
void write_matrix_market(const SparseMatrix& A, std::ostream& out);

}  // namespace sfcdd
