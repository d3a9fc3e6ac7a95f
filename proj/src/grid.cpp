#include "sfcdd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace sfcdd {

namespace {

constexpr int64_t kMaxDof = 100'000'000;

}  // namespace

GridSpec GridSpec::from_levels(const std::vector<int>& levels) {
  if (levels.empty()) throw InvalidInput("empty level vector");
  GridSpec s;
  s.d = static_cast<int>(levels.size());
  s.levels = levels;
  s.N = 1;
  for (int l : levels) {
    if (l < 1 || l > 31) throw InvalidInput("level out of range");
    int64_t n = (int64_t{1} << l) - 1;
    s.n.push_back(n);
    s.h.push_back(std::ldexp(1.0, -l));
    if (s.N > kMaxDof / std::max<int64_t>(n, 1))
      throw ResourceLimit("grid exceeds degree-of-freedom budget");
    s.N *= n;
  }
  return s;
}

GridSpec GridSpec::line(int64_t n_points) {
  if (n_points < 1) throw InvalidInput("line grid needs at least one point");
  if (n_points > kMaxDof)
    throw ResourceLimit("grid exceeds degree-of-freedom budget");
  GridSpec s;
  s.d = 1;
  s.n = {n_points};
  s.h = {1.0 / static_cast<double>(n_points + 1)};
  s.N = n_points;
  return s;
}

GridIndex SfcGrid::index_at(int64_t i) const {
  GridIndex g;
  g.coords.assign(coords.begin() + i * spec.d,
                  coords.begin() + (i + 1) * spec.d);
  return g;
}

SfcGrid build_sfc_grid(const GridSpec& spec) {
  SfcGrid grid;
  grid.spec = spec;
  grid.coords.reserve(static_cast<size_t>(spec.N) * spec.d);

  // Row-major enumeration, last dimension fastest. For a chain (at most one
  // dimension with more than one point) this already is the curve order.
  std::vector<uint32_t> cur(spec.d, 1);
  for (int64_t i = 0; i < spec.N; ++i) {
    grid.coords.insert(grid.coords.end(), cur.begin(), cur.end());
    for (int j = spec.d - 1; j >= 0; --j) {
      if (++cur[j] <= static_cast<uint32_t>(spec.n[j])) break;
      cur[j] = 1;
    }
  }

  int wide = 0;
  for (int j = 0; j < spec.d; ++j)
    if (spec.n[j] > 1) ++wide;
  if (wide > 1) {
    sfc_sort_flat(grid.coords, SfcOrdering::hilbert(spec.levels));
  }
  return grid;
}

SparseMatrix assemble_diffusion(const SfcGrid& grid,
                                const std::vector<double>& alpha) {
  const GridSpec& spec = grid.spec;
  if (static_cast<int>(alpha.size()) != spec.d)
    throw InvalidInput("coefficient count does not match dimension");
  const int d = spec.d;
  const int64_t N = spec.N;

  // strides of the row-major rank, last dimension fastest
  std::vector<int64_t> stride(d);
  stride[d - 1] = 1;
  for (int j = d - 2; j >= 0; --j) stride[j] = stride[j + 1] * spec.n[j + 1];

  auto rank_of = [&](const uint32_t* c) {
    int64_t r = 0;
    for (int j = 0; j < d; ++j)
      r += (static_cast<int64_t>(c[j]) - 1) * stride[j];
    return r;
  };

  std::vector<int32_t> pos_of_rank(static_cast<size_t>(N));
  for (int64_t i = 0; i < N; ++i)
    pos_of_rank[rank_of(grid.coords.data() + i * d)] =
        static_cast<int32_t>(i);

  std::vector<double> inv_h2(d);
  double diag = 0.0;
  for (int j = 0; j < d; ++j) {
    if (alpha[j] <= 0.0) throw InvalidInput("nonpositive diffusion coefficient");
    inv_h2[j] = 1.0 / (spec.h[j] * spec.h[j]);
    diag += 2.0 * alpha[j] * inv_h2[j];
  }

  std::vector<int64_t> row_ptr(static_cast<size_t>(N) + 1, 0);
  std::vector<int32_t> cols;
  std::vector<double> vals;
  cols.reserve(static_cast<size_t>(N) * (2 * d + 1));
  vals.reserve(static_cast<size_t>(N) * (2 * d + 1));

  std::vector<std::pair<int32_t, double>> row;
  row.reserve(2 * d + 1);
  for (int64_t i = 0; i < N; ++i) {
    const uint32_t* c = grid.coords.data() + i * d;
    int64_t r = rank_of(c);
    row.clear();
    row.emplace_back(static_cast<int32_t>(i), diag);
    for (int j = 0; j < d; ++j) {
      if (c[j] > 1)
        row.emplace_back(pos_of_rank[r - stride[j]], -alpha[j] * inv_h2[j]);
      if (static_cast<int64_t>(c[j]) < spec.n[j])
        row.emplace_back(pos_of_rank[r + stride[j]], -alpha[j] * inv_h2[j]);
    }
    std::sort(row.begin(), row.end());
    for (const auto& [cc, vv] : row) {
      cols.push_back(cc);
      vals.push_back(vv);
    }
    row_ptr[i + 1] = static_cast<int64_t>(cols.size());
  }
  return SparseMatrix::from_csr(N, N, std::move(row_ptr), std::move(cols),
                                std::move(vals), true);
}

SparseMatrix assemble_laplace(const SfcGrid& grid) {
  return assemble_diffusion(grid, std::vector<double>(grid.spec.d, 1.0));
}

SparseMatrix assemble_laplace(const GridSpec& spec) {
  return assemble_laplace(build_sfc_grid(spec));
}

Vector TransformedSystem::untransform(const Vector& xhat) const {
  return t.cwiseProduct(xhat);
}

TransformedSystem diagonal_transform(const SparseMatrix& A, const Vector& b) {
  if (A.rows != A.cols) throw InvalidMatrix("matrix not square");
  if (b.size() != A.rows) throw InvalidInput("right-hand side size mismatch");
  const int64_t n = A.rows;

  TransformedSystem out;
  out.t.resize(n);
  for (int64_t i = 0; i < n; ++i) {
    double a = A.at(i, i);
    if (!(a > 0.0)) throw InvalidMatrix("nonpositive diagonal entry");
    out.t[i] = 1.0 / std::sqrt(a);
  }

  std::vector<int64_t> row_ptr = A.row_ptr;
  std::vector<int32_t> cols = A.col;
  std::vector<double> vals(A.val.size());
  for (int64_t r = 0; r < n; ++r) {
    for (int64_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      int32_t c = A.col[k];
      // t_r * t_c is commutative, so symmetry of A carries over exactly;
      // the diagonal is pinned to 1 rather than rounded toward it.
      vals[k] = (r == c) ? 1.0 : A.val[k] * (out.t[r] * out.t[c]);
    }
  }
  out.Ahat = SparseMatrix::from_csr(n, n, std::move(row_ptr), std::move(cols),
                                    std::move(vals), A.symmetric);
  out.bhat = out.t.cwiseProduct(b);
  return out;
}

double energy_norm(const SparseMatrix& A, const Vector& x) {
  if (x.size() != A.cols || A.rows != A.cols)
    throw InvalidInput("energy norm dimension mismatch");
  double q = x.dot(A * x);
  return std::sqrt(std::max(q, 0.0));
}

void write_matrix_market(const SparseMatrix& A, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real "
      << (A.symmetric ? "symmetric" : "general") << "\n";
  int64_t count = 0;
  if (A.symmetric) {
    for (int64_t r = 0; r < A.rows; ++r)
      for (int64_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
        if (A.col[k] <= r) ++count;
  } else {
    count = A.nnz();
  }
  out << A.rows << " " << A.cols << " " << count << "\n";
  char buf[64];
  for (int64_t r = 0; r < A.rows; ++r)
    for (int64_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) {
      if (A.symmetric && A.col[k] > r) continue;
      std::snprintf(buf, sizeof buf, "%lld %d %.17g\n",
                    static_cast<long long>(r + 1), A.col[k] + 1, A.val[k]);
      out << buf;
    }
}

}  // namespace sfcdd
