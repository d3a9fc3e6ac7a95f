#include "sfcdd/schwarz.hpp"

#include <algorithm>

#include "sfcdd/errors.hpp"

namespace sfcdd {

SubdomainSolver build_subdomain_solver(const SparseMatrix& A,
                                       const Partition& part, int i) {
  if (i < 0 || i >= part.P) throw InvalidInput("subdomain index out of range");
  if (A.rows != part.N || A.cols != part.N)
    throw InvalidInput("matrix size does not match partition");

  SubdomainSolver s;
  s.id = i;
  s.win_a = part.win_a[i];
  s.win_len = part.win_len[i];

  std::vector<Eigen::Triplet<double>> trips;
  for (int64_t t = 0; t < s.win_len; ++t) {
    const int64_t g = part.global_of_local(i, t);
    for (int64_t k = A.row_ptr[g]; k < A.row_ptr[g + 1]; ++k) {
      const int64_t lc = part.local_of_global(i, A.col[k]);
      if (lc >= 0) trips.emplace_back(static_cast<int>(t),
                                      static_cast<int>(lc), A.val[k]);
    }
  }
  s.Ai.resize(static_cast<int>(s.win_len), static_cast<int>(s.win_len));
  s.Ai.setFromTriplets(trips.begin(), trips.end());
  s.Ai.makeCompressed();

  s.llt = std::make_shared<
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>();
  s.llt->compute(s.Ai);
  if (s.llt->info() != Eigen::Success)
    throw InvalidMatrix("subdomain matrix factorization failed");
  return s;
}

SchwarzPreconditioner SchwarzPreconditioner::build(
    const SparseMatrix& A, const Partition& part,
    const PreconditionerSpec& spec) {
  SchwarzPreconditioner pc;
  pc.A_ = &A;
  pc.part_ = part;
  pc.w_ = compute_weights(part);
  pc.spec_ = spec;

  pc.subs_.reserve(part.P);
  for (int i = 0; i < part.P; ++i)
    pc.subs_.push_back(build_subdomain_solver(A, part, i));

  if (spec.variant != Variant::PlainOneLevel) {
    const int q = spec.variant == Variant::Nicolaides ? 1 : spec.q;
    pc.cs_.emplace(build_coarse_space(part, q, A));
  }

  pc.uniform_counts_ = std::all_of(
      pc.w_.count.begin(), pc.w_.count.end(),
      [&](int32_t c) { return c == pc.w_.count[0]; });
  return pc;
}

Vector SchwarzPreconditioner::fine_contribution(int i, const Vector& r) const {
  const SubdomainSolver& s = subs_[i];
  Vector local(s.win_len);
  for (int64_t t = 0; t < s.win_len; ++t)
    local[t] = r[part_.global_of_local(i, t)];
  Vector sol = s.solve(local);

  Vector z = Vector::Zero(part_.N);
  switch (spec_.weighting) {
    case Weighting::None:
      for (int64_t t = 0; t < s.win_len; ++t)
        z[part_.global_of_local(i, t)] += sol[t];
      break;
    case Weighting::Omega:
      for (int64_t t = 0; t < s.win_len; ++t)
        z[part_.global_of_local(i, t)] += w_.omega[i] * sol[t];
      break;
    case Weighting::D:
      for (int64_t t = 0; t < s.win_len; ++t) {
        const int64_t g = part_.global_of_local(i, t);
        z[g] += sol[t] / static_cast<double>(w_.count[g]);
      }
      break;
  }
  return z;
}

Vector SchwarzPreconditioner::one_level(
    const Vector& r, const std::vector<uint8_t>* alive) const {
  Vector z = Vector::Zero(part_.N);
  for (int i = 0; i < part_.P; ++i) {
    if (alive != nullptr && !(*alive)[i]) continue;
    const SubdomainSolver& s = subs_[i];
    Vector local(s.win_len);
    for (int64_t t = 0; t < s.win_len; ++t)
      local[t] = r[part_.global_of_local(i, t)];
    Vector sol = s.solve(local);
    switch (spec_.weighting) {
      case Weighting::None:
        for (int64_t t = 0; t < s.win_len; ++t)
          z[part_.global_of_local(i, t)] += sol[t];
        break;
      case Weighting::Omega:
        for (int64_t t = 0; t < s.win_len; ++t)
          z[part_.global_of_local(i, t)] += w_.omega[i] * sol[t];
        break;
      case Weighting::D:
        for (int64_t t = 0; t < s.win_len; ++t) {
          const int64_t g = part_.global_of_local(i, t);
          z[g] += sol[t] / static_cast<double>(w_.count[g]);
        }
        break;
    }
  }
  return z;
}

Vector SchwarzPreconditioner::apply_F(const Vector& r) const {
  return cs_->apply_F(r);
}

Vector SchwarzPreconditioner::apply(
    const Vector& r, const std::vector<uint8_t>* alive) const {
  if (r.size() != part_.N) throw InvalidInput("vector size mismatch");
  switch (spec_.variant) {
    case Variant::PlainOneLevel:
      return one_level(r, alive);
    case Variant::PlainTwoLevel:
    case Variant::Nicolaides: {
      Vector z = apply_F(r);
      z += one_level(r, alive);
      return z;
    }
    case Variant::Balanced: {
      Vector t = apply_F(r);
      Vector g = r - (*A_) * t;
      Vector u = one_level(g, alive);
      Vector z = u - apply_F((*A_) * u);
      z += t;
      return z;
    }
    case Variant::Deflated: {
      Vector u = one_level(r, alive);
      Vector z = u - apply_F((*A_) * u - r);
      return z;
    }
  }
  throw InvalidConfig("unknown preconditioner variant");
}

Vector SchwarzPreconditioner::apply_subset(const Vector& r,
                                           const std::vector<int>& ids,
                                           double xi) const {
  if (r.size() != part_.N) throw InvalidInput("vector size mismatch");
  Vector z = Vector::Zero(part_.N);
  for (int id : ids) {
    if (id == 0) {
      if (!cs_.has_value())
        throw InvalidConfig("subset id 0 requires a two-level operator");
      z += xi * apply_F(r);
      continue;
    }
    const int i = id - 1;
    if (i < 0 || i >= part_.P)
      throw InvalidInput("subset id out of range");
    const SubdomainSolver& s = subs_[i];
    Vector local(s.win_len);
    for (int64_t t = 0; t < s.win_len; ++t)
      local[t] = r[part_.global_of_local(i, t)];
    Vector sol = s.solve(local);
    const double scale = xi * w_.omega[i];
    for (int64_t t = 0; t < s.win_len; ++t)
      z[part_.global_of_local(i, t)] += scale * sol[t];
  }
  return z;
}

bool SchwarzPreconditioner::symmetric() const {
  if (spec_.variant == Variant::Deflated) return false;
  if (spec_.weighting == Weighting::D) return uniform_counts_;
  return true;
}

}  // namespace sfcdd
