#pragma once

#include <Eigen/SparseCholesky>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sfcdd/coarse.hpp"
#include "sfcdd/partition.hpp"
#include "sfcdd/sparse.hpp"

namespace sfcdd {

// Restriction of A to one overlap window, rows and columns relabeled
// 0..N_i-1 in window order, factorized once at setup.
struct SubdomainSolver {
  int id = 0;
  int64_t win_a = 0;
  int64_t win_len = 0;
  Eigen::SparseMatrix<double> Ai;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>> llt;

  Vector solve(const Vector& local_r) const { return llt->solve(local_r); }
};

SubdomainSolver build_subdomain_solver(const SparseMatrix& A,
                                       const Partition& part, int i);

enum class Variant {
  PlainOneLevel,
  PlainTwoLevel,
  Balanced,
  Nicolaides,
  Deflated
};

enum class Weighting { None, Omega, D };

struct PreconditionerSpec {
  Variant variant = Variant::PlainTwoLevel;
  Weighting weighting = Weighting::None;
  int q = 1;  // coarse dof per subdomain; Nicolaides always uses one
};

// Additive Schwarz preconditioner family. An application runs the coarse
// correction first and the fine corrections in ascending subdomain order,
// so results are bitwise reproducible. Fine contributions can be masked
// out per subdomain (failed processors contribute zero for that cycle).
class SchwarzPreconditioner {
 public:
  static SchwarzPreconditioner build(const SparseMatrix& A,
                                     const Partition& part,
                                     const PreconditionerSpec& spec);

  Vector apply(const Vector& r,
               const std::vector<uint8_t>* alive = nullptr) const;

  // Weighted partial application for randomized-update iterations:
  // z = sum over ids of xi * w_id * (contribution of id), where id 0 is the
  // coarse term with weight one and id i >= 1 is fine subdomain i-1 with
  // weight omega_i.
  Vector apply_subset(const Vector& r, const std::vector<int>& ids,
                      double xi) const;

  // contribution of one fine subdomain including its weighting
  Vector fine_contribution(int i, const Vector& r) const;

  bool symmetric() const;
  const PreconditionerSpec& spec() const { return spec_; }
  const Partition& partition() const { return part_; }
  const OverlapWeights& weights() const { return w_; }
  const CoarseSpace* coarse() const {
    return cs_.has_value() ? &*cs_ : nullptr;
  }
  const SubdomainSolver& subdomain(int i) const { return subs_[i]; }
  const SparseMatrix& matrix() const { return *A_; }

 private:
  const SparseMatrix* A_ = nullptr;
  Partition part_;
  OverlapWeights w_;
  PreconditionerSpec spec_;
  std::vector<SubdomainSolver> subs_;
  std::optional<CoarseSpace> cs_;
  bool uniform_counts_ = false;

  Vector one_level(const Vector& r, const std::vector<uint8_t>* alive) const;
  Vector apply_F(const Vector& r) const;
};

}  // namespace sfcdd
