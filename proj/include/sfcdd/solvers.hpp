#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sfcdd/rng.hpp"
#include "sfcdd/schwarz.hpp"
#include "sfcdd/sparse.hpp"

namespace sfcdd {

struct SpectralEstimate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int iterations = 0;

  double kappa() const { return lambda_max / lambda_min; }
  double optimal_xi() const { return 2.0 / (lambda_min + lambda_max); }
  double optimal_rate() const { return 1.0 - 2.0 / (1.0 + kappa()); }
};

// Preconditioner callback: z = C^{-1} r. Returning false aborts the solve
// with RecoveryFailed (a fault the reconstruction layer could not repair).
using PrecondApply = std::function<bool(const Vector&, Vector&)>;

// Called after every iterate update; the fault layer uses it to mirror the
// global iterate into the per-processor stores.
using IterateHook = std::function<void(const Vector&)>;

PrecondApply plain_apply(const SchwarzPreconditioner& pc);

// Extreme eigenvalues of C^{-1}A via Lanczos in the A-inner product with
// full reorthogonalization. Requires a symmetric positive definite C.
// max_iter = 0 picks min(N, 500). Throws EstimationFailure when the Ritz
// extremes have not stabilized within the cap.
SpectralEstimate estimate_extremes(const SparseMatrix& A,
                                   const PrecondApply& precond, uint64_t seed,
                                   double ritz_tol = 1e-8, int max_iter = 0);

enum class RunStatus { Converged, MaxIter, Diverged, RecoveryFailed };

const char* run_status_name(RunStatus s);

// History of one solve of A x = 0 from a random x0, so the error is the
// iterate itself. error[k] is the A-norm after k preconditioner
// applications; faults is filled by the fault layer, one entry per cycle.
struct ConvergenceRecord {
  RunStatus status = RunStatus::MaxIter;
  int iterations = 0;
  std::vector<double> error;
  std::vector<int> faults;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  double divergence_factor = 10.0;
};

ConvergenceRecord richardson(const SparseMatrix& A, const PrecondApply& precond,
                             double xi, const Vector& x0,
                             const SolveOptions& opts,
                             const IterateHook& hook = {});

ConvergenceRecord pcg(const SparseMatrix& A, const PrecondApply& precond,
                      const Vector& x0, const SolveOptions& opts,
                      bool flexible = false, const IterateHook& hook = {});

// Randomized-update Richardson for expectation studies: each step applies
// xi times the omega-weighted contributions of a random id subset. With
// coarse_always the set is {0} plus a uniform subset_size-subset of the fine
// ids; otherwise it is a uniform subset_size-subset of all P+1 ids.
// Returns squared A-norm errors, entry 0 = initial.
struct SubsetMode {
  bool coarse_always = false;
  int subset_size = 1;
  double xi = 1.0;
};

std::vector<double> richardson_random_subset(const SparseMatrix& A,
                                             const SchwarzPreconditioner& pc,
                                             const Vector& x0, int steps,
                                             const SubsetMode& mode, Rng& rng);

// Entries uniform in [-1,1], rescaled to unit A-norm; redraws on the
// measure-zero event of a zero draw.
Vector random_initial_iterate(const SparseMatrix& A, uint64_t seed);

struct RateSummary {
  double rho_ave = 0.0;
  double rho_asy = 0.0;
  int K = 0;
  int K_tilde = 0;
  bool truncated_tail = false;  // K < K_tilde: tail rate uses what exists
};

RateSummary convergence_rates(const ConvergenceRecord& rec);

// iteration count implied by a mean rate: ceil(log(tol)/log(rho))
int expected_iterations(double rho_ave, double tol = 1e-8);

}  // namespace sfcdd
