#include "sfcdd/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfcdd/errors.hpp"
#include "sfcdd/grid.hpp"

namespace sfcdd {

PrecondApply plain_apply(const SchwarzPreconditioner& pc) {
  return [&pc](const Vector& r, Vector& z) {
    z = pc.apply(r);
    return true;
  };
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIter: return "max-iter";
    case RunStatus::Diverged: return "diverged";
    case RunStatus::RecoveryFailed: return "recovery-failed";
  }
  return "unknown";
}

SpectralEstimate estimate_extremes(const SparseMatrix& A,
                                   const PrecondApply& precond, uint64_t seed,
                                   double ritz_tol, int max_iter) {
  const int64_t N = A.rows;
  if (N < 1) throw InvalidInput("empty operator");
  const int cap = max_iter > 0
                      ? max_iter
                      : static_cast<int>(std::min<int64_t>(N, 500));

  Rng rng(seed);
  Vector v(N);
  for (int64_t i = 0; i < N; ++i) v[i] = rng.uniform_pm1();
  Vector av = A * v;
  double nrm = std::sqrt(std::max(v.dot(av), 0.0));
  if (nrm == 0.0) throw EstimationFailure("start vector has zero energy");
  v /= nrm;
  av /= nrm;

  std::vector<Vector> V{v};
  std::vector<Vector> AV{av};
  std::vector<double> alpha;
  std::vector<double> beta;
  double prev_min = 0.0;
  double prev_max = 0.0;

  for (int j = 0; j < cap; ++j) {
    Vector w;
    if (!precond(AV[j], w))
      throw EstimationFailure("preconditioner application failed");
    alpha.push_back(w.dot(AV[j]));
    w -= alpha[j] * V[j];
    if (j > 0) w -= beta[j - 1] * V[j - 1];
    for (int i = 0; i <= j; ++i) w -= w.dot(AV[i]) * V[i];

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) T(i, i) = alpha[i];
    for (int i = 0; i + 1 <= j; ++i) {
      T(i, i + 1) = beta[i];
      T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(j);

    Vector aw = A * w;
    const double b = std::sqrt(std::max(w.dot(aw), 0.0));
    const bool exhausted = b <= 1e-13 * std::abs(lmax);
    const bool settled =
        j > 0 && std::abs(lmin - prev_min) <= ritz_tol * std::abs(lmin) &&
        std::abs(lmax - prev_max) <= ritz_tol * std::abs(lmax);
    if (exhausted || settled || j + 1 >= N) {
      if (lmin <= 0.0)
        throw EstimationFailure("estimated operator is not positive definite");
      SpectralEstimate est;
      est.lambda_min = lmin;
      est.lambda_max = lmax;
      est.iterations = j + 1;
      return est;
    }
    prev_min = lmin;
    prev_max = lmax;
    beta.push_back(b);
    V.push_back(w / b);
    AV.push_back(aw / b);
  }

  std::ostringstream msg;
  msg << "extreme eigenvalues did not stabilize within " << cap
      << " iterations (partial: lambda_min=" << prev_min
      << ", lambda_max=" << prev_max << ")";
  throw EstimationFailure(msg.str());
}

ConvergenceRecord richardson(const SparseMatrix& A, const PrecondApply& precond,
                             double xi, const Vector& x0,
                             const SolveOptions& opts,
                             const IterateHook& hook) {
  if (x0.size() != A.rows) throw InvalidInput("iterate size mismatch");
  ConvergenceRecord rec;
  Vector x = x0;
  const double e0 = energy_norm(A, x);
  rec.error.push_back(e0);
  if (e0 == 0.0) {
    rec.status = RunStatus::Converged;
    return rec;
  }

  Vector z(A.rows);
  for (int k = 1; k <= opts.max_iter; ++k) {
    Vector r = -(A * x);
    if (!precond(r, z)) {
      rec.status = RunStatus::RecoveryFailed;
      return rec;
    }
    x += xi * z;
    if (hook) hook(x);
    const double e = energy_norm(A, x);
    rec.error.push_back(e);
    rec.iterations = k;
    if (e <= opts.tol * e0) {
      rec.status = RunStatus::Converged;
      return rec;
    }
    if (e >= opts.divergence_factor * e0) {
      rec.status = RunStatus::Diverged;
      return rec;
    }
  }
  rec.status = RunStatus::MaxIter;
  return rec;
}

ConvergenceRecord pcg(const SparseMatrix& A, const PrecondApply& precond,
                      const Vector& x0, const SolveOptions& opts,
                      bool flexible, const IterateHook& hook) {
  if (x0.size() != A.rows) throw InvalidInput("iterate size mismatch");
  ConvergenceRecord rec;
  Vector x = x0;
  const double e0 = energy_norm(A, x);
  rec.error.push_back(e0);
  if (e0 == 0.0) {
    rec.status = RunStatus::Converged;
    return rec;
  }

  Vector r = -(A * x);
  Vector z(A.rows);
  if (!precond(r, z)) {
    rec.status = RunStatus::RecoveryFailed;
    return rec;
  }
  Vector p = z;
  double rz = r.dot(z);

  for (int k = 1; k <= opts.max_iter; ++k) {
    Vector Ap = A * p;
    const double pAp = p.dot(Ap);
    if (pAp <= 0.0)
      throw NumericalBreakdown("nonpositive curvature in conjugate gradient");
    const double a = rz / pAp;
    x += a * p;
    if (hook) hook(x);
    const double e = energy_norm(A, x);
    rec.error.push_back(e);
    rec.iterations = k;
    if (e <= opts.tol * e0) {
      rec.status = RunStatus::Converged;
      return rec;
    }
    if (e >= opts.divergence_factor * e0) {
      rec.status = RunStatus::Diverged;
      return rec;
    }
    Vector rn = r - a * Ap;
    if (!precond(rn, z)) {
      rec.status = RunStatus::RecoveryFailed;
      return rec;
    }
    double beta;
    if (flexible) {
      beta = z.dot(rn - r) / rz;
      rz = rn.dot(z);
    } else {
      const double rzn = rn.dot(z);
      beta = rzn / rz;
      rz = rzn;
    }
    p = z + beta * p;
    r = rn;
  }
  rec.status = RunStatus::MaxIter;
  return rec;
}

std::vector<double> richardson_random_subset(const SparseMatrix& A,
                                             const SchwarzPreconditioner& pc,
                                             const Vector& x0, int steps,
                                             const SubsetMode& mode, Rng& rng) {
  if (x0.size() != A.rows) throw InvalidInput("iterate size mismatch");
  const int P = pc.partition().P;
  if (mode.subset_size < 0 ||
      mode.subset_size > (mode.coarse_always ? P : P + 1))
    throw InvalidConfig("subset size out of range");

  std::vector<double> sq;
  Vector x = x0;
  double e = energy_norm(A, x);
  sq.push_back(e * e);
  std::vector<int> ids;
  for (int k = 0; k < steps; ++k) {
    ids.clear();
    if (mode.coarse_always) {
      ids.push_back(0);
      for (int64_t f : rng.subset(P, mode.subset_size))
        ids.push_back(static_cast<int>(f) + 1);
    } else {
      for (int64_t f : rng.subset(P + 1, mode.subset_size))
        ids.push_back(static_cast<int>(f));
    }
    Vector r = -(A * x);
    x += pc.apply_subset(r, ids, mode.xi);
    e = energy_norm(A, x);
    sq.push_back(e * e);
  }
  return sq;
}

Vector random_initial_iterate(const SparseMatrix& A, uint64_t seed) {
  Rng rng(seed);
  Vector x(A.rows);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int64_t i = 0; i < A.rows; ++i) x[i] = rng.uniform_pm1();
    const double e = energy_norm(A, x);
    if (e > 0.0) {
      x /= e;
      return x;
    }
  }
  throw EstimationFailure("could not draw a nonzero initial iterate");
}

RateSummary convergence_rates(const ConvergenceRecord& rec) {
  const int K = rec.iterations;
  if (K < 1 || rec.error.size() < static_cast<size_t>(K) + 1)
    throw InvalidInput("record has no completed iterations");
  RateSummary s;
  s.K = K;
  s.K_tilde = std::max(5, static_cast<int>(std::ceil(0.05 * K)));
  const double e0 = rec.error[0];
  const double eK = rec.error[K];
  s.rho_ave = std::pow(eK / e0, 1.0 / K);
  int tail = s.K_tilde;
  if (K < s.K_tilde) {
    tail = K;
    s.truncated_tail = true;
  }
  s.rho_asy = std::pow(eK / rec.error[K - tail], 1.0 / tail);
  return s;
}

int expected_iterations(double rho_ave, double tol) {
  if (!(rho_ave > 0.0 && rho_ave < 1.0) || !(tol > 0.0 && tol < 1.0))
    throw InvalidInput("rates and tolerances must lie in (0,1)");
  return static_cast<int>(std::ceil(std::log(tol) / std::log(rho_ave)));
}

}  // namespace sfcdd
