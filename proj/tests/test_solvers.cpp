#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sfcdd/errors.hpp"
#include "sfcdd/grid.hpp"
#include "sfcdd/partition.hpp"
#include "sfcdd/rng.hpp"
#include "sfcdd/schwarz.hpp"
#include "sfcdd/solvers.hpp"
#include "sfcdd/sparse.hpp"

using namespace sfcdd;

namespace {

struct Setup {
  std::shared_ptr<SparseMatrix> Ap;
  SchwarzPreconditioner pc;
  const SparseMatrix& A() const { return *Ap; }
};

Setup make_setup(const std::vector<int>& levels, int P, double gamma,
                 const PreconditionerSpec& spec) {
  SfcGrid grid = build_sfc_grid(GridSpec::from_levels(levels));
  SparseMatrix A = assemble_laplace(grid);
  Vector b = Vector::Zero(A.rows);
  TransformedSystem sys = diagonal_transform(A, b);
  auto Ap = std::make_shared<SparseMatrix>(std::move(sys.Ahat));
  Partition part = enlarge_overlap(split_nonoverlapping(Ap->rows, P), gamma);
  SchwarzPreconditioner pc = SchwarzPreconditioner::build(*Ap, part, spec);
  return {std::move(Ap), std::move(pc)};
}

// eigenvalues of C^{-1}A from the dense symmetric form L^T A L, C^{-1} = LL^T
std::pair<double, double> dense_extremes(const SparseMatrix& A,
                                         const SchwarzPreconditioner& pc) {
  const int64_t N = A.rows;
  Eigen::MatrixXd Cinv(N, N);
  for (int64_t j = 0; j < N; ++j) {
    Vector e = Vector::Zero(N);
    e[j] = 1.0;
    Cinv.col(j) = pc.apply(e);
  }
  Cinv = 0.5 * (Cinv + Cinv.transpose().eval());
  Eigen::LLT<Eigen::MatrixXd> llt(Cinv);
  REQUIRE(llt.info() == Eigen::Success);
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd S = L.transpose() * A.to_dense() * L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return {es.eigenvalues()(0), es.eigenvalues()(N - 1)};
}

}  // namespace

TEST_CASE("exact preconditioner has unit spectrum") {
  Setup s = make_setup({5}, 1, 0.0, {Variant::PlainOneLevel, Weighting::None, 1});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 1);
  CHECK(est.lambda_min == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(est.lambda_max == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(est.kappa() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral estimate matches a dense eigendecomposition") {
  struct Cfg {
    std::vector<int> levels;
    int P;
    double gamma;
    PreconditionerSpec spec;
  };
  const Cfg cfgs[] = {
      {{4}, 2, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 1}},
      {{6}, 4, 1.0, {Variant::PlainTwoLevel, Weighting::Omega, 2}},
      {{3, 3}, 5, 0.5, {Variant::Balanced, Weighting::Omega, 2}},
  };
  for (const Cfg& cfg : cfgs) {
    CAPTURE(cfg.P);
    Setup s = make_setup(cfg.levels, cfg.P, cfg.gamma, cfg.spec);
    auto [dmin, dmax] = dense_extremes(s.A(), s.pc);
    SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 17);
    CHECK(est.lambda_min == doctest::Approx(dmin).epsilon(1e-6));
    CHECK(est.lambda_max == doctest::Approx(dmax).epsilon(1e-6));
    CHECK(est.lambda_min > 0.0);
    CHECK(est.lambda_min <= est.lambda_max);
  }
}

TEST_CASE("condition number is invariant under preconditioner rescaling") {
  Setup s = make_setup({5}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 2});
  SpectralEstimate base = estimate_extremes(s.A(), plain_apply(s.pc), 3);
  const double scale = 3.7;
  PrecondApply scaled = [&](const Vector& r, Vector& z) {
    z = scale * s.pc.apply(r);
    return true;
  };
  SpectralEstimate est = estimate_extremes(s.A(), scaled, 3);
  CHECK(est.lambda_max ==
        doctest::Approx(scale * base.lambda_max).epsilon(1e-6));
  CHECK(est.lambda_min ==
        doctest::Approx(scale * base.lambda_min).epsilon(1e-6));
  CHECK(est.kappa() == doctest::Approx(base.kappa()).epsilon(1e-8));
}

TEST_CASE("estimation failure carries partial results in its message") {
  Setup s = make_setup({6}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 1});
  CHECK_THROWS_AS(estimate_extremes(s.A(), plain_apply(s.pc), 9, 0.0, 3),
                  EstimationFailure);
  try {
    estimate_extremes(s.A(), plain_apply(s.pc), 9, 0.0, 3);
  } catch (const EstimationFailure& e) {
    CHECK(std::string(e.what()).find("lambda_max") != std::string::npos);
  }
}

TEST_CASE("richardson with an exact preconditioner converges in one step") {
  Setup s = make_setup({5}, 1, 0.0, {Variant::PlainOneLevel, Weighting::None, 1});
  Vector x0 = random_initial_iterate(s.A(), 5);
  SolveOptions opts;
  opts.max_iter = 10;
  ConvergenceRecord rec = richardson(s.A(), plain_apply(s.pc), 1.0, x0, opts);
  CHECK(rec.status == RunStatus::Converged);
  CHECK(rec.iterations == 1);
  CHECK(rec.error.size() == 2);
  CHECK(rec.error[1] <= 1e-10);
}

TEST_CASE("richardson at the optimal step reaches the predicted rate") {
  Setup s = make_setup({10}, 8, 0.5, {Variant::Balanced, Weighting::Omega, 16});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 11);
  Vector x0 = random_initial_iterate(s.A(), 21);
  SolveOptions opts;
  opts.max_iter = 20000;
  ConvergenceRecord rec =
      richardson(s.A(), plain_apply(s.pc), est.optimal_xi(), x0, opts);
  REQUIRE(rec.status == RunStatus::Converged);
  RateSummary rates = convergence_rates(rec);
  CHECK(rates.rho_asy <= est.optimal_rate() + 0.02);
  CHECK(rates.rho_ave <= est.optimal_rate() + 0.02);

  // monotone decrease over the asymptotic half of the history
  for (size_t k = rec.error.size() / 2; k + 1 < rec.error.size(); ++k)
    CHECK(rec.error[k + 1] <= rec.error[k] * (1.0 + 1e-10));
}

TEST_CASE("richardson rate stays under the damping bound for a safe step") {
  Setup s = make_setup({8}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 4});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 13);
  const double xi = 1.0 / est.lambda_max;
  Vector x0 = random_initial_iterate(s.A(), 23);
  SolveOptions opts;
  opts.max_iter = 20000;
  ConvergenceRecord rec = richardson(s.A(), plain_apply(s.pc), xi, x0, opts);
  REQUIRE(rec.status == RunStatus::Converged);
  const double bound = std::max(std::abs(1.0 - xi * est.lambda_min),
                                std::abs(1.0 - xi * est.lambda_max));
  RateSummary rates = convergence_rates(rec);
  CHECK(rates.rho_asy <= bound + 0.02);
}

TEST_CASE("overdamped richardson is reported as diverged") {
  Setup s = make_setup({6}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 2});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 29);
  Vector x0 = random_initial_iterate(s.A(), 31);
  SolveOptions opts;
  opts.max_iter = 100000;
  ConvergenceRecord rec =
      richardson(s.A(), plain_apply(s.pc), 2.5 / est.lambda_max, x0, opts);
  CHECK(rec.status == RunStatus::Diverged);
  CHECK(rec.error.back() >= 10.0 * rec.error.front());
}

TEST_CASE("a preconditioner failure surfaces as recovery-failed") {
  Setup s = make_setup({6}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 2});
  int applications = 0;
  PrecondApply failing = [&](const Vector& r, Vector& z) {
    if (++applications == 3) return false;
    z = s.pc.apply(r);
    return true;
  };
  Vector x0 = random_initial_iterate(s.A(), 37);
  SolveOptions opts;
  opts.max_iter = 100;

  ConvergenceRecord rec = richardson(s.A(), failing, 0.5, x0, opts);
  CHECK(rec.status == RunStatus::RecoveryFailed);
  CHECK(rec.iterations == 2);
  CHECK(rec.error.size() == 3);

  applications = 0;
  ConvergenceRecord cg = pcg(s.A(), failing, x0, opts);
  CHECK(cg.status == RunStatus::RecoveryFailed);
}

TEST_CASE("pcg with an exact preconditioner converges in one step") {
  Setup s = make_setup({5}, 1, 0.0, {Variant::PlainOneLevel, Weighting::None, 1});
  Vector x0 = random_initial_iterate(s.A(), 41);
  SolveOptions opts;
  opts.max_iter = 10;
  ConvergenceRecord rec = pcg(s.A(), plain_apply(s.pc), x0, opts);
  CHECK(rec.status == RunStatus::Converged);
  CHECK(rec.iterations == 1);
}

TEST_CASE("pcg error is monotone in the energy norm and beats richardson") {
  Setup s = make_setup({8}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 4});
  Vector x0 = random_initial_iterate(s.A(), 43);
  SolveOptions opts;
  opts.max_iter = 5000;

  int applications = 0;
  PrecondApply counting = [&](const Vector& r, Vector& z) {
    ++applications;
    z = s.pc.apply(r);
    return true;
  };
  ConvergenceRecord cg = pcg(s.A(), counting, x0, opts);
  REQUIRE(cg.status == RunStatus::Converged);
  CHECK(applications == cg.iterations);
  for (size_t k = 0; k + 1 < cg.error.size(); ++k)
    CHECK(cg.error[k + 1] <= cg.error[k] * (1.0 + 1e-10));

  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 47);
  ConvergenceRecord rich =
      richardson(s.A(), plain_apply(s.pc), est.optimal_xi(), x0, opts);
  REQUIRE(rich.status == RunStatus::Converged);
  CHECK(cg.iterations < rich.iterations);
}

TEST_CASE("nonpositive curvature raises a breakdown error") {
  SparseMatrix A = SparseMatrix::from_triplets(
      2, 2, {{0, 0, 1.0}, {1, 1, -2.0}}, true);
  Vector x0(2);
  x0 << 2.0, 1.0;
  PrecondApply ident = [](const Vector& r, Vector& z) {
    z = r;
    return true;
  };
  SolveOptions opts;
  CHECK_THROWS_AS(pcg(A, ident, x0, opts), NumericalBreakdown);
}

TEST_CASE("flexible pcg handles the non-symmetric pointwise weighting") {
  SfcGrid grid = build_sfc_grid(GridSpec::from_levels({8}));
  SparseMatrix A0 = assemble_laplace(grid);
  Vector b = Vector::Zero(A0.rows);
  TransformedSystem sys = diagonal_transform(A0, b);
  Partition part = enlarge_overlap(split_nonoverlapping(sys.Ahat.rows, 5), 1.2);
  SchwarzPreconditioner pc = SchwarzPreconditioner::build(
      sys.Ahat, part, {Variant::PlainTwoLevel, Weighting::D, 4});
  CHECK_FALSE(pc.symmetric());

  Vector x0 = random_initial_iterate(sys.Ahat, 53);
  SolveOptions opts;
  opts.max_iter = 2000;
  ConvergenceRecord rec = pcg(sys.Ahat, plain_apply(pc), x0, opts, true);
  CHECK(rec.status == RunStatus::Converged);
}

TEST_CASE("random initial iterates have unit energy and are seed-stable") {
  SparseMatrix A = assemble_laplace(GridSpec::from_levels({6}));
  Vector x = random_initial_iterate(A, 99);
  CHECK(std::abs(energy_norm(A, x) - 1.0) <= 1e-14);
  Vector y = random_initial_iterate(A, 99);
  CHECK((x - y).norm() == 0.0);

  std::vector<Vector> draws;
  for (uint64_t seed = 0; seed < 8; ++seed)
    draws.push_back(random_initial_iterate(A, seed));
  for (size_t i = 0; i < draws.size(); ++i)
    for (size_t j = i + 1; j < draws.size(); ++j) {
      Vector Ax = A * draws[j];
      CHECK(std::abs(draws[i].dot(Ax)) < 0.9);
    }
}

TEST_CASE("rate summaries reproduce their defining identities") {
  ConvergenceRecord rec;
  rec.status = RunStatus::Converged;
  rec.iterations = 20;
  for (int k = 0; k <= 20; ++k) rec.error.push_back(std::pow(0.5, k));
  RateSummary s = convergence_rates(rec);
  CHECK(s.rho_ave == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.rho_asy == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_FALSE(s.truncated_tail);

  ConvergenceRecord r40;
  r40.iterations = 40;
  for (int k = 0; k <= 40; ++k) r40.error.push_back(std::pow(0.9, k));
  CHECK(convergence_rates(r40).K_tilde == 5);

  CHECK(expected_iterations(0.9) == 175);
  CHECK_THROWS_AS(expected_iterations(1.1), InvalidInput);
  CHECK_THROWS_AS(expected_iterations(0.9, 2.0), InvalidInput);

  ConvergenceRecord shorty;
  shorty.iterations = 3;
  for (int k = 0; k <= 3; ++k) shorty.error.push_back(std::pow(0.25, k));
  RateSummary st = convergence_rates(shorty);
  CHECK(st.truncated_tail);
  CHECK(st.rho_asy == doctest::Approx(0.25).epsilon(1e-12));

  ConvergenceRecord empty;
  CHECK_THROWS_AS(convergence_rates(empty), InvalidInput);
}

TEST_CASE("subset iteration with every id active equals damped richardson") {
  Setup s = make_setup({6}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 1});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 61);
  const double xi = 1.0 / est.lambda_max;
  Vector x0 = random_initial_iterate(s.A(), 67);

  SubsetMode mode;
  mode.coarse_always = true;
  mode.subset_size = 4;
  mode.xi = xi;
  Rng rng(71);
  std::vector<double> sq = richardson_random_subset(s.A(), s.pc, x0, 5, mode, rng);

  SolveOptions opts;
  opts.max_iter = 5;
  opts.tol = 0.0;
  ConvergenceRecord rec = richardson(s.A(), plain_apply(s.pc), xi, x0, opts);
  REQUIRE(sq.size() == rec.error.size());
  for (size_t k = 0; k < sq.size(); ++k)
    CHECK(std::sqrt(sq[k]) == doctest::Approx(rec.error[k]).epsilon(1e-12));

  SubsetMode bad;
  bad.subset_size = 6;
  CHECK_THROWS_AS(richardson_random_subset(s.A(), s.pc, x0, 1, bad, rng),
                  InvalidConfig);
}

TEST_CASE("subset iteration contracts in expectation") {
  Setup s = make_setup({6}, 4, 0.5, {Variant::PlainTwoLevel, Weighting::Omega, 1});
  SpectralEstimate est = estimate_extremes(s.A(), plain_apply(s.pc), 73);
  SubsetMode mode;
  mode.coarse_always = false;
  mode.subset_size = 3;
  mode.xi = 1.0 / est.lambda_max;

  Rng rng(79);
  double mean_final = 0.0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    Vector x0 = random_initial_iterate(s.A(), 1000 + t);
    std::vector<double> sq =
        richardson_random_subset(s.A(), s.pc, x0, 10, mode, rng);
    mean_final += sq.back();
  }
  mean_final /= trials;
  CHECK(mean_final < 1.0);
}
