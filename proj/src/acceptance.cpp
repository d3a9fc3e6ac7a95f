#include "sfcdd/acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <vector>

#include "sfcdd/coarse.hpp"
#include "sfcdd/experiment.hpp"
#include "sfcdd/fault.hpp"
#include "sfcdd/grid.hpp"
#include "sfcdd/partition.hpp"
#include "sfcdd/rng.hpp"
#include "sfcdd/schwarz.hpp"
#include "sfcdd/sfc.hpp"
#include "sfcdd/solvers.hpp"

namespace sfcdd {
namespace {

constexpr uint64_t kSeed = 1;

std::string strf(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[2048];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct PointStats {
  double mean = 0.0;
  double median = 0.0;
  int64_t eligible = 0;
  int64_t discarded = 0;
};

bool eligible_row(const RunRow& row) {
  return row.iterations >= 1 &&
         (row.status == "converged" || row.status == "max-iter" ||
          row.status == "diverged");
}

std::vector<PointStats> point_stats(const ResultTable& table) {
  std::vector<PointStats> out(table.points.size());
  std::vector<std::vector<int64_t>> its(table.points.size());
  for (const RunRecord& rec : table.runs) {
    if (eligible_row(rec.row)) its[rec.row.point].push_back(rec.row.iterations);
  }
  for (size_t p = 0; p < out.size(); ++p) {
    out[p].mean = table.points[p].mean_iterations;
    out[p].discarded = table.points[p].discarded;
    out[p].eligible = static_cast<int64_t>(its[p].size());
    if (!its[p].empty()) {
      std::sort(its[p].begin(), its[p].end());
      const size_t n = its[p].size();
      out[p].median = (n % 2 == 1)
                          ? static_cast<double>(its[p][n / 2])
                          : 0.5 * static_cast<double>(its[p][n / 2 - 1] +
                                                      its[p][n / 2]);
    }
  }
  return out;
}

struct LocalSystem {
  std::shared_ptr<SparseMatrix> A;
  Vector b;
  Partition part;
  SchwarzPreconditioner pc;
};

LocalSystem make_system(const GridSpec& gs, int P, double gamma,
                        const PreconditionerSpec& spec) {
  SfcGrid grid = build_sfc_grid(gs);
  SparseMatrix raw = assemble_laplace(grid);
  TransformedSystem sys = diagonal_transform(raw, Vector::Zero(raw.rows));
  auto A = std::make_shared<SparseMatrix>(std::move(sys.Ahat));
  Partition part = enlarge_overlap(split_nonoverlapping(A->rows, P), gamma);
  SchwarzPreconditioner pc = SchwarzPreconditioner::build(*A, part, spec);
  return {A, std::move(sys.bhat), std::move(part), std::move(pc)};
}

// Dense oracle for the extreme eigenvalues of C^{-1}A: assembles C^{-1}
// column by column, symmetrizes, and solves the generalized problem through
// the Cholesky congruence L^T A L.
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
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd S = L.transpose() * A.to_dense() * L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  return {es.eigenvalues()(0), es.eigenvalues()(N - 1)};
}

ExperimentConfig faulty_pcg_base() {
  ExperimentConfig cfg;
  cfg.d = 1;
  cfg.level_rule = LevelRule::WeakScaling;
  cfg.S = 8;
  cfg.P_values = {100};
  cfg.q_rule = QRule::Fixed;
  cfg.q = 16;
  cfg.gamma = 2.0;
  cfg.variant = Variant::Balanced;
  cfg.weighting = Weighting::Omega;
  cfg.solver = SolverKind::Pcg;
  cfg.runs = 10;
  cfg.seed = kSeed;
  return cfg;
}

CriterionResult criterion1() {
  CriterionResult r{1, "faulty PCG iteration counts", false, ""};
  ExperimentConfig cfg = faulty_pcg_base();
  cfg.p_fault = {0.0, 0.01, 0.02, 0.05, 0.1};
  const double expected[] = {25, 28, 31, 37, 54};
  ResultTable table = run_experiment(cfg, {});
  std::vector<PointStats> st = point_stats(table);
  const int64_t N = table.runs.empty() ? 0 : table.runs.front().row.N;
  bool pass = N == 25600;
  std::string means, disc;
  for (size_t i = 0; i < st.size(); ++i) {
    const double lo = 0.75 * expected[i], hi = 1.25 * expected[i];
    pass = pass && st[i].eligible > 0 && st[i].mean >= lo && st[i].mean <= hi;
    means += strf(i ? "/%.1f" : "%.1f", st[i].mean);
    disc += strf(i ? "/%lld" : "%lld", (long long)st[i].discarded);
  }
  r.pass = pass;
  r.detail = strf("N=%lld, mean K %s vs 25/28/31/37/54 +-25%% (discards %s)",
                  (long long)N, means.c_str(), disc.c_str());
  return r;
}

CriterionResult criterion2() {
  CriterionResult r{2, "overlap benefit under faults", false, ""};
  const double gammas[] = {1.0, 1.5, 2.0};
  const double expected[] = {50, 43, 37};
  double mean[3];
  std::string disc;
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    ExperimentConfig cfg = faulty_pcg_base();
    cfg.gamma = gammas[i];
    cfg.p_fault = {0.05};
    ResultTable table = run_experiment(cfg, {});
    std::vector<PointStats> st = point_stats(table);
    mean[i] = st[0].mean;
    disc += strf(i ? "/%lld" : "%lld", (long long)st[0].discarded);
    const double lo = 0.75 * expected[i], hi = 1.25 * expected[i];
    pass = pass && st[0].eligible > 0 && mean[i] >= lo && mean[i] <= hi;
  }
  pass = pass && mean[0] > mean[1] && mean[1] > mean[2];
  r.pass = pass;
  r.detail = strf(
      "gamma 1/1.5/2 mean K %.1f/%.1f/%.1f vs 50/43/37 +-25%%, "
      "strictly decreasing (discards %s)",
      mean[0], mean[1], mean[2], disc.c_str());
  return r;
}

CriterionResult criterion3() {
  CriterionResult r{3, "weak-scaling plateau", false, ""};
  const int Ss[] = {8, 10};
  double rich[2][4], cg[2][4];
  for (int si = 0; si < 2; ++si) {
    for (int solver = 0; solver < 2; ++solver) {
      ExperimentConfig cfg;
      cfg.d = 1;
      cfg.level_rule = LevelRule::WeakScaling;
      cfg.S = Ss[si];
      cfg.P_values = {8, 16, 32, 64};
      cfg.q_rule = QRule::ScaledS;
      cfg.gamma = 0.5;
      cfg.variant = Variant::Balanced;
      cfg.weighting = Weighting::Omega;
      cfg.solver = solver == 0 ? SolverKind::Richardson : SolverKind::Pcg;
      cfg.xi_rule = XiRule::Optimal;
      cfg.p_fault = {0.0};
      cfg.runs = 3;
      cfg.seed = kSeed;
      ResultTable table = run_experiment(cfg, {});
      std::vector<PointStats> st = point_stats(table);
      for (int p = 0; p < 4; ++p)
        (solver == 0 ? rich : cg)[si][p] = st[p].mean;
    }
  }
  bool pcg_ok = true;
  double pcg_max = 0.0;
  for (int si = 0; si < 2; ++si)
    for (int p = 0; p < 4; ++p) {
      pcg_ok = pcg_ok && cg[si][p] <= 35.0;
      pcg_max = std::max(pcg_max, cg[si][p]);
    }
  const bool largest_ok = rich[1][2] >= 110 && rich[1][2] <= 180 &&
                          rich[1][3] >= 110 && rich[1][3] <= 180;
  double var[2];
  bool var_ok = true;
  for (int si = 0; si < 2; ++si) {
    const double mn = std::min({rich[si][1], rich[si][2], rich[si][3]});
    const double mx = std::max({rich[si][1], rich[si][2], rich[si][3]});
    var[si] = (mx - mn) / mn;
    var_ok = var_ok && var[si] < 0.15;
  }
  r.pass = pcg_ok && largest_ok && var_ok;
  r.detail = strf(
      "PCG max K %.1f <= 35; Richardson S=10 P=32/64 K %.1f/%.1f in "
      "[110,180]; top-3 variation %.1f%%/%.1f%% < 15%% "
      "(S=8 Richardson %.1f/%.1f/%.1f/%.1f)",
      pcg_max, rich[1][2], rich[1][3], 100 * var[0], 100 * var[1], rich[0][0],
      rich[0][1], rich[0][2], rich[0][3]);
  return r;
}

CriterionResult criterion4() {
  CriterionResult r{4, "six-dimensional iteration limit", false, ""};
  double med[2][3], mean[2][3];
  for (int solver = 0; solver < 2; ++solver) {
    ExperimentConfig cfg;
    cfg.d = 6;
    cfg.level_rule = LevelRule::Isotropic;
    cfg.S = 8;
    cfg.P_values = {16, 32, 64};
    cfg.q_rule = QRule::ScaledS;
    cfg.gamma = 0.5;
    cfg.variant = Variant::Balanced;
    cfg.weighting = Weighting::Omega;
    cfg.solver = solver == 0 ? SolverKind::Richardson : SolverKind::Pcg;
    cfg.xi_rule = XiRule::Optimal;
    cfg.p_fault = {0.0};
    cfg.runs = 10;
    cfg.seed = kSeed;
    ResultTable table = run_experiment(cfg, {});
    std::vector<PointStats> st = point_stats(table);
    for (int p = 0; p < 3; ++p) {
      med[solver][p] = st[p].median;
      mean[solver][p] = st[p].mean;
    }
  }
  bool pass = true;
  for (int p = 0; p < 3; ++p) {
    pass = pass && med[0][p] >= 21 && med[0][p] <= 31;
    pass = pass && med[1][p] >= 12 && med[1][p] <= 20;
  }
  r.pass = pass;
  r.detail = strf(
      "Richardson K %.0f/%.0f/%.0f (means %.1f/%.1f/%.1f) in 26+-5; "
      "PCG K %.0f/%.0f/%.0f (means %.1f/%.1f/%.1f) in 16+-4",
      med[0][0], med[0][1], med[0][2], mean[0][0], mean[0][1], mean[0][2],
      med[1][0], med[1][1], med[1][2], mean[1][0], mean[1][1], mean[1][2]);
  return r;
}

CriterionResult criterion5() {
  CriterionResult r{5, "optimal Richardson rate bound", false, ""};
  struct Cfg {
    std::vector<int> levels;
    int P;
    double gamma;
    Variant variant;
    int q;
  };
  const Cfg cfgs[] = {
      {{8}, 4, 0.5, Variant::Balanced, 2},
      {{9}, 8, 1.0, Variant::PlainTwoLevel, 4},
      {{4, 4}, 4, 0.5, Variant::Balanced, 2},
      {{9}, 6, 1.5, Variant::Balanced, 2},
      {{3, 3, 2}, 5, 1.0, Variant::PlainTwoLevel, 3},
  };
  SolveOptions opts;
  opts.max_iter = 4000;
  bool pass = true;
  double worst_margin = 1e300;
  std::string rates;
  int idx = 0;
  for (const Cfg& c : cfgs) {
    LocalSystem s = make_system(GridSpec::from_levels(c.levels), c.P, c.gamma,
                                {c.variant, Weighting::Omega, c.q});
    auto [lmin, lmax] = dense_extremes(*s.A, s.pc);
    const double kappa = lmax / lmin;
    const double xi = 2.0 / (lmin + lmax);
    const double rho_star = 1.0 - 2.0 / (1.0 + kappa);
    double rho_asy = 0.0;
    for (int run = 0; run < 3; ++run) {
      Vector x0 = random_initial_iterate(*s.A, derive_seed(kSeed, 500 + idx, run));
      RateSummary rs = convergence_rates(
          richardson(*s.A, plain_apply(s.pc), xi, x0, opts));
      rho_asy = std::max(rho_asy, rs.rho_asy);
    }
    const double margin = rho_star + 0.02 - rho_asy;
    worst_margin = std::min(worst_margin, margin);
    pass = pass && rho_asy <= rho_star + 0.02;
    rates += strf(idx ? " %.3f<=%.3f" : "%.3f<=%.3f", rho_asy, rho_star + 0.02);
    ++idx;
  }
  r.pass = pass;
  r.detail = strf("rho_asy vs bound+0.02 per config: %s (worst margin %+.4f)",
                  rates.c_str(), worst_margin);
  return r;
}

CriterionResult criterion6() {
  CriterionResult r{6, "overlap coverage and weight exactness", false, ""};
  const std::vector<std::vector<int>> grids = {{6}, {3, 3}, {2, 2, 2}};
  const int Ps[] = {4, 7, 16};
  const double gammas[] = {0.5, 1.0, 1.5, 2.0};
  int combos = 0;
  bool pass = true;
  for (const auto& levels : grids) {
    const int64_t N = GridSpec::from_levels(levels).N;
    for (int P : Ps)
      for (double g : gammas) {
        const int cover = static_cast<int>(2 * g + 1);
        if (cover > P) continue;
        ++combos;
        Partition part = enlarge_overlap(split_nonoverlapping(N, P), g);
        OverlapWeights w = compute_weights(part);
        const double wexp = 1.0 / cover;
        for (int64_t j = 0; j < N; ++j)
          pass = pass && w.count[j] == cover && coverage_count(part, j) == cover;
        for (int i = 0; i < P; ++i) {
          pass = pass && w.omega[i] == wexp;
          for (int64_t t = 0; t < part.win_len[i]; ++t)
            pass = pass && w.d_value(part, i, t) == wexp;
        }
      }
  }
  r.pass = pass && combos == 33;
  r.detail = strf(
      "%d combos (d=1..3, P=4/7/16, gamma=0.5..2): coverage == 2*gamma+1 and "
      "weights == 1/(2*gamma+1) %s",
      combos, pass ? "exactly" : "VIOLATED");
  return r;
}

CriterionResult criterion7() {
  CriterionResult r{7, "stochastic convergence bounds", false, ""};
  LocalSystem s = make_system(GridSpec::from_levels({6}), 4, 0.5,
                              {Variant::PlainTwoLevel, Weighting::Omega, 1});
  auto [lmin, lmax] = dense_extremes(*s.A, s.pc);
  const double kappa = lmax / lmin;
  const int trials = 2000, steps = 20;
  bool pass = true;
  double slack[2];
  for (int th = 1; th <= 2; ++th) {
    SubsetMode mode;
    mode.coarse_always = th == 2;
    mode.subset_size = 3;
    mode.xi = th == 1 ? 1.0 / lmax : 3.0 / (4.0 * lmax);
    const double factor =
        th == 1 ? 1.0 - 3.0 / (5.0 * kappa) : 1.0 - 9.0 / (16.0 * kappa);
    std::vector<double> sum(steps + 1, 0.0), sum2(steps + 1, 0.0);
    for (int t = 0; t < trials; ++t) {
      Vector x0 = random_initial_iterate(*s.A, derive_seed(kSeed, 700 + th, t));
      Rng rng(derive_seed(kSeed, 710 + th, t));
      std::vector<double> e2 =
          richardson_random_subset(*s.A, s.pc, x0, steps, mode, rng);
      for (int k = 0; k <= steps; ++k) {
        sum[k] += e2[k];
        sum2[k] += e2[k] * e2[k];
      }
    }
    slack[th - 1] = 1e300;
    for (int k = 1; k <= steps; ++k) {
      const double mean = sum[k] / trials;
      const double var =
          (sum2[k] - sum[k] * sum[k] / trials) / (trials - 1);
      const double se = std::sqrt(std::max(var, 0.0) / trials);
      slack[th - 1] = std::min(slack[th - 1],
                               std::pow(factor, k) + 3 * se - mean);
    }
    pass = pass && slack[th - 1] >= 0.0;
  }
  r.pass = pass;
  r.detail = strf(
      "kappa=%.2f, %d trials, k<=20: min(bound+3SE-mean) uniform %+.3e, "
      "coarse-anchored %+.3e",
      kappa, trials, slack[0], slack[1]);
  return r;
}

bool check_hilbert_grid(const std::vector<int>& levels, int64_t* pairs) {
  SfcOrdering ord = SfcOrdering::hilbert(levels);
  const int d = ord.dim();
  std::vector<GridIndex> pts;
  GridIndex cur;
  cur.coords.assign(d, 1);
  for (;;) {
    pts.push_back(cur);
    int j = d - 1;
    for (; j >= 0; --j) {
      if (cur.coords[j] < (1u << levels[j]) - 1) {
        ++cur.coords[j];
        break;
      }
      cur.coords[j] = 1;
    }
    if (j < 0) break;
  }
  std::vector<uint64_t> keys(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) keys[i] = hilbert_key(pts[i], ord);
  bool ok = true;
  for (size_t a = 0; a < pts.size() && ok; ++a)
    for (size_t b = 0; b < pts.size(); ++b) {
      Ordering c = cmp(pts[a], pts[b], ord);
      Ordering want = keys[a] < keys[b]
                          ? Ordering::Less
                          : (keys[a] == keys[b] ? Ordering::Equal
                                                : Ordering::Greater);
      if (c != want) {
        ok = false;
        break;
      }
    }
  *pairs += static_cast<int64_t>(pts.size()) * static_cast<int64_t>(pts.size());
  return ok;
}

CriterionResult criterion8() {
  CriterionResult r{8, "oracle suites", false, ""};
  int64_t pairs = 0;
  bool hilbert_ok = true;
  for (const auto& levels : std::vector<std::vector<int>>{
           {10}, {6, 4}, {4, 3, 2}, {3, 3, 2, 2}})
    hilbert_ok = hilbert_ok && check_hilbert_grid(levels, &pairs);

  double galerkin_err = 0.0;
  struct GCfg {
    std::vector<int> levels;
    int P;
    int q;
  };
  for (const GCfg& c : {GCfg{{8}, 6, 4}, GCfg{{4, 4}, 5, 3}}) {
    LocalSystem s = make_system(GridSpec::from_levels(c.levels), c.P, 1.0,
                                {Variant::PlainTwoLevel, Weighting::Omega, c.q});
    SparseMatrix R0 = build_restriction(s.part, c.q);
    SparseMatrix A0 = galerkin_coarse(*s.A, R0);
    Eigen::MatrixXd dense =
        R0.to_dense() * s.A->to_dense() * R0.to_dense().transpose();
    galerkin_err = std::max(
        galerkin_err, (A0.to_dense() - dense).norm() / dense.norm());
  }

  double sub_err = 0.0;
  {
    LocalSystem s = make_system(GridSpec::from_levels({8}), 6, 1.0,
                                {Variant::PlainTwoLevel, Weighting::Omega, 4});
    Eigen::MatrixXd D = s.A->to_dense();
    for (int i = 0; i < s.part.P; ++i) {
      const SubdomainSolver& sub = s.pc.subdomain(i);
      Eigen::MatrixXd Ai = Eigen::MatrixXd(sub.Ai);
      for (int64_t a = 0; a < sub.win_len; ++a)
        for (int64_t b = 0; b < sub.win_len; ++b)
          sub_err = std::max(
              sub_err, std::abs(Ai(a, b) - D(s.part.global_of_local(i, a),
                                             s.part.global_of_local(i, b))));
    }
  }

  bool reaction_ok = true;
  const SparseMatrix A1 = assemble_laplace(GridSpec::from_levels({6}));
  for (int d = 2; d <= 4; ++d) {
    std::vector<int> levels(d, 1);
    levels[0] = 6;
    const SparseMatrix Ad = assemble_laplace(GridSpec::from_levels(levels));
    reaction_ok = reaction_ok && Ad.rows == A1.rows &&
                  Ad.row_ptr == A1.row_ptr && Ad.col == A1.col;
    if (!reaction_ok) break;
    const double shift = 8.0 * (d - 1);
    for (int64_t row = 0; row < Ad.rows && reaction_ok; ++row)
      for (int64_t k = Ad.row_ptr[row]; k < Ad.row_ptr[row + 1]; ++k) {
        const double want =
            Ad.col[k] == row ? A1.val[k] + shift : A1.val[k];
        reaction_ok = reaction_ok && Ad.val[k] == want;
      }
  }

  r.pass = hilbert_ok && galerkin_err <= 1e-12 && sub_err <= 1e-12 &&
           reaction_ok;
  r.detail = strf(
      "Hilbert cmp vs key %s (%lld pairs); Galerkin rel err %.2e; "
      "subdomain slice err %.2e; reaction identity %s",
      hilbert_ok ? "exact" : "MISMATCH", (long long)pairs, galerkin_err,
      sub_err, reaction_ok ? "exact" : "VIOLATED");
  return r;
}

CriterionResult criterion9() {
  CriterionResult r{9, "fault machinery soundness", false, ""};

  bool bitwise_ok = true;
  {
    LocalSystem s = make_system(GridSpec::from_levels({9}), 8, 1.0,
                                {Variant::Balanced, Weighting::Omega, 4});
    SpectralEstimate est =
        estimate_extremes(*s.A, plain_apply(s.pc), derive_seed(kSeed, 900, 0));
    Vector x0 = random_initial_iterate(*s.A, derive_seed(kSeed, 901, 0));
    SolveOptions opts;
    for (int solver = 0; solver < 2; ++solver) {
      ConvergenceRecord plain =
          solver == 0
              ? richardson(*s.A, plain_apply(s.pc), est.optimal_xi(), x0, opts)
              : pcg(*s.A, plain_apply(s.pc), x0, opts);
      FaultSchedule sched;
      sched.p_fault = 0.0;
      sched.seed = derive_seed(kSeed, 902, solver);
      FaultEngine eng(*s.A, s.pc, sched);
      eng.reset(x0, s.b);
      ConvergenceRecord faulty =
          solver == 0 ? richardson(*s.A, eng.precond(), est.optimal_xi(), x0,
                                   opts, eng.hook())
                      : pcg(*s.A, eng.precond(), x0, opts, false, eng.hook());
      bitwise_ok = bitwise_ok && plain.status == faulty.status &&
                   plain.iterations == faulty.iterations &&
                   plain.error.size() == faulty.error.size();
      for (size_t k = 0; bitwise_ok && k < plain.error.size(); ++k)
        bitwise_ok = plain.error[k] == faulty.error[k];
    }
  }

  bool adjacent_ok = false;
  {
    LocalSystem s = make_system(GridSpec::from_levels({8}), 6, 0.5,
                                {Variant::Balanced, Weighting::Omega, 2});
    FaultSchedule sched;
    sched.use_scripted = true;
    sched.scripted = {{2, 3}};
    FaultEngine eng(*s.A, s.pc, sched);
    Vector x0 = random_initial_iterate(*s.A, derive_seed(kSeed, 903, 0));
    eng.reset(x0, s.b);
    SolveOptions opts;
    ConvergenceRecord rec =
        richardson(*s.A, eng.precond(), 0.5, x0, opts, eng.hook());
    adjacent_ok = rec.status == RunStatus::RecoveryFailed;
  }

  bool shadow_ok = true;
  {
    LocalSystem s = make_system(GridSpec::from_levels({8}), 5, 1.0,
                                {Variant::PlainTwoLevel, Weighting::Omega, 2});
    FaultSchedule sched;
    sched.use_scripted = true;
    sched.scripted = {{2}, {}};
    FaultEngine eng(*s.A, s.pc, sched);
    Vector x0 = random_initial_iterate(*s.A, derive_seed(kSeed, 904, 0));
    eng.reset(x0, s.b);
    Vector z(s.A->rows);
    Vector rvec = -(*s.A * x0);
    eng.cycle_apply(rvec, z);
    Vector x1 = x0 + 0.5 * z;
    eng.commit_iterate(x1);
    rvec = -(*s.A * x1);
    if (!eng.cycle_apply(rvec, z)) shadow_ok = false;
    for (int i = 0; i < s.part.P && shadow_ok; ++i) {
      const VirtualProcessor& vp = eng.processor(i);
      shadow_ok = vp.valid;
      for (int64_t t = 0; t < vp.win_len && shadow_ok; ++t) {
        const int64_t g = s.part.global_of_local(i, t);
        shadow_ok = vp.x_loc[t] == eng.shadow()[g] && vp.b_loc[t] == s.b[g];
      }
    }
  }

  bool table_ok = false;
  {
    ExperimentConfig cfg;
    cfg.d = 1;
    cfg.level_rule = LevelRule::WeakScaling;
    cfg.S = 6;
    cfg.P_values = {6};
    cfg.q_rule = QRule::Fixed;
    cfg.q = 2;
    cfg.gamma = 1.0;
    cfg.variant = Variant::Balanced;
    cfg.weighting = Weighting::Omega;
    cfg.solver = SolverKind::Pcg;
    cfg.p_fault = {0.1};
    cfg.runs = 4;
    cfg.seed = kSeed;
    ResultTable t1 = run_experiment(cfg, {});
    ResultTable t2 = run_experiment(cfg, {});
    table_ok = same_table(t1, t2, false);
  }

  r.pass = bitwise_ok && adjacent_ok && shadow_ok && table_ok;
  r.detail = strf(
      "p=0 bitwise-equals fault-off: %s; adjacent gamma=0.5 failures -> "
      "recovery-failed: %s; post-reconstruction state == shadow: %s; "
      "seed-identical tables bitwise equal (wall clock excluded): %s",
      bitwise_ok ? "yes" : "NO", adjacent_ok ? "yes" : "NO",
      shadow_ok ? "yes" : "NO", table_ok ? "yes" : "NO");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out) {
  using Fn = CriterionResult (*)();
  const Fn fns[] = {criterion1, criterion2, criterion3,
                    criterion4, criterion5, criterion6,
                    criterion7, criterion8, criterion9};
  std::vector<CriterionResult> results;
  for (Fn fn : fns) {
    CriterionResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.id = static_cast<int>(results.size()) + 1;
      r.name = "criterion";
      r.pass = false;
      r.detail = strf("exception: %s", e.what());
    }
    out << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << " ("
        << r.name << "): " << r.detail << "\n";
    out.flush();
    results.push_back(std::move(r));
  }
  int passed = 0;
  for (const CriterionResult& r : results) passed += r.pass;
  out << passed << "/" << results.size() << " acceptance criteria passed\n";
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

}  // namespace sfcdd
