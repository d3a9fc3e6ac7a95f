#include "sfcdd/experiment.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "sfcdd/errors.hpp"
#include "sfcdd/partition.hpp"
#include "sfcdd/rng.hpp"
#include "sfcdd/solvers.hpp"

namespace sfcdd {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

bool eq_nan(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

int exact_log2(int64_t v) {
  if (v < 1 || (v & (v - 1)) != 0) return -1;
  int l = 0;
  while (v > 1) {
    v >>= 1;
    ++l;
  }
  return l;
}

// total refinement bits spread over d dimensions, remainder to the front
std::vector<int> spread_levels(int d, int total) {
  if (total < d)
    throw InvalidConfig("fewer refinement bits than dimensions");
  std::vector<int> l(d, total / d);
  for (int j = 0; j < total % d; ++j) ++l[j];
  return l;
}

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* kSummaryHeader =
    "point,run,d,N,P,q,gamma,p_fault,variant,weighting,solver,seed,status,"
    "iterations,rho_ave,rho_asy,xi,lambda_min,lambda_max,cycles,total_faults,"
    "faulty_cycles,r_p,r_hat_p,wall_ms,note";

const char* kAggregateHeader =
    "point,runs,discarded,mean_iterations,mean_rho_ave,mean_rho_asy";

// comma split that keeps empty fields, unlike std::getline loops
std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_double(const std::string& s) { return std::strtod(s.c_str(), nullptr); }
int to_int(const std::string& s) { return std::atoi(s.c_str()); }

bool mean_eligible(const RunRow& row) {
  return row.iterations >= 1 &&
         (row.status == "converged" || row.status == "max-iter" ||
          row.status == "diverged");
}

}  // namespace

std::string run_id(int point, int run) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%03d_r%02d", point, run);
  return buf;
}

ExperimentPoint resolve_point(const ExperimentConfig& cfg, int pi, int fi,
                              const RunLimits& limits) {
  ExperimentPoint pt;
  pt.index = pi * static_cast<int>(cfg.p_fault.size()) + fi;
  pt.P = cfg.P_values[pi];
  pt.p_fault = cfg.p_fault[fi];

  switch (cfg.level_rule) {
    case LevelRule::Explicit:
      pt.grid = GridSpec::from_levels(cfg.levels);
      break;
    case LevelRule::WeakScaling:
      if (cfg.d != 1)
        throw InvalidConfig("weak-scaling level rule requires d = 1");
      pt.grid = GridSpec::line(static_cast<int64_t>(pt.P) << cfg.S);
      break;
    case LevelRule::Isotropic: {
      if (exact_log2(pt.P) < 0)
        throw InvalidConfig("isotropic level rule requires P a power of two");
      // Pick the total refinement budget whose grid size lands closest (in
      // log scale) to P * 2^S unknowns, spreading levels as evenly as the
      // dimension allows.
      const double target = std::log2(static_cast<double>(pt.P)) + cfg.S;
      int best_total = cfg.d;
      double best_gap = std::numeric_limits<double>::infinity();
      for (int total = cfg.d; total <= cfg.d + 62; ++total) {
        double bits = 0.0;
        for (int l : spread_levels(cfg.d, total)) bits += std::log2(std::pow(2.0, l) - 1.0);
        const double gap = std::abs(bits - target);
        if (gap < best_gap) {
          best_gap = gap;
          best_total = total;
        }
        if (bits > target + 1.0) break;
      }
      pt.grid = GridSpec::from_levels(spread_levels(cfg.d, best_total));
      break;
    }
    case LevelRule::StrongScaling:
      pt.grid = GridSpec::from_levels(spread_levels(cfg.d, cfg.L));
      break;
  }
  pt.N = pt.grid.N;

  if (!limits.force && (pt.N > limits.max_N || pt.P > limits.max_P))
    throw ResourceLimit("point exceeds size caps (N=" + std::to_string(pt.N) +
                        ", P=" + std::to_string(pt.P) +
                        "); pass --force to override");
  if (pt.P > pt.N)
    throw InvalidConfig("more processors than unknowns");
  if (2.0 * cfg.gamma + 1.0 > static_cast<double>(pt.P))
    throw InvalidConfig("overlap requires 2*gamma + 1 <= P");

  switch (cfg.q_rule) {
    case QRule::Fixed:
      pt.q = cfg.q;
      break;
    case QRule::ScaledS:
      pt.q = 1 << (cfg.S - 4);
      break;
    case QRule::ScaledNP: {
      const int l = static_cast<int>(
          std::floor(std::log2(static_cast<double>(pt.N) / pt.P)));
      if (l < 4) throw InvalidConfig("subdomains too small for q rule");
      pt.q = 1 << (l - 4);
      break;
    }
  }
  if (pt.q < 1) throw InvalidConfig("derived q is not positive");
  return pt;
}

ResultTable run_experiment(const ExperimentConfig& cfg,
                           const RunLimits& limits) {
  using clock = std::chrono::steady_clock;
  ResultTable table;

  for (size_t pi = 0; pi < cfg.P_values.size(); ++pi) {
    for (size_t fi = 0; fi < cfg.p_fault.size(); ++fi) {
      const int index =
          static_cast<int>(pi * cfg.p_fault.size() + fi);
      RunRow base;
      base.point = index;
      base.d = cfg.d;
      base.P = cfg.P_values[pi];
      base.gamma = cfg.gamma;
      base.p_fault = cfg.p_fault[fi];
      base.variant = variant_name(cfg.variant);
      base.weighting = weighting_name(cfg.weighting);
      base.solver = solver_name(cfg.solver);
      base.rho_ave = base.rho_asy = kNan;
      base.xi = base.lambda_min = base.lambda_max = kNan;
      base.r_p = base.r_hat_p = kNan;

      PointAggregate agg;
      agg.point = index;
      agg.mean_iterations = agg.mean_rho_ave = agg.mean_rho_asy = kNan;

      try {
        ExperimentPoint pt = resolve_point(cfg, static_cast<int>(pi),
                                           static_cast<int>(fi), limits);
        base.N = pt.N;
        base.q = pt.q;

        SfcGrid grid = build_sfc_grid(pt.grid);
        SparseMatrix A0 = assemble_laplace(grid);
        TransformedSystem sys =
            diagonal_transform(A0, Vector::Zero(A0.rows));
        const SparseMatrix& A = sys.Ahat;
        Partition part =
            enlarge_overlap(split_nonoverlapping(pt.N, pt.P), cfg.gamma);
        SchwarzPreconditioner pc = SchwarzPreconditioner::build(
            A, part, {cfg.variant, cfg.weighting, pt.q});

        double xi_used = kNan;
        if (cfg.solver == SolverKind::Richardson) {
          if (cfg.xi_rule == XiRule::Optimal) {
            SpectralEstimate est = estimate_extremes(
                A, plain_apply(pc), derive_seed(cfg.seed, index, cfg.runs));
            base.lambda_min = est.lambda_min;
            base.lambda_max = est.lambda_max;
            xi_used = est.optimal_xi();
          } else {
            xi_used = cfg.xi;
          }
        }
        base.xi = xi_used;

        SolveOptions opts;
        opts.tol = cfg.tol;
        opts.max_iter = cfg.max_iter;

        double sum_iter = 0.0, sum_ra = 0.0, sum_rs = 0.0;
        int n_iter = 0, n_ra = 0, n_rs = 0;

        for (int run = 0; run < cfg.runs; ++run) {
          RunRecord rec;
          rec.row = base;
          rec.row.run = run;
          const uint64_t run_seed = derive_seed(cfg.seed, index, run);
          rec.row.seed = run_seed;

          Vector x0 =
              random_initial_iterate(A, derive_seed(run_seed, 1, 0));
          FaultSchedule sched;
          sched.p_fault = pt.p_fault;
          sched.seed = derive_seed(run_seed, 2, 0);
          FaultEngine eng(A, pc, sched);
          eng.reset(x0, sys.bhat);

          const auto t0 = clock::now();
          ConvergenceRecord cr;
          bool breakdown = false;
          std::string note;
          try {
            switch (cfg.solver) {
              case SolverKind::Richardson:
                cr = richardson(A, eng.precond(), xi_used, x0, opts,
                                eng.hook());
                break;
              case SolverKind::Pcg:
                cr = pcg(A, eng.precond(), x0, opts, false, eng.hook());
                break;
              case SolverKind::PcgFlexible:
                cr = pcg(A, eng.precond(), x0, opts, true, eng.hook());
                break;
            }
          } catch (const NumericalBreakdown& e) {
            breakdown = true;
            note = e.what();
          }
          rec.row.wall_ms = std::chrono::duration<double, std::milli>(
                                clock::now() - t0)
                                .count();

          rec.row.status =
              breakdown ? "breakdown" : run_status_name(cr.status);
          rec.row.iterations = breakdown ? 0 : cr.iterations;
          rec.row.note = sanitize(note);
          rec.error = std::move(cr.error);
          rec.faults = eng.faults_per_cycle();
          rec.fault_log = eng.log();
          rec.row.cycles = eng.cycles();

          if (!rec.faults.empty()) {
            double sp = 0.0, sp2 = 0.0;
            int total = 0, faulty = 0;
            for (int n : rec.faults) {
              const double pk = pt.P + 1 - n;
              sp += pk;
              sp2 += pk * pk;
              total += n;
              if (n > 0) ++faulty;
            }
            rec.row.total_faults = total;
            rec.row.faulty_cycles = faulty;
            rec.row.r_p = sp / (rec.faults.size() * (pt.P + 1.0));
            rec.row.r_hat_p =
                sp2 / (rec.faults.size() * static_cast<double>(pt.P) * pt.P);
          }

          if (rec.row.iterations >= 1 && rec.error.size() >= 2) {
            ConvergenceRecord tmp;
            tmp.iterations = rec.row.iterations;
            tmp.error = rec.error;
            RateSummary rates = convergence_rates(tmp);
            rec.row.rho_ave = rates.rho_ave;
            rec.row.rho_asy = rates.rho_asy;
          }

          ++agg.runs;
          if (mean_eligible(rec.row)) {
            sum_iter += rec.row.iterations;
            ++n_iter;
            if (std::isfinite(rec.row.rho_ave)) {
              sum_ra += rec.row.rho_ave;
              ++n_ra;
            }
            if (std::isfinite(rec.row.rho_asy)) {
              sum_rs += rec.row.rho_asy;
              ++n_rs;
            }
          } else {
            ++agg.discarded;
          }
          table.runs.push_back(std::move(rec));
        }

        if (n_iter > 0) agg.mean_iterations = sum_iter / n_iter;
        if (n_ra > 0) agg.mean_rho_ave = sum_ra / n_ra;
        if (n_rs > 0) agg.mean_rho_asy = sum_rs / n_rs;
      } catch (const std::exception& e) {
        RunRecord rec;
        rec.row = base;
        rec.row.status = "config-error";
        rec.row.note = sanitize(e.what());
        table.runs.push_back(std::move(rec));
        agg.discarded = 1;
      }
      table.points.push_back(agg);
    }
  }
  return table;
}

bool same_row(const RunRow& a, const RunRow& b, bool compare_time) {
  return a.point == b.point && a.run == b.run && a.d == b.d && a.N == b.N &&
         a.P == b.P && a.q == b.q && eq_nan(a.gamma, b.gamma) &&
         eq_nan(a.p_fault, b.p_fault) && a.variant == b.variant &&
         a.weighting == b.weighting && a.solver == b.solver &&
         a.seed == b.seed && a.status == b.status &&
         a.iterations == b.iterations && eq_nan(a.rho_ave, b.rho_ave) &&
         eq_nan(a.rho_asy, b.rho_asy) && eq_nan(a.xi, b.xi) &&
         eq_nan(a.lambda_min, b.lambda_min) &&
         eq_nan(a.lambda_max, b.lambda_max) && a.cycles == b.cycles &&
         a.total_faults == b.total_faults &&
         a.faulty_cycles == b.faulty_cycles && eq_nan(a.r_p, b.r_p) &&
         eq_nan(a.r_hat_p, b.r_hat_p) &&
         (!compare_time || eq_nan(a.wall_ms, b.wall_ms)) && a.note == b.note;
}

bool same_table(const ResultTable& a, const ResultTable& b,
                bool compare_time) {
  if (a.runs.size() != b.runs.size() || a.points.size() != b.points.size())
    return false;
  for (size_t i = 0; i < a.runs.size(); ++i) {
    const RunRecord& ra = a.runs[i];
    const RunRecord& rb = b.runs[i];
    if (!same_row(ra.row, rb.row, compare_time)) return false;
    if (ra.error.size() != rb.error.size() || ra.faults != rb.faults)
      return false;
    for (size_t k = 0; k < ra.error.size(); ++k)
      if (!eq_nan(ra.error[k], rb.error[k])) return false;
    if (ra.fault_log.size() != rb.fault_log.size()) return false;
    for (size_t k = 0; k < ra.fault_log.size(); ++k) {
      const CycleEvent& ea = ra.fault_log[k];
      const CycleEvent& eb = rb.fault_log[k];
      if (ea.cycle != eb.cycle || ea.failed != eb.failed ||
          ea.reconstructed != eb.reconstructed ||
          ea.recovery_failed != eb.recovery_failed)
        return false;
    }
  }
  for (size_t i = 0; i < a.points.size(); ++i) {
    const PointAggregate& pa = a.points[i];
    const PointAggregate& pb = b.points[i];
    if (pa.point != pb.point || pa.runs != pb.runs ||
        pa.discarded != pb.discarded ||
        !eq_nan(pa.mean_iterations, pb.mean_iterations) ||
        !eq_nan(pa.mean_rho_ave, pb.mean_rho_ave) ||
        !eq_nan(pa.mean_rho_asy, pb.mean_rho_asy))
      return false;
  }
  return true;
}

void emit_results(const ResultTable& table, const std::string& out_dir,
                  const std::string& format) {
  const bool csv = format == "csv" || format == "both";
  const bool json = format == "json" || format == "both";
  if (!csv && !json)
    throw InvalidConfig("format must be csv, json, or both");
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  if (csv) {
    std::ofstream sum(dir / "summary.csv");
    if (!sum) throw InvalidInput("cannot write " + (dir / "summary.csv").string());
    sum << kSummaryHeader << "\n";
    for (const RunRecord& rec : table.runs) {
      const RunRow& r = rec.row;
      sum << r.point << ',' << r.run << ',' << r.d << ',' << r.N << ','
          << r.P << ',' << r.q << ',' << fmt(r.gamma) << ','
          << fmt(r.p_fault) << ',' << r.variant << ',' << r.weighting << ','
          << r.solver << ',' << r.seed << ',' << r.status << ','
          << r.iterations << ',' << fmt(r.rho_ave) << ',' << fmt(r.rho_asy)
          << ',' << fmt(r.xi) << ',' << fmt(r.lambda_min) << ','
          << fmt(r.lambda_max) << ',' << r.cycles << ',' << r.total_faults
          << ',' << r.faulty_cycles << ',' << fmt(r.r_p) << ','
          << fmt(r.r_hat_p) << ',' << fmt(r.wall_ms) << ',' << r.note
          << "\n";
    }

    std::ofstream agg(dir / "aggregate.csv");
    agg << kAggregateHeader << "\n";
    for (const PointAggregate& p : table.points)
      agg << p.point << ',' << p.runs << ',' << p.discarded << ','
          << fmt(p.mean_iterations) << ',' << fmt(p.mean_rho_ave) << ','
          << fmt(p.mean_rho_asy) << "\n";

    for (const RunRecord& rec : table.runs) {
      if (rec.error.empty()) continue;
      std::ofstream curve(dir /
                          ("curve_" + run_id(rec.row.point, rec.row.run) +
                           ".csv"));
      curve << "iteration,a_norm_error,n_faults\n";
      for (size_t k = 0; k < rec.error.size(); ++k) {
        const int nf =
            (k >= 1 && k - 1 < rec.faults.size()) ? rec.faults[k - 1] : 0;
        curve << k << ',' << fmt(rec.error[k]) << ',' << nf << "\n";
      }
    }
  }

  if (json) {
    for (const RunRecord& rec : table.runs) {
      nlohmann::json j;
      const RunRow& r = rec.row;
      j["point"] = r.point;
      j["run"] = r.run;
      j["d"] = r.d;
      j["N"] = r.N;
      j["P"] = r.P;
      j["q"] = r.q;
      j["gamma"] = r.gamma;
      j["p_fault"] = r.p_fault;
      j["variant"] = r.variant;
      j["weighting"] = r.weighting;
      j["solver"] = r.solver;
      j["seed"] = r.seed;
      j["status"] = r.status;
      j["iterations"] = r.iterations;
      j["rho_ave"] = r.rho_ave;
      j["rho_asy"] = r.rho_asy;
      j["xi"] = r.xi;
      j["lambda_min"] = r.lambda_min;
      j["lambda_max"] = r.lambda_max;
      j["cycles"] = r.cycles;
      j["total_faults"] = r.total_faults;
      j["faulty_cycles"] = r.faulty_cycles;
      j["r_p"] = r.r_p;
      j["r_hat_p"] = r.r_hat_p;
      j["wall_ms"] = r.wall_ms;
      j["note"] = r.note;
      j["a_norm_error"] = rec.error;
      j["faults_per_cycle"] = rec.faults;
      nlohmann::json log = nlohmann::json::array();
      for (const CycleEvent& ev : rec.fault_log) {
        log.push_back({{"cycle", ev.cycle},
                       {"failed", ev.failed},
                       {"reconstructed", ev.reconstructed},
                       {"recovery_failed", ev.recovery_failed}});
      }
      j["fault_log"] = std::move(log);
      std::ofstream out(dir /
                        ("run_" + run_id(r.point, r.run) + ".json"));
      out << j.dump(2) << "\n";
    }
  }
}

std::vector<RunRow> parse_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kSummaryHeader)
    throw InvalidInput("unexpected summary header in " + path);
  std::vector<RunRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = csv_split(line);
    if (f.size() != 26)
      throw InvalidInput("malformed summary row in " + path);
    RunRow r;
    r.point = to_int(f[0]);
    r.run = to_int(f[1]);
    r.d = to_int(f[2]);
    r.N = std::strtoll(f[3].c_str(), nullptr, 10);
    r.P = to_int(f[4]);
    r.q = to_int(f[5]);
    r.gamma = to_double(f[6]);
    r.p_fault = to_double(f[7]);
    r.variant = f[8];
    r.weighting = f[9];
    r.solver = f[10];
    r.seed = std::strtoull(f[11].c_str(), nullptr, 10);
    r.status = f[12];
    r.iterations = to_int(f[13]);
    r.rho_ave = to_double(f[14]);
    r.rho_asy = to_double(f[15]);
    r.xi = to_double(f[16]);
    r.lambda_min = to_double(f[17]);
    r.lambda_max = to_double(f[18]);
    r.cycles = to_int(f[19]);
    r.total_faults = to_int(f[20]);
    r.faulty_cycles = to_int(f[21]);
    r.r_p = to_double(f[22]);
    r.r_hat_p = to_double(f[23]);
    r.wall_ms = to_double(f[24]);
    r.note = f[25];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<PointAggregate> parse_aggregate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kAggregateHeader)
    throw InvalidInput("unexpected aggregate header in " + path);
  std::vector<PointAggregate> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f = csv_split(line);
    if (f.size() != 6)
      throw InvalidInput("malformed aggregate row in " + path);
    PointAggregate p;
    p.point = to_int(f[0]);
    p.runs = to_int(f[1]);
    p.discarded = to_int(f[2]);
    p.mean_iterations = to_double(f[3]);
    p.mean_rho_ave = to_double(f[4]);
    p.mean_rho_asy = to_double(f[5]);
    points.push_back(p);
  }
  return points;
}

}  // namespace sfcdd
