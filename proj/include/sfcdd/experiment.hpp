#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcdd/config.hpp"
#include "sfcdd/fault.hpp"
#include "sfcdd/grid.hpp"

namespace sfcdd {

// one fully resolved cell of a sweep: grid, processor count, coarse
// dimension, and fault probability all pinned down
struct ExperimentPoint {
  int index = 0;
  GridSpec grid;
  int64_t N = 0;
  int P = 1;
  int q = 1;
  double p_fault = 0.0;
};

struct RunRow {
  int point = 0;
  int run = 0;
  int d = 0;
  int64_t N = 0;
  int P = 0;
  int q = 0;
  double gamma = 0.0;
  double p_fault = 0.0;
  std::string variant;
  std::string weighting;
  std::string solver;
  uint64_t seed = 0;
  std::string status;
  int iterations = 0;
  double rho_ave = 0.0;
  double rho_asy = 0.0;
  double xi = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int cycles = 0;
  int total_faults = 0;
  int faulty_cycles = 0;
  double r_p = 0.0;      // mean participating fraction (|I_k| / (P+1))
  double r_hat_p = 0.0;  // mean of |I_k|^2 / P^2
  double wall_ms = 0.0;
  std::string note;
};

struct RunRecord {
  RunRow row;
  std::vector<double> error;  // A-norm error per iterate, entry 0 initial
  std::vector<int> faults;    // failures per cycle
  std::vector<CycleEvent> fault_log;
};

// per-point averages; recovery-failed and errored runs are discarded from
// the means and counted instead
struct PointAggregate {
  int point = 0;
  int runs = 0;
  int discarded = 0;
  double mean_iterations = 0.0;
  double mean_rho_ave = 0.0;
  double mean_rho_asy = 0.0;
};

struct ResultTable {
  std::vector<RunRecord> runs;
  std::vector<PointAggregate> points;
};

struct RunLimits {
  bool force = false;
  int64_t max_N = 10000000;
  int max_P = 1024;
};

// NaN-tolerant field-wise comparison; wall time is ignored unless asked for
bool same_row(const RunRow& a, const RunRow& b, bool compare_time = false);
bool same_table(const ResultTable& a, const ResultTable& b,
                bool compare_time = false);

// level and q rules applied to one (P, p_fault) cell; throws InvalidConfig
// when the derived sizes are unusable and ResourceLimit past the caps
ExperimentPoint resolve_point(const ExperimentConfig& cfg, int pi, int fi,
                              const RunLimits& limits = {});

// full sweep; per-point failures become rows with status "config-error"
// instead of aborting the remaining points
ResultTable run_experiment(const ExperimentConfig& cfg,
                           const RunLimits& limits = {});

// format is "csv", "json", or "both"; writes summary.csv, aggregate.csv and
// curve_<id>.csv, and/or run_<id>.json, flat into out_dir
void emit_results(const ResultTable& table, const std::string& out_dir,
                  const std::string& format = "both");

std::vector<RunRow> parse_summary(const std::string& path);
std::vector<PointAggregate> parse_aggregate(const std::string& path);

std::string run_id(int point, int run);

}  // namespace sfcdd
