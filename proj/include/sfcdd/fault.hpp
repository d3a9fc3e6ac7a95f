#pragma once

#include <cstdint>
#include <vector>

#include "sfcdd/rng.hpp"
#include "sfcdd/schwarz.hpp"
#include "sfcdd/solvers.hpp"
#include "sfcdd/sparse.hpp"

namespace sfcdd {

// ids of the processors failing this cycle, ascending
std::vector<int> draw_fault_pattern(int P, double p_fault, Rng& rng);

// Bernoulli-per-cycle failure model; scripted patterns (one entry per
// cycle, cycles beyond the script are fault-free) take precedence when
// use_scripted is set.
struct FaultSchedule {
  double p_fault = 0.0;
  uint64_t seed = 0;
  bool use_scripted = false;
  std::vector<std::vector<int>> scripted;
};

// Simulated processor. Owns the data a real node would hold: its window
// bounds, the segments of the iterate and right-hand side over the window,
// its rows of A, and a flag for the redundant coarse copy. A failed
// processor's stores are overwritten, so recovery has to come from donors.
struct VirtualProcessor {
  int id = 0;
  int64_t win_a = 0;
  int64_t win_len = 0;
  int64_t own_a = 0;
  int64_t own_len = 0;
  Vector x_loc;
  Vector b_loc;
  std::vector<int64_t> row_ptr;
  std::vector<int64_t> col;
  std::vector<double> val;
  bool valid = true;
  bool has_coarse = true;
};

struct CycleEvent {
  int cycle = 0;
  std::vector<int> failed;
  std::vector<int> reconstructed;
  bool recovery_failed = false;
};

// Drives the failure/reconstruction processes around the Schwarz
// application. One cycle = one preconditioner application: revive and
// reconstruct processors that failed last cycle, wipe this cycle's
// failures, then apply the operator with the failed contributions masked.
// Residual computation and the coarse correction stay fault-free.
class FaultEngine {
 public:
  FaultEngine(const SparseMatrix& A, const SchwarzPreconditioner& pc,
              const FaultSchedule& schedule);

  // installs x0 and b into every processor store and clears the history
  void reset(const Vector& x0, const Vector& b);

  // one cycle; returns false when some lost index has no alive donor
  bool cycle_apply(const Vector& r, Vector& z);

  // fault-free global operation: mirror the new iterate into the stores
  // of the processors whose data is intact
  void commit_iterate(const Vector& x);

  PrecondApply precond();
  IterateHook hook();

  int cycles() const { return cycle_; }
  bool recovery_failed() const { return recovery_failed_; }
  const std::vector<CycleEvent>& log() const { return log_; }
  std::vector<int> faults_per_cycle() const;
  const VirtualProcessor& processor(int i) const { return procs_[i]; }
  const Vector& shadow() const { return shadow_; }

  // global iterate as the processors hold it: each entry read from its
  // first data-valid owner
  Vector assemble_iterate() const;

 private:
  const SparseMatrix* A_;
  const SchwarzPreconditioner* pc_;
  FaultSchedule schedule_;
  Rng rng_;
  std::vector<VirtualProcessor> procs_;
  Vector shadow_;
  Vector shadow_b_;
  int cycle_ = 0;
  bool recovery_failed_ = false;
  std::vector<CycleEvent> log_;
  std::vector<uint8_t> mask_;

  void fill_processor(VirtualProcessor& vp, const Vector& x, const Vector& b);
  bool reconstruct(int i, const std::vector<uint8_t>& donor_ok);
  void wipe(int i);
  void check_conservation() const;
};

}  // namespace sfcdd
