#include "sfcdd/fault.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfcdd/errors.hpp"

namespace sfcdd {

std::vector<int> draw_fault_pattern(int P, double p_fault, Rng& rng) {
  if (P < 1 || p_fault < 0.0 || p_fault > 1.0)
    throw InvalidConfig("invalid fault pattern parameters");
  std::vector<int> failed;
  for (int i = 0; i < P; ++i)
    if (rng.bernoulli(p_fault)) failed.push_back(i);
  return failed;
}

FaultEngine::FaultEngine(const SparseMatrix& A, const SchwarzPreconditioner& pc,
                         const FaultSchedule& schedule)
    : A_(&A), pc_(&pc), schedule_(schedule), rng_(schedule.seed) {
  if (schedule.p_fault < 0.0 || schedule.p_fault > 1.0)
    throw InvalidConfig("fault probability must lie in [0,1]");
  const Partition& part = pc.partition();
  if (schedule.use_scripted) {
    for (const std::vector<int>& f : schedule_.scripted)
      for (int id : f)
        if (id < 0 || id >= part.P)
          throw InvalidConfig("scripted failure id out of range");
  }
  procs_.resize(part.P);
  mask_.assign(part.P, 1);
}

void FaultEngine::fill_processor(VirtualProcessor& vp, const Vector& x,
                                 const Vector& b) {
  const Partition& part = pc_->partition();
  const int i = vp.id;
  vp.x_loc.resize(vp.win_len);
  vp.b_loc.resize(vp.win_len);
  vp.row_ptr.assign(static_cast<size_t>(vp.win_len) + 1, 0);
  int64_t nnz = 0;
  for (int64_t t = 0; t < vp.win_len; ++t) {
    const int64_t g = part.global_of_local(i, t);
    vp.x_loc[t] = x[g];
    vp.b_loc[t] = b[g];
    nnz += A_->row_ptr[g + 1] - A_->row_ptr[g];
    vp.row_ptr[t + 1] = nnz;
  }
  vp.col.resize(nnz);
  vp.val.resize(nnz);
  for (int64_t t = 0; t < vp.win_len; ++t) {
    const int64_t g = part.global_of_local(i, t);
    int64_t w = vp.row_ptr[t];
    for (int64_t k = A_->row_ptr[g]; k < A_->row_ptr[g + 1]; ++k, ++w) {
      vp.col[w] = A_->col[k];
      vp.val[w] = A_->val[k];
    }
  }
  vp.valid = true;
  vp.has_coarse = true;
}

void FaultEngine::reset(const Vector& x0, const Vector& b) {
  const Partition& part = pc_->partition();
  if (x0.size() != part.N || b.size() != part.N)
    throw InvalidInput("vector size does not match partition");
  shadow_ = x0;
  shadow_b_ = b;
  cycle_ = 0;
  recovery_failed_ = false;
  log_.clear();
  rng_ = Rng(schedule_.seed);
  for (int i = 0; i < part.P; ++i) {
    VirtualProcessor& vp = procs_[i];
    vp.id = i;
    vp.win_a = part.win_a[i];
    vp.win_len = part.win_len[i];
    vp.own_a = part.tilde_a[i];
    vp.own_len = part.tilde_size[i];
    fill_processor(vp, x0, b);
  }
}

void FaultEngine::wipe(int i) {
  VirtualProcessor& vp = procs_[i];
  const double nan = std::numeric_limits<double>::quiet_NaN();
  vp.x_loc.setConstant(nan);
  vp.b_loc.setConstant(nan);
  std::fill(vp.col.begin(), vp.col.end(), int64_t{-1});
  std::fill(vp.val.begin(), vp.val.end(), nan);
  vp.valid = false;
  vp.has_coarse = false;
}

bool FaultEngine::reconstruct(int i, const std::vector<uint8_t>& donor_ok) {
  const Partition& part = pc_->partition();
  VirtualProcessor& vp = procs_[i];
  for (int64_t t = 0; t < vp.win_len; ++t) {
    const int64_t g = part.global_of_local(i, t);
    int donor = -1;
    int64_t dloc = -1;
    for (int step = 1; step < part.P; ++step) {
      const int c = (i + step) % part.P;
      if (!donor_ok[c]) continue;
      const int64_t lc = part.local_of_global(c, g);
      if (lc >= 0) {
        donor = c;
        dloc = lc;
        break;
      }
    }
    if (donor < 0) return false;
    const VirtualProcessor& src = procs_[donor];
    vp.x_loc[t] = src.x_loc[dloc];
    vp.b_loc[t] = src.b_loc[dloc];
    const int64_t width = vp.row_ptr[t + 1] - vp.row_ptr[t];
    const int64_t swidth = src.row_ptr[dloc + 1] - src.row_ptr[dloc];
    if (width != swidth)
      throw std::logic_error("donor row width mismatch during reconstruction");
    for (int64_t k = 0; k < width; ++k) {
      vp.col[vp.row_ptr[t] + k] = src.col[src.row_ptr[dloc] + k];
      vp.val[vp.row_ptr[t] + k] = src.val[src.row_ptr[dloc] + k];
    }
  }
  vp.valid = true;
  vp.has_coarse = true;  // redundant copy refetched from any alive processor

  for (int64_t t = 0; t < vp.win_len; ++t) {
    const int64_t g = part.global_of_local(i, t);
    if (vp.x_loc[t] != shadow_[g] || vp.b_loc[t] != shadow_b_[g])
      throw std::logic_error("reconstructed state differs from shadow state");
  }
  return true;
}

void FaultEngine::check_conservation() const {
  const Partition& part = pc_->partition();
  for (const VirtualProcessor& vp : procs_) {
    if (!vp.valid) continue;
    for (int64_t t = 0; t < vp.win_len; ++t) {
      const int64_t g = part.global_of_local(vp.id, t);
      if (vp.x_loc[t] != shadow_[g])
        throw std::logic_error("processor store diverged from shadow state");
    }
  }
}

bool FaultEngine::cycle_apply(const Vector& r, Vector& z) {
  if (recovery_failed_) return false;
  const Partition& part = pc_->partition();
  ++cycle_;
  check_conservation();

  CycleEvent ev;
  ev.cycle = cycle_;
  if (schedule_.use_scripted) {
    if (static_cast<size_t>(cycle_) <= schedule_.scripted.size())
      ev.failed = schedule_.scripted[cycle_ - 1];
  } else {
    ev.failed = draw_fault_pattern(part.P, schedule_.p_fault, rng_);
  }

  // revive and reconstruct processors that failed earlier, drawing from
  // the processors whose data was intact at the start of this cycle
  std::vector<uint8_t> donor_ok(part.P);
  for (int i = 0; i < part.P; ++i) donor_ok[i] = procs_[i].valid ? 1 : 0;
  std::vector<uint8_t> failing(part.P, 0);
  for (int id : ev.failed) failing[id] = 1;
  for (int i = 0; i < part.P; ++i) {
    if (procs_[i].valid || failing[i]) continue;
    if (!reconstruct(i, donor_ok)) {
      ev.recovery_failed = true;
      recovery_failed_ = true;
      log_.push_back(std::move(ev));
      return false;
    }
    ev.reconstructed.push_back(i);
  }

  for (int id : ev.failed) wipe(id);

  bool any_invalid = false;
  for (int i = 0; i < part.P; ++i) {
    mask_[i] = procs_[i].valid ? 1 : 0;
    if (!mask_[i]) any_invalid = true;
  }
  z = pc_->apply(r, any_invalid ? &mask_ : nullptr);
  log_.push_back(std::move(ev));
  return true;
}

void FaultEngine::commit_iterate(const Vector& x) {
  const Partition& part = pc_->partition();
  if (x.size() != part.N) throw InvalidInput("iterate size mismatch");
  shadow_ = x;
  for (VirtualProcessor& vp : procs_) {
    if (!vp.valid) continue;
    for (int64_t t = 0; t < vp.win_len; ++t)
      vp.x_loc[t] = x[part.global_of_local(vp.id, t)];
  }
}

PrecondApply FaultEngine::precond() {
  return [this](const Vector& r, Vector& z) { return cycle_apply(r, z); };
}

IterateHook FaultEngine::hook() {
  return [this](const Vector& x) { commit_iterate(x); };
}

std::vector<int> FaultEngine::faults_per_cycle() const {
  std::vector<int> counts;
  counts.reserve(log_.size());
  for (const CycleEvent& ev : log_)
    counts.push_back(static_cast<int>(ev.failed.size()));
  return counts;
}

Vector FaultEngine::assemble_iterate() const {
  const Partition& part = pc_->partition();
  Vector x(part.N);
  x.setConstant(std::numeric_limits<double>::quiet_NaN());
  std::vector<uint8_t> have(part.N, 0);
  for (const VirtualProcessor& vp : procs_) {
    if (!vp.valid) continue;
    for (int64_t t = 0; t < vp.win_len; ++t) {
      const int64_t g = part.global_of_local(vp.id, t);
      if (!have[g]) {
        x[g] = vp.x_loc[t];
        have[g] = 1;
      }
    }
  }
  return x;
}

}  // namespace sfcdd
