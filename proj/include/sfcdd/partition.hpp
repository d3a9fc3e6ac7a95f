#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfcdd/errors.hpp"

namespace sfcdd {

// Balanced 1D split of the curve-ordered positions 0..N-1 into P consecutive
// subdomains, optionally enlarged by the cyclic gamma-overlap rule. Windows
// are stored as two integers each (start, length); the overlapping window of
// subdomain i wraps around the ends of the position range.
struct Partition {
  int64_t N = 0;
  int P = 0;
  double gamma = 0.0;
  std::vector<int64_t> tilde_size;  // non-overlapping sizes, differ by <= 1
  std::vector<int64_t> tilde_a;     // start of each non-overlapping block
  std::vector<int64_t> win_a;       // start of the overlap window, in [0, N)
  std::vector<int64_t> win_len;     // overlap window length N_i <= N

  int64_t wrap(int64_t j) const {
    j %= N;
    return j < 0 ? j + N : j;
  }
  // global position of local index t within subdomain i's overlap window
  int64_t global_of_local(int i, int64_t t) const {
    return wrap(win_a[i] + t);
  }
  // local index of global position j in window i, or -1 if outside
  int64_t local_of_global(int i, int64_t j) const {
    int64_t t = wrap(j - win_a[i]);
    return t < win_len[i] ? t : -1;
  }
};

// Per-index overlap multiplicities and the derived weights. The diagonal
// weight of subdomain i at local index t is 1/count[global_of_local(i, t)];
// omega_i is the largest such weight in window i. The coarse level always
// carries identity weights.
struct OverlapWeights {
  std::vector<int32_t> count;  // length N, number of windows covering j
  std::vector<double> omega;   // length P

  double d_value(const Partition& part, int i, int64_t t) const {
    return 1.0 / count[part.global_of_local(i, t)];
  }
};

// Sizes follow the balanced rule: the first N mod P subdomains get one extra
// position. The result has no overlap (gamma = 0, windows equal the blocks).
Partition split_nonoverlapping(int64_t N, int P);

// Cyclic overlap enlargement: each window absorbs the floor(gamma) nearest
// blocks on both sides, plus the trailing ceil(eta*size) positions of the
// next block to the left and the leading floor(eta*size) positions of the
// next block to the right, eta = gamma - floor(gamma).
Partition enlarge_overlap(const Partition& part, double gamma);

OverlapWeights compute_weights(const Partition& part);

// Independent per-position count of covering windows (cross-check path).
int coverage_count(const Partition& part, int64_t j);

std::string partition_to_json(const Partition& part);

}  // namespace sfcdd
