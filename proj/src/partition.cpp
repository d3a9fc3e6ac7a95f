#include "sfcdd/partition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sfcdd {

Partition split_nonoverlapping(int64_t N, int P) {
  if (N < 1) throw InvalidConfig("empty index set");
  if (P < 1 || P > N) throw InvalidConfig("subdomain count outside [1, N]");
  Partition part;
  part.N = N;
  part.P = P;
  int64_t base = N / P;
  int64_t r = N - P * base;
  int64_t a = 0;
  for (int i = 0; i < P; ++i) {
    int64_t size = base + (i < r ? 1 : 0);
    part.tilde_size.push_back(size);
    part.tilde_a.push_back(a);
    part.win_a.push_back(a);
    part.win_len.push_back(size);
    a += size;
  }
  return part;
}

Partition enlarge_overlap(const Partition& part, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidConfig("negative overlap parameter");
  if (2.0 * gamma + 1.0 > static_cast<double>(part.P))
    throw InvalidConfig("overlap wraps into itself: 2*gamma+1 > P");
  Partition out = part;
  out.gamma = gamma;
  const int P = part.P;
  int64_t g = static_cast<int64_t>(std::floor(gamma));
  double eta = gamma - static_cast<double>(g);

  auto size_of = [&](int64_t k) {
    return part.tilde_size[((k % P) + P) % P];
  };

  for (int i = 0; i < P; ++i) {
    int64_t len = 0;
    for (int64_t k = i - g; k <= i + g; ++k) len += size_of(k);
    int64_t left = static_cast<int64_t>(
        std::ceil(eta * static_cast<double>(size_of(i - g - 1))));
    int64_t right = static_cast<int64_t>(
        std::floor(eta * static_cast<double>(size_of(i + g + 1))));
    len += left + right;
    out.win_a[i] = out.wrap(part.tilde_a[((i - g) % P + P) % P] - left);
    out.win_len[i] = len;
  }
  return out;
}

OverlapWeights compute_weights(const Partition& part) {
  OverlapWeights w;
  // windows are cyclic intervals, so a difference array over one period
  // accumulates all covering counts in O(N + P)
  std::vector<int32_t> diff(static_cast<size_t>(part.N) + 1, 0);
  for (int i = 0; i < part.P; ++i) {
    int64_t a = part.win_a[i];
    int64_t b = a + part.win_len[i];
    if (b <= part.N) {
      ++diff[a];
      --diff[b];
    } else {
      ++diff[a];
      --diff[part.N];
      ++diff[0];
      --diff[b - part.N];
    }
  }
  w.count.resize(part.N);
  int32_t run = 0;
  for (int64_t j = 0; j < part.N; ++j) {
    run += diff[j];
    w.count[j] = run;
  }
  for (int i = 0; i < part.P; ++i) {
    int32_t least = w.count[part.global_of_local(i, 0)];
    for (int64_t t = 1; t < part.win_len[i]; ++t)
      least = std::min(least, w.count[part.global_of_local(i, t)]);
    w.omega.push_back(1.0 / static_cast<double>(least));
  }
  return w;
}

int coverage_count(const Partition& part, int64_t j) {
  if (j < 0 || j >= part.N) throw InvalidInput("position out of range");
  int c = 0;
  for (int i = 0; i < part.P; ++i)
    if (part.local_of_global(i, j) >= 0) ++c;
  return c;
}

std::string partition_to_json(const Partition& part) {
  std::ostringstream os;
  os << "{\"N\":" << part.N << ",\"P\":" << part.P << ",\"gamma\":"
     << part.gamma << ",\"subdomains\":[";
  for (int i = 0; i < part.P; ++i) {
    if (i) os << ",";
    os << "{\"tilde_a\":" << part.tilde_a[i] << ",\"tilde_size\":"
       << part.tilde_size[i] << ",\"win_a\":" << part.win_a[i]
       << ",\"win_len\":" << part.win_len[i] << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace sfcdd
