#include "sfcdd/sfc.hpp"

#include <algorithm>
#include <numeric>

namespace sfcdd {

namespace {

constexpr int kMaxDim = 32;

// XOR-prefix over slots of a plane word packed MSB-first: bit (d-1-i) of the
// result is the XOR of slots 0..i.
inline uint32_t slot_prefix_xor(uint32_t z, int d) {
  uint32_t v = z;
  for (int shift = 1; shift < d; shift <<= 1) v ^= v >> shift;
  return v;
}

struct CurveCursor {
  int axis[kMaxDim];  // slot -> original dimension
  uint32_t flip = 0;  // per-slot bit flip mask, bit i for slot i
  uint32_t parity = 0;

  explicit CurveCursor(int d) {
    for (int i = 0; i < d; ++i) axis[i] = i;
  }

  uint32_t read_plane(const uint32_t* e, int d, int q) const {
    uint32_t z = 0;
    for (int i = 0; i < d; ++i) {
      uint32_t bit = ((e[axis[i]] >> q) & 1u) ^ ((flip >> i) & 1u);
      z |= bit << (d - 1 - i);
    }
    return z;
  }

  uint32_t digit(uint32_t z, int d) const {
    uint32_t full = (d >= 32) ? ~0u : ((1u << d) - 1u);
    uint32_t v = slot_prefix_xor(z, d);
    return parity ? (v ^ full) : v;
  }

  // Fold the plane into the orientation state; the plane word must have been
  // read before any update of this plane is applied.
  void descend(uint32_t z, int d) {
    parity ^= static_cast<uint32_t>(__builtin_popcount(z)) & 1u;
    for (int i = 0; i < d; ++i) {
      uint32_t bit = (z >> (d - 1 - i)) & 1u;
      if (bit) {
        flip ^= 1u;
      } else if (i > 0) {
        std::swap(axis[0], axis[i]);
        uint32_t b0 = flip & 1u;
        uint32_t bi = (flip >> i) & 1u;
        if (b0 != bi) flip ^= 1u | (1u << i);
      }
    }
  }
};

inline void embed(const uint32_t* c, const SfcOrdering& ord, uint32_t* e) {
  for (int j = 0; j < ord.dim(); ++j)
    e[j] = c[j] << (ord.resolution - ord.levels[j]);
}

}  // namespace

SfcOrdering SfcOrdering::hilbert(const std::vector<int>& levels) {
  if (levels.empty()) throw InvalidInput("empty level vector");
  if (levels.size() > kMaxDim) throw UnsupportedSize("dimension too large");
  SfcOrdering ord;
  ord.levels = levels;
  for (int l : levels) {
    if (l < 1 || l > 31) throw InvalidInput("level out of range");
    ord.resolution = std::max(ord.resolution, l);
  }
  return ord;
}

Ordering cmp_flat(const uint32_t* a, const uint32_t* b,
                  const SfcOrdering& ord) {
  const int d = ord.dim();
  const int m = ord.resolution;
  uint32_t ea[kMaxDim], eb[kMaxDim];
  embed(a, ord, ea);
  embed(b, ord, eb);

  CurveCursor cur(d);
  for (int q = m - 1; q >= 0; --q) {
    uint32_t za = cur.read_plane(ea, d, q);
    uint32_t zb = cur.read_plane(eb, d, q);
    if (za != zb) {
      return cur.digit(za, d) < cur.digit(zb, d) ? Ordering::Less
                                                 : Ordering::Greater;
    }
    if (q > 0) cur.descend(za, d);
  }
  return Ordering::Equal;
}

Ordering cmp(const GridIndex& a, const GridIndex& b, const SfcOrdering& ord) {
  if (a.coords.size() != b.coords.size() ||
      static_cast<int>(a.coords.size()) != ord.dim())
    throw InvalidInput("dimension mismatch in cmp");
  return cmp_flat(a.coords.data(), b.coords.data(), ord);
}

uint64_t hilbert_key(const GridIndex& a, const SfcOrdering& ord) {
  if (static_cast<int>(a.coords.size()) != ord.dim())
    throw InvalidInput("dimension mismatch in hilbert_key");
  const int d = ord.dim();
  const int m = ord.resolution;
  if (static_cast<int64_t>(d) * m > 63)
    throw UnsupportedSize("hilbert key exceeds 64-bit budget");

  uint32_t X[kMaxDim];
  embed(a.coords.data(), ord, X);

  // inverse undo
  for (uint32_t Q = 1u << (m - 1); Q > 1; Q >>= 1) {
    uint32_t Pm = Q - 1;
    if (X[0] & Q) X[0] ^= Pm;
    for (int i = 1; i < d; ++i) {
      if (X[i] & Q) {
        X[0] ^= Pm;
      } else {
        uint32_t t = (X[0] ^ X[i]) & Pm;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
  // Gray encode
  for (int i = 1; i < d; ++i) X[i] ^= X[i - 1];
  uint32_t t = X[d - 1];
  for (int i = 1; i < m; i <<= 1) X[d - 1] ^= X[d - 1] >> i;
  t ^= X[d - 1];
  for (int i = d - 2; i >= 0; --i) X[i] ^= t;

  // interleave, axis 0 most significant within each plane
  uint64_t key = 0;
  for (int q = m - 1; q >= 0; --q) {
    uint64_t dig = 0;
    for (int i = 0; i < d; ++i) dig = (dig << 1) | ((X[i] >> q) & 1u);
    key = (key << d) | dig;
  }
  return key;
}

std::vector<GridIndex> sfc_sort(std::vector<GridIndex> indices,
                                const SfcOrdering& ord) {
  std::sort(indices.begin(), indices.end(),
            [&ord](const GridIndex& a, const GridIndex& b) {
              return cmp(a, b, ord) == Ordering::Less;
            });
  return indices;
}

void sfc_sort_flat(std::vector<uint32_t>& coords, const SfcOrdering& ord) {
  const int d = ord.dim();
  const int64_t n = static_cast<int64_t>(coords.size()) / d;
  std::vector<int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), int64_t{0});
  const uint32_t* base = coords.data();
  std::sort(perm.begin(), perm.end(), [&](int64_t ia, int64_t ib) {
    return cmp_flat(base + ia * d, base + ib * d, ord) == Ordering::Less;
  });
  std::vector<uint32_t> out(coords.size());
  for (int64_t i = 0; i < n; ++i)
    std::copy_n(base + perm[i] * d, d, out.data() + i * d);
  coords = std::move(out);
}

}  // namespace sfcdd
