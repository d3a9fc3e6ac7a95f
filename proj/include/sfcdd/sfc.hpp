#pragma once

#include <cstdint>
#include <vector>

#include "sfcdd/errors.hpp"

namespace sfcdd {

enum class Ordering { Less, Equal, Greater };

enum class CurveKind { Hilbert };

// 1-based multi-index of an interior grid point.
struct GridIndex {
  std::vector<uint32_t> coords;
};

// Describes a Hilbert ordering of a d-dimensional grid with per-dimension
// refinement levels l_j. Dimension j holds indices 1..2^{l_j}-1; shorter
// dimensions are embedded left-aligned into the common resolution so that
// the anisotropic grid inherits the order of the enclosing isotropic curve.
struct SfcOrdering {
  CurveKind kind = CurveKind::Hilbert;
  std::vector<int> levels;
  int resolution = 0;

  static SfcOrdering hilbert(const std::vector<int>& levels);

  int dim() const { return static_cast<int>(levels.size()); }
};

// Compares two grid indices along the curve without forming full keys: the
// orthant tree is walked one bit-plane at a time with a single orientation
// update per level and an early exit at the first differing orthant.
Ordering cmp(const GridIndex& a, const GridIndex& b, const SfcOrdering& ord);

// Flat-pointer variant of cmp; a and b point at dim() coordinates each.
Ordering cmp_flat(const uint32_t* a, const uint32_t* b,
                  const SfcOrdering& ord);

// Full Hilbert key of one index. Requires dim()*resolution <= 63.
uint64_t hilbert_key(const GridIndex& a, const SfcOrdering& ord);

std::vector<GridIndex> sfc_sort(std::vector<GridIndex> indices,
                                const SfcOrdering& ord);

// In-place sort of a flat coordinate array (N*dim() entries, index-major).
void sfc_sort_flat(std::vector<uint32_t>& coords, const SfcOrdering& ord);

}  // namespace sfcdd
