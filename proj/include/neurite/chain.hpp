#pragma once

#include <array>

#include "neurite/image.hpp"

namespace neurite {

/// 8-neighbor chain code. Directions are indexed 1..8 starting east and
/// proceeding counter-clockwise (in the usual mathematical orientation;
/// y grows downward on the grid):
///   1 = E, 2 = NE, 3 = N, 4 = NW, 5 = W, 6 = SW, 7 = S, 8 = SE.
namespace chain {

inline constexpr std::array<int, 9> kDx = {0, 1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr std::array<int, 9> kDy = {0, 0, -1, -1, -1, 0, 1, 1, 1};

/// Wraps any integer onto the 1..8 direction range.
inline int wrap(int d) {
    int m = (d - 1) % 8;
    if (m < 0) m += 8;
    return m + 1;
}

inline int opposite(int d) { return ((d + 3) % 8) + 1; }

inline Pixel step(Pixel p, int d) { return {p.x + kDx[d], p.y + kDy[d]}; }

/// Chain direction from `a` to an 8-adjacent `b`, or 0 if not adjacent.
inline int direction(Pixel a, Pixel b) {
    for (int d = 1; d <= 8; ++d)
        if (a.x + kDx[d] == b.x && a.y + kDy[d] == b.y) return d;
    return 0;
}

/// Neighborhood positions renumbered relative to a reference direction:
/// position 1 lies at `ref` and successive positions sweep clockwise
/// (decreasing chain code). Scans anchor `ref` at the direction from the
/// current pixel back to the previous one, so position 1 is the previous
/// pixel itself.
inline int relative(int ref, int position) { return wrap(ref - (position - 1)); }

}  // namespace chain
}  // namespace neurite
