#pragma once

#include <optional>
#include <vector>

#include "neurite/tracker.hpp"

namespace neurite {

/// Label conventions for the union image handed to the contour follower.
inline constexpr std::int32_t kSomaLabel = -1;
inline constexpr std::int32_t kCriticalLabel = -2;

/// Union of labeled skeleton, critical pixels and soma (plus the link pixels
/// that reconnect branch roots to the soma).
LabelImage make_union_image(const ComponentSet& components, const TrackState& state);

struct ParametricContour {
    std::vector<Pixel> points;
    std::vector<std::uint8_t> bridge;  // 1 = synthesized sample over an overlap
    bool closed = false;

    struct Consumption {
        Pixel from_v;
        Pixel to_v;
        int region = -1;
    };
    std::vector<Consumption> consumptions;
    int bridge_events = 0;

    int size() const { return static_cast<int>(points.size()); }
};

struct ContourCursor {
    Pixel current;
    Pixel previous;
    int d_cp = 5;       // chain direction current -> previous
    int hug_label = 0;  // label of the foreground run being followed
};

enum class NextPixelPolicy { Branch, Soma };

/// Raster-first background pixel that neighbors a foreground pixel.
Pixel find_first_pixel(const LabelImage& union_img);

/// Next contour pixel by scanning chain-code positions 4..8 relative to the
/// direction back to the previous pixel. Branch policy takes the first
/// candidate, Soma policy the last (which seals one-pixel-wide inlets).
Pixel next_pixel(const LabelImage& union_img, const ContourCursor& cursor, NextPixelPolicy policy);

/// 8-connected digital straight segment from a to b, inclusive.
std::vector<Pixel> bresenham(Pixel a, Pixel b);

struct BridgeStep {
    std::vector<Pixel> points;  // appended samples; the landing pixel is last
    Pixel v_n;
    Pixel v_next;
    int region = -1;
};

/// Bridge across a superposition/crossing: locates the continuation pixel
/// near the cursor, mirrors the direction relationship onto the far side and
/// returns the Bresenham samples over the region. Bifurcations yield no
/// bridge (empty points) and are contoured outwards by the normal policy.
std::optional<BridgeStep> traverse_region(const LabelImage& union_img, const ContourCursor& cursor,
                                          const CriticalRegion& region, const ContinuationMap& continuations);

struct ContourOptions {
    bool bridge_overlaps = true;  // false reproduces the traditional follower
    int step_budget_factor = 4;   // times image area
};

ParametricContour extract_contour(const LabelImage& union_img, const std::vector<CriticalRegion>& regions,
                                  const LabelImage& cluster_ids, const ContinuationMap& continuations,
                                  const ContourOptions& opt = {});

/// Plain chain-code follower: outer boundary only, no bridging.
ParametricContour extract_contour_traditional(const LabelImage& union_img);

}  // namespace neurite
