#pragma once

#include <cstdint>
#include <vector>

#include "neurite/image.hpp"

namespace neurite {

/// Flat structuring element centered at its origin.
struct StructuringElement {
    std::vector<Pixel> offsets;

    /// Discrete disk: all offsets with dx^2 + dy^2 <= r^2.
    static StructuringElement disk(int radius);

    StructuringElement reflected() const;
    bool contains_origin() const;
};

/// Interval template over the 3x3 window: `hits` must be foreground,
/// `misses` must be background, everything else is unconstrained.
struct HitOrMissTemplate {
    std::vector<Pixel> hits;
    std::vector<Pixel> misses;

    HitOrMissTemplate(std::vector<Pixel> hits, std::vector<Pixel> misses);

    HitOrMissTemplate rotated90() const;

    /// The corner-redundancy template set used to enforce one-pixel-wide
    /// skeleton branches. Reading fixed here: hits = {center, north, west},
    /// misses = {east, south}, corners unconstrained; closed under rotation
    /// (reflections coincide with rotations for this pattern).
    static std::vector<HitOrMissTemplate> redundancy_set();
};

enum class ThresholdPolicy { Automatic, Fixed };
enum class Polarity { BrightIsForeground, DarkIsForeground };

struct BinarizeOptions {
    ThresholdPolicy policy = ThresholdPolicy::Automatic;
    int threshold = 128;  // used when policy == Fixed
    Polarity polarity = Polarity::BrightIsForeground;
};

/// Threshold chosen by exhaustive minimisation of intra-class variance.
int otsu_threshold(const GrayImage& gray);

BinaryImage binarize(const GrayImage& gray, const BinarizeOptions& opt = {});

BinaryImage erode(const BinaryImage& img, const StructuringElement& se);
BinaryImage dilate(const BinaryImage& img, const StructuringElement& se);

/// Removes every 8-connected foreground component with area < min_area.
BinaryImage area_open(const BinaryImage& img, int min_area);

BinaryImage hit_or_miss(const BinaryImage& img, const HitOrMissTemplate& tpl);

/// Homotopic thinning by sequential deletion of simple border pixels,
/// cycling the four border directions until stable. End points are kept.
BinaryImage thin(const BinaryImage& img);

/// Deletes pixels matched by any template in `tpls`, re-checked sequentially
/// so that 8-connectivity is never broken. Iterates to a fixpoint.
BinaryImage prune_redundant(const BinaryImage& skel, const std::vector<HitOrMissTemplate>& tpls);
BinaryImage prune_redundant(const BinaryImage& skel);

/// Removes terminal segments of length <= max_spur_len that end at a
/// junction pixel, iterated to a fixpoint. Bare lines are never spurs.
BinaryImage prune_spurs(const BinaryImage& skel, int max_spur_len);

/// 8-connected component labelling; labels are 1..count in raster order of
/// each component's first pixel.
LabelImage label_components(const BinaryImage& img, int* count = nullptr);

/// True when removing (x, y) keeps both the foreground 8-topology and the
/// background 4-topology of its 3x3 neighborhood intact.
bool is_simple8(const BinaryImage& img, int x, int y);

}  // namespace neurite
