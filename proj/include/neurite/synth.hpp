#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neurite/tracker.hpp"

namespace neurite {

struct SomaSpec {
    Pixel center;
    int radius = 8;
};

struct BranchSpec {
    std::vector<Pixel> points;  // polyline
    int width = 1;              // odd stroke width
    /// Expected kind for the junction formed where this branch roots on
    /// another branch (ignored for soma-rooted branches).
    RegionKind expected_fork = RegionKind::Bifurcation1;
};

/// Two straight strokes meeting at `at` with inclination `theta_deg` between
/// them (the first runs at -theta/2 from horizontal, the second at +theta/2).
struct CrossingSpec {
    Pixel at;
    double theta_deg = 90.0;
    int arm_len = 20;
    int width = 1;
};

struct ShapeSpec {
    int width = 256;
    int height = 256;
    std::optional<SomaSpec> soma;
    std::vector<BranchSpec> branches;
    std::vector<CrossingSpec> crossings;
    std::uint64_t rng_seed = 0;
};

struct GroundTruth {
    struct Region {
        Pixel at;
        RegionKind expected = RegionKind::Unclassified;  // Unclassified = either/unspecified
    };
    int branch_count = 0;
    int crossing_count = 0;
    std::vector<Region> regions;
};

/// Kind implied by the inclination angle: steep overlaps read as crossings,
/// shallow ones as superpositions; 30..45 degrees is accepted as either.
std::optional<RegionKind> expected_kind_for_theta(double theta_deg);

/// Rasterizes the spec; deterministic for a fixed spec. Intended regions
/// closer than 4 pixels are folded into one truth record (merged geometry
/// yields merged truth).
std::pair<BinaryImage, GroundTruth> generate(const ShapeSpec& spec);

/// Gaussian smoothing followed by re-thresholding at 0.5; sigma 0 is identity.
BinaryImage blur_and_rebinarize(const BinaryImage& img, double sigma);

/// Plain-text shape file: one primitive per line.
///   canvas W H | seed N | soma CX CY R | branch W x1 y1 x2 y2 ...
///   cross X Y THETA ARMLEN W
ShapeSpec parse_shape_spec(std::istream& in);
ShapeSpec parse_shape_file(const std::string& path);

}  // namespace neurite
