#pragma once

#include <vector>

#include "neurite/raster.hpp"

namespace neurite {

/// Outputs of the preprocessing pipeline.
///
/// Invariants: soma and skeleton are disjoint; critical_pixels is a subset of
/// the skeleton; every termination has exactly one skeleton neighbor; every
/// primary seed is a skeleton pixel 8-adjacent to the dilated soma.
struct ComponentSet {
    BinaryImage soma;
    BinaryImage skeleton;
    BinaryImage critical_pixels;
    /// Thinned pixels that fell inside the dilated soma; they reconnect the
    /// skeleton to the soma when the two are merged for contouring.
    BinaryImage soma_link;
    std::vector<Pixel> terminations;
    std::vector<Pixel> primary_seeds;
};

/// 8-connected cluster of skeleton pixels with more than two neighbors.
struct CriticalCluster {
    int id = 0;
    std::vector<Pixel> pixels;
};

struct DecomposeConfig {
    int soma_erosion_radius = 3;
    int soma_dilation_radius = 1;
    int soma_min_area = 20;
    int skel_min_area = 10;
    int spur_len = 3;
};

/// Largest blob surviving erode -> area_open -> dilate.
/// Throws SomaNotFound when nothing survives.
BinaryImage extract_soma(const BinaryImage& img, int erosion_radius, int dilation_radius, int min_area);

/// thin -> remove pixels inside dilate(soma, 1) -> area_open -> prune_spurs
/// -> prune_redundant.
BinaryImage extract_skeleton(const BinaryImage& img, const BinaryImage& soma, int spur_len, int min_skel_area);

std::vector<CriticalCluster> find_critical_clusters(const BinaryImage& skel);

std::vector<Pixel> find_terminations(const BinaryImage& skel);

/// One seed per skeleton component touching dilate(soma, 1), at the
/// component's raster-first touching pixel. With an empty soma every
/// component instead contributes its raster-first termination.
std::vector<Pixel> find_primary_seeds(const BinaryImage& skel, const BinaryImage& soma);

/// Runs the full preprocessing pipeline. A missing soma is tolerated; the
/// result then has an empty soma mask and termination-based seeds.
ComponentSet decompose(const BinaryImage& img, const DecomposeConfig& cfg = {});

/// Per-pixel cluster ids (-1 where not critical).
LabelImage cluster_id_image(const std::vector<CriticalCluster>& clusters, int width, int height);

}  // namespace neurite
