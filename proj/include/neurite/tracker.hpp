#pragma once

#include <Eigen/Dense>

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neurite/decompose.hpp"

namespace neurite {

enum class TieBreak { LowestIndex, HighestIndex };

struct TrackerConfig {
    int bfs_stop_C = 5;
    int lookback_K = 5;
    int d_max = 8;
    double cos_eps = 0.20;
    int max_bfs_pixels = 4096;
    TieBreak tie_break = TieBreak::LowestIndex;
    bool record_bfs_traces = false;
};

/// Unit vector between two distinct pixels.
struct DirectionVector {
    Pixel origin;
    Pixel tip;
    Eigen::Vector2d unit;

    static DirectionVector between(Pixel origin, Pixel tip);
};

enum class RegionKind {
    Unclassified,
    Bifurcation1,
    Bifurcation2,
    Bifurcation3,
    Bifurcation4,
    Superposition,
    Crossing,
};

const char* to_string(RegionKind kind);

struct CriticalRegion {
    int id = 0;
    std::vector<Pixel> pixels;
    RegionKind kind = RegionKind::Unclassified;
    bool classify_attempted = false;
    std::optional<DirectionVector> inward;
    std::vector<DirectionVector> outward;
    std::optional<int> partner;
    std::string diagnostic;
};

/// Pairing of segment exit and next-segment entry pixels across an overlap.
/// Both traversal directions are kept; the first recording of a pixel wins.
struct ContinuationMap {
    struct Entry {
        Pixel to;
        int region = -1;
    };

    std::map<Pixel, Entry> entries;
    std::vector<std::pair<Pixel, Pixel>> pairs;  // canonical (min, max) order

    bool record(Pixel a, Pixel b, int region);
    const Entry* find(Pixel v) const;
    int pairing_count() const { return static_cast<int>(pairs.size()); }
};

struct BfsTraceRow {
    int state = 0;
    Pixel current;
    std::vector<Pixel> queue;
    int all_clear = 0;  // 1 when every queued pixel is non-critical
    int sigma = 0;
};

struct BfsResult {
    std::vector<Pixel> tips;
    std::map<Pixel, Pixel> parent;
    std::vector<Pixel> order;  // first-enqueue order, entry first
    std::vector<BfsTraceRow> trace;
};

struct BfsTraceRecord {
    int region = -1;
    std::vector<BfsTraceRow> rows;
    std::vector<Pixel> order;
};

struct OutwardVector {
    DirectionVector dir;
    int cluster = -1;   // cluster whose boundary the origin touches
    int link_dist = 0;  // non-critical pixels between that cluster and the entered one
};

struct RegionVectors {
    DirectionVector inward;
    std::vector<OutwardVector> outward;
    std::optional<Pixel> link_start;  // first pixel of the inter-cluster segment, entry side
};

struct Classification {
    RegionKind kind = RegionKind::Unclassified;
    std::optional<int> partner;
    int through_index = -1;
    std::optional<std::pair<int, int>> lateral;  // indices of an opposite outward pair
    std::string diagnostic;
};

struct TrackState {
    BinaryImage skeleton;
    LabelImage labels;       // 0 = unlabeled
    LabelImage cluster_ids;  // -1 = not critical
    std::vector<CriticalRegion> regions;
    ContinuationMap continuations;
    std::deque<Pixel> pending_primary;
    std::deque<Pixel> pending_secondary;
    std::deque<Pixel> fallback_pool;
    int next_label = 1;
    int branch_count = 0;  // branches grown from primary/secondary seeds
    std::int64_t probe_count = 0;
    std::vector<BfsTraceRecord> bfs_traces;

    bool valid(Pixel p) const { return skeleton.at(p) != 0 && labels.at(p) == 0 && cluster_ids.at(p) < 0; }
};

enum class SegmentEndKind { NoOp, Termination, ReachedRegion };

struct SegmentEnd {
    SegmentEndKind kind = SegmentEndKind::NoOp;
    int cluster = -1;
    Pixel entry;
    std::vector<Pixel> path;
};

/// Labels valid pixels from `seed` until a termination or a critical region.
/// `approach` is the chain direction of travel into the seed (0 = unknown).
SegmentEnd track_segment(TrackState& state, Pixel seed, int label, int approach = 0);

/// Breadth-first expansion across the region next to `entry`. Forward
/// neighbors are enqueued in chain-code positions 3..8 relative to the
/// direction each pixel was reached from. The sweep stops once the queue has
/// stayed free of critical pixels for `stop_C` consecutive states; leftover
/// queue pixels (plus any terminations swallowed on the way) are the tips.
BfsResult bfs_across_region(const TrackState& state, Pixel entry, int stop_C, int approach,
                            std::span<const Pixel> inward_path, int max_bfs_pixels);

/// Inward vector from the K-th previously labeled pixel to the entry, and one
/// outward vector per tip, each anchored at the last non-critical pixel of
/// its parent-link path before the region.
RegionVectors compute_direction_vectors(const TrackState& state, Pixel entry, const BfsResult& bfs,
                                        std::span<const Pixel> inward_path, int lookback_K, int approach);

/// Index of the outward vector with the largest projection onto the inward
/// direction.
int choose_continuation(const DirectionVector& inward, const std::vector<OutwardVector>& outward,
                        TieBreak tie_break = TieBreak::LowestIndex);

Classification classify_region(const RegionVectors& vectors, int entry_cluster, int d_max, double cos_eps);

/// Enqueues side-branch seeds and records continuation pairings according to
/// the region kind; `chosen` is the continuation index within vectors.outward.
void handle_region(TrackState& state, int region_id, const RegionVectors& vectors, int chosen, Pixel entry);

/// Runs the full tracking pass: primary seeds, secondary seeds, deferred
/// lateral origins, then a completeness sweep. Throws when valid pixels
/// remain unlabeled afterwards.
TrackState track_all(const ComponentSet& components, const TrackerConfig& cfg = {});

/// Renders trace rows with pixels named a, b, c ... in first-enqueue order
/// ('w' is omitted from the naming alphabet).
std::vector<std::string> format_bfs_trace(const std::vector<BfsTraceRow>& rows, const std::vector<Pixel>& order);

}  // namespace neurite
