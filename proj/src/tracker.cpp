#include "neurite/tracker.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "neurite/chain.hpp"

namespace neurite {

DirectionVector DirectionVector::between(Pixel origin, Pixel tip) {
    if (origin == tip) throw Error("direction vector endpoints coincide");
    Eigen::Vector2d v(tip.x - origin.x, tip.y - origin.y);
    return {origin, tip, v.normalized()};
}

const char* to_string(RegionKind kind) {
    switch (kind) {
        case RegionKind::Unclassified: return "Unclassified";
        case RegionKind::Bifurcation1: return "Bifurcation1";
        case RegionKind::Bifurcation2: return "Bifurcation2";
        case RegionKind::Bifurcation3: return "Bifurcation3";
        case RegionKind::Bifurcation4: return "Bifurcation4";
        case RegionKind::Superposition: return "Superposition";
        case RegionKind::Crossing: return "Crossing";
    }
    return "Unclassified";
}

bool ContinuationMap::record(Pixel a, Pixel b, int region) {
    if (entries.count(a) || entries.count(b)) return false;
    entries[a] = {b, region};
    entries[b] = {a, region};
    pairs.push_back(b < a ? std::make_pair(b, a) : std::make_pair(a, b));
    return true;
}

const ContinuationMap::Entry* ContinuationMap::find(Pixel v) const {
    auto it = entries.find(v);
    return it == entries.end() ? nullptr : &it->second;
}

SegmentEnd track_segment(TrackState& s, Pixel seed, int label, int approach) {
    SegmentEnd end;
    if (!s.valid(seed)) return end;  // NoOp

    Pixel cur = seed;
    int travel = approach;
    while (true) {
        s.labels(cur) = label;
        end.path.push_back(cur);
        s.probe_count += 8;

        Pixel next;
        bool found = false;
        if (travel != 0) {
            const int d_cp = chain::opposite(travel);
            for (int pos = 3; pos <= 8 && !found; ++pos) {
                Pixel q = chain::step(cur, chain::relative(d_cp, pos));
                if (s.valid(q)) {
                    next = q;
                    found = true;
                }
            }
        } else {
            for (int d = 1; d <= 8 && !found; ++d) {
                Pixel q = chain::step(cur, d);
                if (s.valid(q)) {
                    next = q;
                    found = true;
                }
            }
        }
        if (!found) {
            for (int d = 1; d <= 8; ++d) {
                Pixel q = chain::step(cur, d);
                if (s.cluster_ids.at(q) >= 0) {
                    end.kind = SegmentEndKind::ReachedRegion;
                    end.cluster = s.cluster_ids.at(q);
                    end.entry = cur;
                    return end;
                }
            }
            end.kind = SegmentEndKind::Termination;
            end.entry = cur;
            return end;
        }
        travel = chain::direction(cur, next);
        cur = next;
    }
}

BfsResult bfs_across_region(const TrackState& s, Pixel entry, int stop_C, int approach,
                            std::span<const Pixel> inward_path, int max_bfs_pixels) {
    BfsResult r;
    std::set<Pixel> visited(inward_path.begin(), inward_path.end());
    visited.insert(entry);
    r.order.push_back(entry);

    std::deque<Pixel> queue;
    std::vector<Pixel> dead_ends;

    auto probe = [&](Pixel cur, int d_cp) {
        int added = 0;
        for (int pos = 3; pos <= 8; ++pos) {
            Pixel q = chain::step(cur, chain::relative(d_cp, pos));
            if (s.skeleton.at(q) == 0 || visited.count(q)) continue;
            visited.insert(q);
            r.parent[q] = cur;
            r.order.push_back(q);
            queue.push_back(q);
            ++added;
        }
        return added;
    };
    auto record_state = [&](int state, Pixel current, int& sigma) {
        bool clear = true;
        for (Pixel q : queue)
            if (s.cluster_ids.at(q) >= 0) {
                clear = false;
                break;
            }
        sigma = clear ? sigma + 1 : 0;
        r.trace.push_back({state, current, {queue.begin(), queue.end()}, clear ? 1 : 0, sigma});
    };

    int sigma = 0;
    int state = 0;
    const int d0 = approach != 0 ? chain::opposite(approach) : 5;
    probe(entry, d0);
    record_state(state++, entry, sigma);

    int dequeued = 0;
    while (!queue.empty() && sigma < stop_C) {
        if (++dequeued > max_bfs_pixels) throw Error("runaway BFS");
        Pixel cur = queue.front();
        queue.pop_front();
        const int d_cp = chain::direction(cur, r.parent.at(cur));
        const int added = probe(cur, d_cp);
        if (added == 0 && s.cluster_ids.at(cur) < 0 && neighbor_count8(s.skeleton, cur) == 1)
            dead_ends.push_back(cur);
        record_state(state++, cur, sigma);
    }

    r.tips.assign(dead_ends.begin(), dead_ends.end());
    r.tips.insert(r.tips.end(), queue.begin(), queue.end());
    // deterministic tip order: first-enqueued first
    std::map<Pixel, int> rank;
    for (size_t i = 0; i < r.order.size(); ++i) rank[r.order[i]] = static_cast<int>(i);
    std::sort(r.tips.begin(), r.tips.end(), [&](Pixel a, Pixel b) { return rank[a] < rank[b]; });
    return r;
}

RegionVectors compute_direction_vectors(const TrackState& s, Pixel entry, const BfsResult& bfs,
                                        std::span<const Pixel> inward_path, int lookback_K, int approach) {
    Pixel back;
    if (inward_path.size() >= 2) {
        const int idx = std::max(0, static_cast<int>(inward_path.size()) - 1 - lookback_K);
        back = inward_path[idx];
        if (back == entry) back = inward_path.front();
    } else {
        back = chain::step(entry, approach != 0 ? chain::opposite(approach) : 5);
    }

    const int entry_cluster = [&] {
        for (int d = 1; d <= 8; ++d) {
            int c = s.cluster_ids.at(chain::step(entry, d));
            if (c >= 0) return c;
        }
        return -1;
    }();

    RegionVectors v{DirectionVector::between(back, entry), {}, std::nullopt};

    for (Pixel tip : bfs.tips) {
        // Walk parent links back to the first critical pixel; the pixel just
        // before it is the vector origin.
        Pixel cur = tip;
        Pixel origin = tip;
        Pixel first_critical{-1, -1};
        while (true) {
            auto it = bfs.parent.find(cur);
            if (it == bfs.parent.end()) break;
            Pixel par = it->second;
            if (s.cluster_ids.at(par) >= 0) {
                first_critical = par;
                origin = cur;
                break;
            }
            cur = par;
        }
        if (first_critical.x < 0) continue;  // no path through the region: tip discarded

        const int cluster = s.cluster_ids.at(first_critical);
        int link_dist = 0;
        if (cluster != entry_cluster && entry_cluster >= 0) {
            // Count non-critical pixels between the two clusters along the path.
            Pixel c = first_critical;
            Pixel last_noncrit{-1, -1};
            int noncrit = 0;
            while (true) {
                auto it = bfs.parent.find(c);
                if (it == bfs.parent.end()) break;
                c = it->second;
                const int cid = s.cluster_ids.at(c);
                if (cid == entry_cluster) break;
                if (cid < 0) {
                    ++noncrit;
                    last_noncrit = c;
                }
            }
            link_dist = noncrit;
            if (last_noncrit.x >= 0 && !v.link_start) v.link_start = last_noncrit;
        }

        if (origin == tip)  // one-pixel arm: anchor the vector on the cluster boundary
            v.outward.push_back({DirectionVector::between(first_critical, tip), cluster, link_dist});
        else
            v.outward.push_back({DirectionVector::between(origin, tip), cluster, link_dist});
    }
    return v;
}

int choose_continuation(const DirectionVector& inward, const std::vector<OutwardVector>& outward,
                        TieBreak tie_break) {
    if (outward.empty()) throw Error("choose_continuation: no outward vectors");
    int best = 0;
    double best_dot = inward.unit.dot(outward[0].dir.unit);
    for (int i = 1; i < static_cast<int>(outward.size()); ++i) {
        const double d = inward.unit.dot(outward[i].dir.unit);
        if (d > best_dot || (tie_break == TieBreak::HighestIndex && d == best_dot)) {
            best = i;
            best_dot = d;
        }
    }
    return best;
}

Classification classify_region(const RegionVectors& v, int entry_cluster, int d_max, double cos_eps) {
    Classification c;
    const auto& out = v.outward;
    const int n = static_cast<int>(out.size());
    auto dot0 = [&](int i) { return v.inward.unit.dot(out[i].dir.unit); };

    std::optional<int> partner;
    for (const auto& o : out)
        if (o.cluster >= 0 && o.cluster != entry_cluster && o.link_dist < d_max) {
            partner = o.cluster;
            break;
        }

    if (n == 2) {
        const bool f0 = dot0(0) > 0.0;
        const bool f1 = dot0(1) > 0.0;
        if (f0 && f1) {
            c.kind = RegionKind::Bifurcation1;
        } else if (f0 != f1) {
            c.kind = partner ? RegionKind::Bifurcation3 : RegionKind::Bifurcation2;
            c.partner = partner;
        } else {
            c.diagnostic = "two outward vectors, both projecting backwards";
        }
        return c;
    }

    if (n == 3) {
        int k = 0;
        for (int i = 1; i < 3; ++i)
            if (dot0(i) > dot0(k)) k = i;
        const int j = (k + 1) % 3;
        const int l = (k + 2) % 3;
        c.through_index = k;

        if (dot0(k) < 1.0 - cos_eps) {
            c.diagnostic = "no outward vector continues the inward direction";
            return c;
        }
        const double lateral_dot = out[j].dir.unit.dot(out[l].dir.unit);
        if (lateral_dot <= -1.0 + cos_eps) {
            c.lateral = std::make_pair(j, l);
            if (out[j].cluster == out[l].cluster) {
                if (out[j].cluster == entry_cluster) {
                    c.kind = RegionKind::Crossing;
                } else {
                    c.diagnostic = "opposite pair beyond the entered cluster";
                }
            } else if (partner && std::min(dot0(j), dot0(l)) <= 0.0) {
                c.kind = RegionKind::Superposition;
                c.partner = partner;
            } else {
                c.diagnostic = partner ? "opposite pair with both projections forward"
                                       : "opposite pair across clusters beyond reach";
            }
            return c;
        }
        if (partner) {
            // Side arm belonging to the entered cluster decides between the
            // two compound bifurcation flavours.
            int side = -1;
            if (out[j].cluster == entry_cluster && out[l].cluster != entry_cluster) side = j;
            else if (out[l].cluster == entry_cluster && out[j].cluster != entry_cluster) side = l;
            else side = dot0(j) <= dot0(l) ? j : l;
            c.partner = partner;
            c.kind = dot0(side) > 0.0 ? RegionKind::Bifurcation4 : RegionKind::Bifurcation3;
            return c;
        }
        c.diagnostic = "three outward vectors, no opposite pair, no region nearby";
        return c;
    }

    if (n == 1)
        c.diagnostic = "single outward vector";
    else
        c.diagnostic = "unsupported outward cardinality " + std::to_string(n);
    return c;
}

void handle_region(TrackState& s, int region_id, const RegionVectors& v, int chosen, Pixel entry) {
    CriticalRegion& r = s.regions[region_id];
    const bool bridging = r.kind == RegionKind::Superposition || r.kind == RegionKind::Crossing;

    if (bridging) s.continuations.record(entry, v.outward[chosen].dir.origin, region_id);

    for (int i = 0; i < static_cast<int>(v.outward.size()); ++i) {
        if (i == chosen) continue;
        Pixel o = v.outward[i].dir.origin;
        if (bridging)
            s.fallback_pool.push_back(o);
        else
            s.pending_secondary.push_back(o);
    }
    if (v.link_start) {
        if (bridging)
            s.fallback_pool.push_back(*v.link_start);
        else
            s.pending_secondary.push_back(*v.link_start);
    }
}

namespace {

int approach_from_cluster(const TrackState& s, Pixel seed) {
    for (int d = 1; d <= 8; ++d) {
        Pixel q = chain::step(seed, d);
        if (s.cluster_ids.at(q) >= 0) return chain::opposite(d);
    }
    return 0;
}

void track_branch(TrackState& s, const TrackerConfig& cfg, Pixel seed, int label, int approach) {
    Pixel cur_seed = seed;
    int cur_approach = approach;
    while (true) {
        SegmentEnd end = track_segment(s, cur_seed, label, cur_approach);
        if (end.kind != SegmentEndKind::ReachedRegion) return;

        int entry_approach = cur_approach;
        if (end.path.size() >= 2)
            entry_approach = chain::direction(end.path[end.path.size() - 2], end.entry);

        BfsResult bfs = bfs_across_region(s, end.entry, cfg.bfs_stop_C, entry_approach, end.path,
                                          cfg.max_bfs_pixels);
        if (cfg.record_bfs_traces) s.bfs_traces.push_back({end.cluster, bfs.trace, bfs.order});
        if (bfs.tips.empty()) return;

        RegionVectors vecs =
            compute_direction_vectors(s, end.entry, bfs, end.path, cfg.lookback_K, entry_approach);
        if (vecs.outward.empty()) return;

        CriticalRegion& region = s.regions[end.cluster];
        if (!region.classify_attempted) {
            region.classify_attempted = true;
            Classification cls = classify_region(vecs, end.cluster, cfg.d_max, cfg.cos_eps);
            region.kind = cls.kind;
            region.partner = cls.partner;
            region.inward = vecs.inward;
            region.outward.clear();
            for (const auto& o : vecs.outward) region.outward.push_back(o.dir);
            region.diagnostic = cls.diagnostic;
            if (cls.partner) {
                CriticalRegion& other = s.regions[*cls.partner];
                if (!other.classify_attempted) {
                    other.classify_attempted = true;
                    other.kind = cls.kind;
                    other.partner = end.cluster;
                }
            }
            if ((cls.kind == RegionKind::Superposition || cls.kind == RegionKind::Crossing) && cls.lateral) {
                const auto [j, l] = *cls.lateral;
                s.continuations.record(vecs.outward[j].dir.origin, vecs.outward[l].dir.origin, end.cluster);
            }
        }

        const int k = choose_continuation(vecs.inward, vecs.outward, cfg.tie_break);
        handle_region(s, end.cluster, vecs, k, end.entry);

        Pixel resume = vecs.outward[k].dir.origin;
        if (!s.valid(resume)) return;
        auto it = bfs.parent.find(resume);
        cur_approach = it != bfs.parent.end() ? chain::direction(it->second, resume) : 0;
        cur_seed = resume;
    }
}

void drain_secondary(TrackState& s, const TrackerConfig& cfg) {
    while (!s.pending_secondary.empty()) {
        Pixel seed = s.pending_secondary.front();
        s.pending_secondary.pop_front();
        if (!s.valid(seed)) continue;
        ++s.branch_count;
        track_branch(s, cfg, seed, s.next_label++, approach_from_cluster(s, seed));
    }
}

}  // namespace

TrackState track_all(const ComponentSet& components, const TrackerConfig& cfg) {
    TrackState s;
    s.skeleton = components.skeleton;
    const int w = std::max(s.skeleton.width(), 1);
    const int h = std::max(s.skeleton.height(), 1);
    s.labels = LabelImage(w, h, 0);

    std::vector<CriticalCluster> clusters = find_critical_clusters(s.skeleton);
    s.cluster_ids = cluster_id_image(clusters, w, h);
    s.regions.resize(clusters.size());
    for (size_t i = 0; i < clusters.size(); ++i) {
        s.regions[i].id = clusters[i].id;
        s.regions[i].pixels = clusters[i].pixels;
    }

    s.pending_primary.assign(components.primary_seeds.begin(), components.primary_seeds.end());

    while (!s.pending_primary.empty()) {
        Pixel seed = s.pending_primary.front();
        s.pending_primary.pop_front();
        if (s.valid(seed)) {
            ++s.branch_count;
            track_branch(s, cfg, seed, s.next_label++, 0);
        }
        drain_secondary(s, cfg);
    }

    while (!s.fallback_pool.empty()) {
        Pixel seed = s.fallback_pool.front();
        s.fallback_pool.pop_front();
        if (s.valid(seed)) track_branch(s, cfg, seed, s.next_label++, approach_from_cluster(s, seed));
        drain_secondary(s, cfg);
    }

    // Completeness sweep: any component of valid pixels none of the seed
    // loops reached is grown from an end point (raster-first pixel when the
    // component is a closed cycle).
    while (true) {
        BinaryImage residual(w, h, 0);
        bool any = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (s.valid({x, y})) {
                    residual(x, y) = 1;
                    any = true;
                }
        if (!any) break;

        int count = 0;
        LabelImage comp = label_components(residual, &count);
        // Per component: raster-first end point, or raster-first pixel for cycles.
        std::vector<Pixel> first_pixel(count, Pixel{-1, -1});
        std::vector<Pixel> first_endpoint(count, Pixel{-1, -1});
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (residual(x, y) == 0) continue;
                const int c = comp(x, y) - 1;
                if (first_pixel[c].x < 0) first_pixel[c] = {x, y};
                if (first_endpoint[c].x < 0 && neighbor_count8(residual, x, y) <= 1)
                    first_endpoint[c] = {x, y};
            }
        for (int c = 0; c < count; ++c) {
            Pixel seed = first_endpoint[c].x >= 0 ? first_endpoint[c] : first_pixel[c];
            if (s.valid(seed)) track_branch(s, cfg, seed, s.next_label++, 0);
            drain_secondary(s, cfg);
        }
        while (!s.fallback_pool.empty()) {
            Pixel seed = s.fallback_pool.front();
            s.fallback_pool.pop_front();
            if (s.valid(seed)) track_branch(s, cfg, seed, s.next_label++, approach_from_cluster(s, seed));
            drain_secondary(s, cfg);
        }
    }

    std::vector<Pixel> unreached;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (s.valid({x, y})) unreached.push_back({x, y});
    if (!unreached.empty()) {
        std::ostringstream msg;
        msg << "unreached skeleton pixels:";
        for (size_t i = 0; i < unreached.size() && i < 8; ++i)
            msg << " (" << unreached[i].x << "," << unreached[i].y << ")";
        throw Error(msg.str());
    }
    return s;
}

std::vector<std::string> format_bfs_trace(const std::vector<BfsTraceRow>& rows, const std::vector<Pixel>& order) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvxyz";  // no 'w'
    std::map<Pixel, std::string> name;
    for (size_t i = 0; i < order.size(); ++i) {
        if (i < alphabet.size())
            name[order[i]] = std::string(1, alphabet[i]);
        else
            name[order[i]] = "p" + std::to_string(i);
    }
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::ostringstream line;
        line << (row.state < 10 ? "0" : "") << row.state << " " << name[row.current];
        for (Pixel q : row.queue) line << " " << name[q];
        line << " " << row.all_clear << " " << row.sigma;
        out.push_back(line.str());
    }
    return out;
}

}  // namespace neurite
