#include "neurite/contour.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "neurite/chain.hpp"

namespace neurite {

LabelImage make_union_image(const ComponentSet& components, const TrackState& state) {
    const int w = state.labels.width();
    const int h = state.labels.height();
    LabelImage u(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (state.labels(x, y) > 0)
                u(x, y) = state.labels(x, y);
            else if (state.cluster_ids(x, y) >= 0)
                u(x, y) = kCriticalLabel;
            else if (components.soma.at(x, y) != 0 || components.soma_link.at(x, y) != 0)
                u(x, y) = kSomaLabel;
        }
    return u;
}

namespace {

bool has_foreground_neighbor(const LabelImage& u, Pixel p) {
    for (int d = 1; d <= 8; ++d)
        if (u.at(chain::step(p, d)) != 0) return true;
    return false;
}

bool is_contour_candidate(const LabelImage& u, Pixel p) {
    return u.contains(p) && u.at(p) == 0 && has_foreground_neighbor(u, p);
}

/// Label of the foreground run to keep following from p. Sticks with the
/// previous label while it stays adjacent, otherwise prefers branch labels
/// over the soma over critical pixels.
std::int32_t update_hug(const LabelImage& u, Pixel p, std::int32_t prev_hug) {
    bool saw_soma = false, saw_critical = false;
    std::int32_t first_branch = 0;
    for (int d = 1; d <= 8; ++d) {
        const std::int32_t v = u.at(chain::step(p, d));
        if (v == 0) continue;
        if (v == prev_hug) return prev_hug;
        if (v > 0 && first_branch == 0) first_branch = v;
        if (v == kSomaLabel) saw_soma = true;
        if (v == kCriticalLabel) saw_critical = true;
    }
    if (first_branch != 0) return first_branch;
    if (saw_soma) return kSomaLabel;
    if (saw_critical) return kCriticalLabel;
    return 0;
}

}  // namespace

Pixel find_first_pixel(const LabelImage& u) {
    for (int y = 0; y < u.height(); ++y)
        for (int x = 0; x < u.width(); ++x) {
            Pixel p{x, y};
            if (u.at(p) == 0 && has_foreground_neighbor(u, p)) return p;
        }
    throw Error("no contour start");
}

Pixel next_pixel(const LabelImage& u, const ContourCursor& cursor, NextPixelPolicy policy) {
    Pixel chosen;
    bool found = false;
    for (int pos = 4; pos <= 8; ++pos) {
        Pixel q = chain::step(cursor.current, chain::relative(cursor.d_cp, pos));
        if (!is_contour_candidate(u, q)) continue;
        if (policy == NextPixelPolicy::Branch) return q;
        chosen = q;  // Soma policy: remember the last one
        found = true;
    }
    if (found) return chosen;
    std::ostringstream msg;
    msg << "stuck contour at (" << cursor.current.x << "," << cursor.current.y << ") d_cp=" << cursor.d_cp
        << " hug=" << cursor.hug_label;
    throw Error(msg.str());
}

std::vector<Pixel> bresenham(Pixel a, Pixel b) {
    if (a == b) throw Error("bresenham endpoints coincide");
    std::vector<Pixel> out;
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    Pixel p = a;
    while (true) {
        out.push_back(p);
        if (p == b) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            p.x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            p.y += sy;
        }
    }
    return out;
}

std::optional<BridgeStep> traverse_region(const LabelImage& u, const ContourCursor& cursor,
                                          const CriticalRegion& region, const ContinuationMap& continuations) {
    if (region.kind != RegionKind::Superposition && region.kind != RegionKind::Crossing)
        return std::nullopt;  // bifurcations are contoured outwards

    // Locate the continuation pixel in the cursor vicinity: 8-neighborhood
    // first, then the distance-2 ring. Prefer the pixel carrying the label
    // being followed, then the one paired at this region.
    Pixel best;
    const ContinuationMap::Entry* best_entry = nullptr;
    int best_score = -1;
    for (int r = 1; r <= 2 && !best_entry; ++r) {
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
                Pixel v{cursor.current.x + dx, cursor.current.y + dy};
                const auto* e = continuations.find(v);
                if (!e) continue;
                int score = 0;
                if (u.at(v) == cursor.hug_label) score += 4;
                if (e->region == region.id) score += 2;
                if (score > best_score) {
                    best_score = score;
                    best = v;
                    best_entry = e;
                }
            }
    }
    if (!best_entry) {
        std::ostringstream msg;
        msg << "unbridged region " << region.id << " near (" << cursor.current.x << "," << cursor.current.y
            << ")";
        throw Error(msg.str());
    }

    const Pixel v_n = best;
    const Pixel v_next = best_entry->to;
    const Pixel offset{v_n.x - cursor.current.x, v_n.y - cursor.current.y};

    // Mirror the direction relationship d(E(n) <-> V(n)) onto the far side.
    Pixel landing{v_next.x - offset.x, v_next.y - offset.y};
    if (!u.contains(landing) || u.at(landing) != 0) {
        Pixel unit{v_next.x - (offset.x == 0 ? 0 : offset.x / std::abs(offset.x)),
                   v_next.y - (offset.y == 0 ? 0 : offset.y / std::abs(offset.y))};
        if (u.contains(unit) && u.at(unit) == 0 && unit != cursor.current) {
            landing = unit;
        } else {
            bool ok = false;
            for (int d = 1; d <= 8 && !ok; ++d) {
                Pixel q = chain::step(v_next, d);
                if (u.contains(q) && u.at(q) == 0 && q != cursor.current) {
                    landing = q;
                    ok = true;
                }
            }
            if (!ok) {
                std::ostringstream msg;
                msg << "unbridged region " << region.id << ": no landing spot near (" << v_next.x << ","
                    << v_next.y << ")";
                throw Error(msg.str());
            }
        }
    }
    if (landing == cursor.current) return std::nullopt;  // degenerate geometry

    BridgeStep step;
    step.v_n = v_n;
    step.v_next = v_next;
    step.region = best_entry->region;
    std::vector<Pixel> line = bresenham(cursor.current, landing);
    step.points.assign(line.begin() + 1, line.end());
    return step;
}

namespace {

struct WalkState {
    ContourCursor cursor;
    std::optional<std::pair<Pixel, Pixel>> last_bridge;  // directed (v_n, v_next)
};

/// Critical pixel of a bridging region adjacent to the cursor and lying ahead
/// of the direction of travel, if any.
int bridging_region_ahead(const LabelImage& u, const LabelImage& cluster_ids,
                          const std::vector<CriticalRegion>& regions, const ContourCursor& cursor) {
    const int tx = cursor.current.x - cursor.previous.x;
    const int ty = cursor.current.y - cursor.previous.y;
    for (int d = 1; d <= 8; ++d) {
        Pixel q = chain::step(cursor.current, d);
        if (u.at(q) != kCriticalLabel) continue;
        const int c = cluster_ids.at(q);
        if (c < 0) continue;
        const RegionKind k = regions[c].kind;
        if (k != RegionKind::Superposition && k != RegionKind::Crossing) continue;
        const int ahead = (q.x - cursor.current.x) * tx + (q.y - cursor.current.y) * ty;
        if (ahead > 0) return c;
    }
    return -1;
}

ParametricContour walk(const LabelImage& u, const std::vector<CriticalRegion>& regions,
                       const LabelImage& cluster_ids, const ContinuationMap& continuations,
                       const ContourOptions& opt) {
    ParametricContour contour;
    const Pixel first = find_first_pixel(u);

    WalkState ws;
    ws.cursor.current = first;
    ws.cursor.previous = {first.x - 1, first.y};
    ws.cursor.d_cp = 5;
    ws.cursor.hug_label = update_hug(u, first, 0);

    contour.points.push_back(first);
    contour.bridge.push_back(0);

    std::int64_t budget = std::int64_t(opt.step_budget_factor) * u.width() * u.height() + 16;
    Pixel first_exit{-1, -1};
    bool have_exit = false;

    while (budget-- > 0) {
        // One step: either a bridge over an overlap or a normal probe.
        std::vector<Pixel> added;
        std::vector<std::uint8_t> flags;
        ContourCursor next_cursor = ws.cursor;
        std::optional<std::pair<Pixel, Pixel>> bridge_used;
        ParametricContour::Consumption consumption;

        bool stepped = false;
        if (opt.bridge_overlaps && ws.cursor.hug_label > 0) {
            const int rid = bridging_region_ahead(u, cluster_ids, regions, ws.cursor);
            if (rid >= 0) {
                auto bridge = traverse_region(u, ws.cursor, regions[rid], continuations);
                if (bridge && !(ws.last_bridge && ws.last_bridge->first == bridge->v_next &&
                                ws.last_bridge->second == bridge->v_n)) {
                    added = bridge->points;
                    flags.assign(added.size(), 1);
                    flags.back() = 0;  // the landing pixel is a regular boundary sample
                    const Pixel landing = added.back();
                    next_cursor.current = landing;
                    next_cursor.previous = added.size() >= 2 ? added[added.size() - 2] : ws.cursor.current;
                    next_cursor.d_cp = chain::direction(next_cursor.current, next_cursor.previous);
                    if (next_cursor.d_cp == 0) next_cursor.d_cp = 5;
                    next_cursor.hug_label = u.at(bridge->v_next);
                    bridge_used = std::make_pair(bridge->v_n, bridge->v_next);
                    consumption = {bridge->v_n, bridge->v_next, bridge->region};
                    stepped = true;
                }
            }
        }
        if (!stepped) {
            const NextPixelPolicy policy =
                ws.cursor.hug_label == kSomaLabel ? NextPixelPolicy::Soma : NextPixelPolicy::Branch;
            const Pixel next = next_pixel(u, ws.cursor, policy);
            added = {next};
            flags = {0};
            next_cursor.previous = ws.cursor.current;
            next_cursor.current = next;
            next_cursor.d_cp = chain::direction(next, ws.cursor.current);
            next_cursor.hug_label = update_hug(u, next, ws.cursor.hug_label);
        }

        if (!have_exit) {
            first_exit = added.front();
            have_exit = true;
        } else if (ws.cursor.current == first && added.front() == first_exit) {
            contour.points.push_back(first);  // E(N) = E(1)
            contour.bridge.push_back(0);
            contour.closed = true;
            break;
        }

        contour.points.insert(contour.points.end(), added.begin(), added.end());
        contour.bridge.insert(contour.bridge.end(), flags.begin(), flags.end());
        if (bridge_used) {
            ++contour.bridge_events;
            contour.consumptions.push_back(consumption);
        }
        ws.cursor = next_cursor;
        ws.last_bridge = bridge_used;
    }

    if (!contour.closed) throw Error("non-terminating contour");
    return contour;
}

}  // namespace

ParametricContour extract_contour(const LabelImage& union_img, const std::vector<CriticalRegion>& regions,
                                  const LabelImage& cluster_ids, const ContinuationMap& continuations,
                                  const ContourOptions& opt) {
    return walk(union_img, regions, cluster_ids, continuations, opt);
}

ParametricContour extract_contour_traditional(const LabelImage& union_img) {
    ContourOptions opt;
    opt.bridge_overlaps = false;
    LabelImage cluster_ids(union_img.width(), union_img.height(), -1);
    return walk(union_img, {}, cluster_ids, {}, opt);
}

}  // namespace neurite
