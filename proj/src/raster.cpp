#include "neurite/raster.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <numeric>

#include "neurite/chain.hpp"

namespace neurite {

StructuringElement StructuringElement::disk(int radius) {
    if (radius < 0) throw Error("disk radius must be >= 0");
    StructuringElement se;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) se.offsets.push_back({dx, dy});
    return se;
}

StructuringElement StructuringElement::reflected() const {
    StructuringElement se;
    se.offsets.reserve(offsets.size());
    for (Pixel o : offsets) se.offsets.push_back({-o.x, -o.y});
    return se;
}

bool StructuringElement::contains_origin() const {
    return std::find(offsets.begin(), offsets.end(), Pixel{0, 0}) != offsets.end();
}

HitOrMissTemplate::HitOrMissTemplate(std::vector<Pixel> h, std::vector<Pixel> m)
    : hits(std::move(h)), misses(std::move(m)) {
    for (Pixel p : hits) {
        if (p.x < -1 || p.x > 1 || p.y < -1 || p.y > 1) throw Error("hit-or-miss offset outside 3x3 window");
        if (std::find(misses.begin(), misses.end(), p) != misses.end())
            throw Error("hit-or-miss template: hits and misses overlap");
    }
    for (Pixel p : misses)
        if (p.x < -1 || p.x > 1 || p.y < -1 || p.y > 1) throw Error("hit-or-miss offset outside 3x3 window");
}

HitOrMissTemplate HitOrMissTemplate::rotated90() const {
    auto rot = [](Pixel p) { return Pixel{-p.y, p.x}; };  // quarter turn
    std::vector<Pixel> h, m;
    for (Pixel p : hits) h.push_back(rot(p));
    for (Pixel p : misses) m.push_back(rot(p));
    return HitOrMissTemplate(std::move(h), std::move(m));
}

std::vector<HitOrMissTemplate> HitOrMissTemplate::redundancy_set() {
    std::vector<HitOrMissTemplate> out;
    HitOrMissTemplate t({{0, 0}, {0, -1}, {-1, 0}}, {{1, 0}, {0, 1}});
    for (int i = 0; i < 4; ++i) {
        out.push_back(t);
        t = t.rotated90();
    }
    return out;
}

int otsu_threshold(const GrayImage& gray) {
    std::array<std::int64_t, 256> hist{};
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) ++hist[gray(x, y)];

    const std::int64_t total = std::int64_t(gray.width()) * gray.height();
    std::int64_t sum_all = 0;
    for (int v = 0; v < 256; ++v) sum_all += std::int64_t(v) * hist[v];

    // Minimising intra-class variance is equivalent to maximising the
    // between-class variance, which needs only running sums.
    int best_t = 0;
    double best_between = -1.0;
    std::int64_t w0 = 0, sum0 = 0;
    for (int t = 0; t < 256; ++t) {
        w0 += hist[t];
        sum0 += std::int64_t(t) * hist[t];
        const std::int64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = double(sum0) / double(w0);
        const double mu1 = double(sum_all - sum0) / double(w1);
        const double between = double(w0) * double(w1) * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_between) {
            best_between = between;
            best_t = t;
        }
    }
    return best_t;
}

BinaryImage binarize(const GrayImage& gray, const BinarizeOptions& opt) {
    if (gray.empty()) throw Error("empty input");
    const int t = opt.policy == ThresholdPolicy::Automatic ? otsu_threshold(gray) : opt.threshold;
    BinaryImage out(gray.width(), gray.height());
    if (opt.polarity == Polarity::BrightIsForeground)
        out.data() = (gray.data().cast<int>() > t).cast<std::uint8_t>();
    else
        out.data() = (gray.data().cast<int>() < t).cast<std::uint8_t>();
    return out;
}

BinaryImage erode(const BinaryImage& img, const StructuringElement& se) {
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool all = true;
            for (Pixel o : se.offsets)
                if (img.at(x + o.x, y + o.y) == 0) {
                    all = false;
                    break;
                }
            out(x, y) = all ? 1 : 0;
        }
    return out;
}

BinaryImage dilate(const BinaryImage& img, const StructuringElement& se) {
    const StructuringElement ref = se.reflected();
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool any = false;
            for (Pixel o : ref.offsets)
                if (img.at(x + o.x, y + o.y) != 0) {
                    any = true;
                    break;
                }
            out(x, y) = any ? 1 : 0;
        }
    return out;
}

LabelImage label_components(const BinaryImage& img, int* count) {
    if (img.empty()) {
        if (count) *count = 0;
        return LabelImage();
    }
    LabelImage labels(img.width(), img.height(), 0);
    int next = 0;
    std::deque<Pixel> queue;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            if (img(x, y) == 0 || labels(x, y) != 0) continue;
            ++next;
            labels(x, y) = next;
            queue.push_back({x, y});
            while (!queue.empty()) {
                Pixel p = queue.front();
                queue.pop_front();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        Pixel q{p.x + dx, p.y + dy};
                        if (!img.contains(q) || img(q) == 0 || labels(q) != 0) continue;
                        labels(q) = next;
                        queue.push_back(q);
                    }
            }
        }
    if (count) *count = next;
    return labels;
}

BinaryImage area_open(const BinaryImage& img, int min_area) {
    if (min_area < 1) throw Error("area_open: min_area must be >= 1");
    int count = 0;
    LabelImage labels = label_components(img, &count);
    std::vector<std::int64_t> area(count + 1, 0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) ++area[labels(x, y)];
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out(x, y) = (img(x, y) != 0 && area[labels(x, y)] >= min_area) ? 1 : 0;
    return out;
}

BinaryImage hit_or_miss(const BinaryImage& img, const HitOrMissTemplate& tpl) {
    BinaryImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            bool match = true;
            for (Pixel o : tpl.hits)
                if (img.at(x + o.x, y + o.y) == 0) {
                    match = false;
                    break;
                }
            if (match)
                for (Pixel o : tpl.misses)
                    if (img.at(x + o.x, y + o.y) != 0) {
                        match = false;
                        break;
                    }
            out(x, y) = match ? 1 : 0;
        }
    return out;
}

bool is_simple8(const BinaryImage& img, int x, int y) {
    // Ring cells clockwise starting at E; mask of foreground cells.
    std::array<Pixel, 8> ring;
    std::array<bool, 8> fg{};
    int n_fg = 0;
    for (int d = 1; d <= 8; ++d) {
        ring[d - 1] = {x + chain::kDx[d], y + chain::kDy[d]};
        fg[d - 1] = img.at(ring[d - 1]) != 0;
        if (fg[d - 1]) ++n_fg;
    }
    if (n_fg == 0) return false;

    // Foreground cells of the ring must form one 8-connected group.
    std::array<int, 8> comp;
    comp.fill(-1);
    int n_comp = 0;
    for (int i = 0; i < 8; ++i) {
        if (!fg[i] || comp[i] >= 0) continue;
        comp[i] = n_comp;
        std::vector<int> stack{i};
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (int b = 0; b < 8; ++b) {
                if (!fg[b] || comp[b] >= 0) continue;
                if (std::abs(ring[a].x - ring[b].x) <= 1 && std::abs(ring[a].y - ring[b].y) <= 1) {
                    comp[b] = n_comp;
                    stack.push_back(b);
                }
            }
        }
        ++n_comp;
    }
    if (n_comp != 1) return false;

    // Background cells 4-adjacent to the center must form one 4-connected
    // group within the ring (keeps holes intact).
    std::array<int, 8> bcomp;
    bcomp.fill(-1);
    int nb = 0;
    for (int i = 0; i < 8; ++i) {
        if (fg[i] || bcomp[i] >= 0) continue;
        bcomp[i] = nb;
        std::vector<int> stack{i};
        while (!stack.empty()) {
            int a = stack.back();
            stack.pop_back();
            for (int b = 0; b < 8; ++b) {
                if (fg[b] || bcomp[b] >= 0) continue;
                if (std::abs(ring[a].x - ring[b].x) + std::abs(ring[a].y - ring[b].y) == 1) {
                    bcomp[b] = nb;
                    stack.push_back(b);
                }
            }
        }
        ++nb;
    }
    int touching = 0;
    std::vector<bool> seen(nb, false);
    for (int d = 1; d <= 8; d += 2) {  // 4-neighbors are odd chain directions
        int i = d - 1;
        if (!fg[i] && !seen[bcomp[i]]) {
            seen[bcomp[i]] = true;
            ++touching;
        }
    }
    return touching == 1;
}

BinaryImage thin(const BinaryImage& img) {
    BinaryImage out = img;
    // Border direction per pass: a pixel qualifies when its neighbor in the
    // given chain direction is background.
    const std::array<int, 4> passes = {3, 7, 1, 5};  // N, S, E, W
    bool changed = true;
    while (changed) {
        changed = false;
        for (int dir : passes) {
            for (int y = 0; y < out.height(); ++y)
                for (int x = 0; x < out.width(); ++x) {
                    if (out(x, y) == 0) continue;
                    if (out.at(x + chain::kDx[dir], y + chain::kDy[dir]) != 0) continue;
                    if (neighbor_count8(out, x, y) < 2) continue;  // keep end points
                    if (!is_simple8(out, x, y)) continue;
                    out(x, y) = 0;
                    changed = true;
                }
        }
    }
    return out;
}

BinaryImage prune_redundant(const BinaryImage& skel, const std::vector<HitOrMissTemplate>& tpls) {
    BinaryImage out = skel;
    auto matches = [&](int x, int y) {
        for (const auto& t : tpls) {
            bool m = true;
            for (Pixel o : t.hits)
                if (out.at(x + o.x, y + o.y) == 0) {
                    m = false;
                    break;
                }
            if (m)
                for (Pixel o : t.misses)
                    if (out.at(x + o.x, y + o.y) != 0) {
                        m = false;
                        break;
                    }
            if (m) return true;
        }
        return false;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x) {
                if (out(x, y) == 0 || !matches(x, y)) continue;
                if (!is_simple8(out, x, y)) continue;  // never disconnect
                out(x, y) = 0;
                changed = true;
            }
    }
    return out;
}

BinaryImage prune_redundant(const BinaryImage& skel) {
    return prune_redundant(skel, HitOrMissTemplate::redundancy_set());
}

BinaryImage prune_spurs(const BinaryImage& skel, int max_spur_len) {
    BinaryImage out = skel;
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Pixel> terminations;
        for (int y = 0; y < out.height(); ++y)
            for (int x = 0; x < out.width(); ++x)
                if (out(x, y) != 0 && neighbor_count8(out, x, y) == 1) terminations.push_back({x, y});

        std::vector<Pixel> to_delete;
        for (Pixel t : terminations) {
            std::vector<Pixel> path{t};
            Pixel prev{-1, -1};
            Pixel cur = t;
            bool is_spur = false;
            while (int(path.size()) <= max_spur_len) {
                Pixel next{-1, -1};
                bool found = false;
                for (int d = 1; d <= 8 && !found; ++d) {
                    Pixel q = chain::step(cur, d);
                    if (q != prev && out.at(q) != 0) {
                        next = q;
                        found = true;
                    }
                }
                if (!found) break;  // bare line end: not a spur
                if (neighbor_count8(out, next.x, next.y) > 2) {
                    is_spur = true;  // reached a junction
                    break;
                }
                prev = cur;
                cur = next;
                path.push_back(cur);
            }
            if (is_spur) to_delete.insert(to_delete.end(), path.begin(), path.end());
        }
        for (Pixel p : to_delete)
            if (out(p) != 0) {
                out(p) = 0;
                changed = true;
            }
    }
    return out;
}

}  // namespace neurite
