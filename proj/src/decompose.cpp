#include "neurite/decompose.hpp"

#include <algorithm>
#include <deque>

#include "neurite/chain.hpp"

namespace neurite {

BinaryImage extract_soma(const BinaryImage& img, int erosion_radius, int dilation_radius, int min_area) {
    if (img.empty()) throw Error("empty input");
    BinaryImage core = erode(img, StructuringElement::disk(erosion_radius));
    core = area_open(core, std::max(min_area, 1));
    core = dilate(core, StructuringElement::disk(dilation_radius));

    int count = 0;
    LabelImage labels = label_components(core, &count);
    if (count == 0) throw SomaNotFound();

    std::vector<std::int64_t> area(count + 1, 0);
    for (int y = 0; y < core.height(); ++y)
        for (int x = 0; x < core.width(); ++x) ++area[labels(x, y)];
    int best = 1;
    for (int i = 2; i <= count; ++i)
        if (area[i] > area[best]) best = i;

    BinaryImage out(core.width(), core.height());
    out.data() = (labels.data() == best).cast<std::uint8_t>();
    return out;
}

BinaryImage extract_skeleton(const BinaryImage& img, const BinaryImage& soma, int spur_len, int min_skel_area) {
    BinaryImage skel = thin(img);
    if (soma.count_nonzero() > 0) {
        BinaryImage ring = dilate(soma, StructuringElement::disk(1));
        skel = mask_diff(skel, ring);
    }
    skel = area_open(skel, std::max(min_skel_area, 1));
    skel = prune_spurs(skel, spur_len);
    skel = prune_redundant(skel);
    return skel;
}

std::vector<CriticalCluster> find_critical_clusters(const BinaryImage& skel) {
    if (skel.empty()) return {};
    BinaryImage marked(skel.width(), skel.height(), 0);
    for (int y = 0; y < skel.height(); ++y)
        for (int x = 0; x < skel.width(); ++x)
            if (skel(x, y) != 0 && neighbor_count8(skel, x, y) > 2) marked(x, y) = 1;

    int count = 0;
    LabelImage labels = label_components(marked, &count);
    std::vector<CriticalCluster> clusters(count);
    for (int i = 0; i < count; ++i) clusters[i].id = i;
    for (int y = 0; y < skel.height(); ++y)
        for (int x = 0; x < skel.width(); ++x)
            if (labels(x, y) > 0) clusters[labels(x, y) - 1].pixels.push_back({x, y});
    return clusters;
}

std::vector<Pixel> find_terminations(const BinaryImage& skel) {
    std::vector<Pixel> out;
    for (int y = 0; y < skel.height(); ++y)
        for (int x = 0; x < skel.width(); ++x)
            if (skel(x, y) != 0 && neighbor_count8(skel, x, y) == 1) out.push_back({x, y});
    return out;
}

std::vector<Pixel> find_primary_seeds(const BinaryImage& skel, const BinaryImage& soma) {
    std::vector<Pixel> seeds;
    if (skel.count_nonzero() == 0) return seeds;

    int count = 0;
    LabelImage comp = label_components(skel, &count);

    if (soma.count_nonzero() == 0) {
        // Soma-less fallback: raster-first termination of each component.
        std::vector<Pixel> terms = find_terminations(skel);
        std::vector<bool> seen(count + 1, false);
        for (Pixel t : terms) {
            int c = comp(t);
            if (!seen[c]) {
                seen[c] = true;
                seeds.push_back(t);
            }
        }
        return seeds;
    }

    BinaryImage ring = dilate(soma, StructuringElement::disk(1));
    std::vector<bool> seen(count + 1, false);
    for (int y = 0; y < skel.height(); ++y)
        for (int x = 0; x < skel.width(); ++x) {
            if (skel(x, y) == 0 || seen[comp(x, y)]) continue;
            bool touches = false;
            for (int dy = -1; dy <= 1 && !touches; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (ring.at(x + dx, y + dy) != 0) {
                        touches = true;
                        break;
                    }
            if (touches) {
                seen[comp(x, y)] = true;
                seeds.push_back({x, y});
            }
        }
    return seeds;
}

ComponentSet decompose(const BinaryImage& img, const DecomposeConfig& cfg) {
    ComponentSet cs;
    try {
        cs.soma = extract_soma(img, cfg.soma_erosion_radius, cfg.soma_dilation_radius, cfg.soma_min_area);
    } catch (const SomaNotFound&) {
        cs.soma = BinaryImage(img.width(), img.height(), 0);
    }

    BinaryImage thinned = thin(img);
    if (cs.soma.count_nonzero() > 0) {
        BinaryImage ring = dilate(cs.soma, StructuringElement::disk(1));
        cs.soma_link = mask_diff(mask_and(thinned, ring), cs.soma);
        cs.skeleton = mask_diff(thinned, ring);
    } else {
        cs.soma_link = BinaryImage(img.width(), img.height(), 0);
        cs.skeleton = thinned;
    }
    cs.skeleton = area_open(cs.skeleton, std::max(cfg.skel_min_area, 1));
    cs.skeleton = prune_spurs(cs.skeleton, cfg.spur_len);
    cs.skeleton = prune_redundant(cs.skeleton);

    cs.critical_pixels = BinaryImage(img.width(), img.height(), 0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (cs.skeleton(x, y) != 0 && neighbor_count8(cs.skeleton, x, y) > 2) cs.critical_pixels(x, y) = 1;

    cs.terminations = find_terminations(cs.skeleton);
    cs.primary_seeds = find_primary_seeds(cs.skeleton, cs.soma);
    return cs;
}

LabelImage cluster_id_image(const std::vector<CriticalCluster>& clusters, int width, int height) {
    LabelImage ids(width, height, -1);
    for (const auto& c : clusters)
        for (Pixel p : c.pixels) ids(p) = c.id;
    return ids;
}

}  // namespace neurite
