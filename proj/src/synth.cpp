#include "neurite/synth.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "neurite/contour.hpp"

namespace neurite {

std::optional<RegionKind> expected_kind_for_theta(double theta_deg) {
    if (theta_deg >= 45.0) return RegionKind::Crossing;
    if (theta_deg < 30.0) return RegionKind::Superposition;
    return std::nullopt;
}

namespace {

void stroke(BinaryImage& img, Pixel a, Pixel b, int width) {
    std::vector<Pixel> line = a == b ? std::vector<Pixel>{a} : bresenham(a, b);
    const int r = std::max(0, (width - 1) / 2);
    const StructuringElement se = StructuringElement::disk(r);
    for (Pixel p : line)
        for (Pixel o : se.offsets) {
            Pixel q{p.x + o.x, p.y + o.y};
            if (img.contains(q)) img(q) = 1;
        }
}

void fill_disk(BinaryImage& img, Pixel c, int radius) {
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius && img.contains(c.x + dx, c.y + dy))
                img(c.x + dx, c.y + dy) = 1;
}

}  // namespace

std::pair<BinaryImage, GroundTruth> generate(const ShapeSpec& spec) {
    for (const auto& c : spec.crossings)
        if (c.theta_deg <= 0.0 || c.theta_deg > 90.0) throw Error("crossing angle must be in (0, 90]");
    for (const auto& b : spec.branches)
        if (b.points.size() < 2) throw Error("branch polyline needs at least two points");

    BinaryImage img(spec.width, spec.height, 0);
    GroundTruth truth;

    BinaryImage soma_zone(spec.width, spec.height, 0);
    if (spec.soma) {
        fill_disk(img, spec.soma->center, spec.soma->radius);
        fill_disk(soma_zone, spec.soma->center, spec.soma->radius + 2);
    }

    for (const auto& b : spec.branches) {
        const Pixel root = b.points.front();
        const bool on_soma = soma_zone.at(root) != 0;
        const bool on_stroke = !on_soma && img.at(root) != 0;
        if (on_stroke) truth.regions.push_back({root, b.expected_fork});
        for (size_t i = 0; i + 1 < b.points.size(); ++i) stroke(img, b.points[i], b.points[i + 1], b.width);
    }
    truth.branch_count = static_cast<int>(spec.branches.size());

    for (const auto& c : spec.crossings) {
        const double half = c.theta_deg * 0.5 * M_PI / 180.0;
        for (int sign : {-1, +1}) {
            const double dx = std::cos(sign * half) * c.arm_len;
            const double dy = std::sin(sign * half) * c.arm_len;
            Pixel a{c.at.x - int(std::lround(dx)), c.at.y - int(std::lround(dy))};
            Pixel b{c.at.x + int(std::lround(dx)), c.at.y + int(std::lround(dy))};
            stroke(img, a, b, c.width);
        }
        auto kind = expected_kind_for_theta(c.theta_deg);
        truth.regions.push_back({c.at, kind.value_or(RegionKind::Unclassified)});
    }
    truth.crossing_count = static_cast<int>(spec.crossings.size());

    // Intents that landed on top of each other merge into one record.
    std::vector<GroundTruth::Region> merged;
    for (const auto& r : truth.regions) {
        bool folded = false;
        for (auto& m : merged) {
            if (std::max(std::abs(m.at.x - r.at.x), std::abs(m.at.y - r.at.y)) < 4) {
                if (m.expected != r.expected) m.expected = RegionKind::Unclassified;
                folded = true;
                break;
            }
        }
        if (!folded) merged.push_back(r);
    }
    truth.regions = std::move(merged);
    return {std::move(img), std::move(truth)};
}

BinaryImage blur_and_rebinarize(const BinaryImage& img, double sigma) {
    if (sigma < 0.0) throw Error("sigma must be >= 0");
    if (sigma == 0.0) return img;

    const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-double(i) * i / (2.0 * sigma * sigma));
        sum += kernel[i + radius];
    }
    for (double& k : kernel) k /= sum;

    const int w = img.width();
    const int h = img.height();
    std::vector<double> tmp(size_t(w) * h, 0.0);
    std::vector<double> out(size_t(w) * h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0.0;
            for (int i = -radius; i <= radius; ++i) v += kernel[i + radius] * (img.at(x + i, y) ? 1.0 : 0.0);
            tmp[size_t(y) * w + x] = v;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = y + i;
                if (yy >= 0 && yy < h) v += kernel[i + radius] * tmp[size_t(yy) * w + x];
            }
            out[size_t(y) * w + x] = v;
        }

    BinaryImage result(w, h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) result(x, y) = out[size_t(y) * w + x] > 0.5 ? 1 : 0;
    return result;
}

ShapeSpec parse_shape_spec(std::istream& in) {
    ShapeSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string word;
        if (!(ss >> word)) continue;

        auto fail = [&](const std::string& why) {
            throw Error("shape file line " + std::to_string(lineno) + ": " + why);
        };
        if (word == "canvas") {
            if (!(ss >> spec.width >> spec.height)) fail("canvas needs W H");
        } else if (word == "seed") {
            if (!(ss >> spec.rng_seed)) fail("seed needs N");
        } else if (word == "soma") {
            SomaSpec s;
            if (!(ss >> s.center.x >> s.center.y >> s.radius)) fail("soma needs CX CY R");
            spec.soma = s;
        } else if (word == "branch") {
            BranchSpec b;
            if (!(ss >> b.width)) fail("branch needs W x1 y1 x2 y2 ...");
            int x, y;
            while (ss >> x >> y) b.points.push_back({x, y});
            if (b.points.size() < 2) fail("branch needs at least two points");
            spec.branches.push_back(std::move(b));
        } else if (word == "cross") {
            CrossingSpec c;
            if (!(ss >> c.at.x >> c.at.y >> c.theta_deg >> c.arm_len >> c.width))
                fail("cross needs X Y THETA ARMLEN W");
            spec.crossings.push_back(c);
        } else {
            fail("unknown primitive '" + word + "'");
        }
    }
    return spec;
}

ShapeSpec parse_shape_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open shape file: " + path);
    return parse_shape_spec(in);
}

}  // namespace neurite
