#include "neurite/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace neurite {

const char* to_string(Stage stage) {
    switch (stage) {
        case Stage::Io: return "io";
        case Stage::Preprocess: return "preprocess";
        case Stage::Track: return "track";
        case Stage::Contour: return "contour";
        case Stage::Write: return "write";
    }
    return "unknown";
}

void PipelineConfig::validate() const {
    if (decompose.soma_erosion_radius < 0 || decompose.soma_dilation_radius < 0)
        throw Error("config: radii must be >= 0");
    if (decompose.soma_min_area < 0 || decompose.skel_min_area < 0 || decompose.spur_len < 0)
        throw Error("config: areas and lengths must be >= 0");
    if (tracker.bfs_stop_C < 1) throw Error("config: bfs stop C must be >= 1");
    if (tracker.lookback_K < 1) throw Error("config: lookback K must be >= 1");
    if (tracker.d_max < 0) throw Error("config: d_max must be >= 0");
    if (!(tracker.cos_eps > 0.0 && tracker.cos_eps < 1.0)) throw Error("config: cos_eps must be in (0, 1)");
    if (pad < 0) throw Error("config: pad must be >= 0");
}

namespace {

GrayImage pad_gray(const GrayImage& gray, int pad, std::uint8_t fill) {
    if (pad == 0) return gray;
    GrayImage out(gray.width() + 2 * pad, gray.height() + 2 * pad, fill);
    for (int y = 0; y < gray.height(); ++y)
        for (int x = 0; x < gray.width(); ++x) out(x + pad, y + pad) = gray(x, y);
    return out;
}

RunReport build_report(const PipelineResult& r, int pad) {
    RunReport rep;
    rep.width = r.binary.width() - 2 * pad;
    rep.height = r.binary.height() - 2 * pad;
    rep.branch_count = r.state.branch_count;
    rep.label_count = r.state.next_label - 1;
    rep.region_count = static_cast<int>(r.state.regions.size());
    for (const auto& reg : r.state.regions) {
        if (reg.kind == RegionKind::Unclassified) ++rep.unclassified_regions;
        Pixel at = reg.pixels.empty() ? Pixel{0, 0} : reg.pixels.front();
        rep.regions.push_back({reg.id, reg.kind, {at.x - pad, at.y - pad}, reg.partner.value_or(-1)});
    }
    rep.continuation_pairs = r.state.continuations.pairing_count();
    for (auto [a, b] : r.state.continuations.pairs)
        rep.continuations.push_back({{a.x - pad, a.y - pad}, {b.x - pad, b.y - pad}});
    rep.contour_points = r.contour.size();
    rep.contour_closed = r.contour.closed;
    rep.bridge_events = r.contour.bridge_events;
    if (r.traditional) rep.traditional_points = r.traditional->size();
    return rep;
}

void shift_contour(ParametricContour& c, int pad) {
    for (auto& p : c.points) {
        p.x -= pad;
        p.y -= pad;
    }
    for (auto& u : c.consumptions) {
        u.from_v.x -= pad;
        u.from_v.y -= pad;
        u.to_v.x -= pad;
        u.to_v.y -= pad;
    }
}

}  // namespace

PipelineResult run_pipeline_on_mask(const BinaryImage& mask, const PipelineConfig& cfg) {
    GrayImage g = to_gray(mask);
    PipelineConfig c = cfg;
    c.binarize.policy = ThresholdPolicy::Fixed;
    c.binarize.threshold = 128;
    c.binarize.polarity = Polarity::BrightIsForeground;
    return run_pipeline_on_image(g, c);
}

PipelineResult run_pipeline_on_image(const GrayImage& gray, const PipelineConfig& cfg) {
    cfg.validate();
    PipelineResult r;
    const auto t0 = std::chrono::steady_clock::now();

    const std::uint8_t fill = cfg.binarize.polarity == Polarity::BrightIsForeground ? 0 : 255;
    GrayImage padded = pad_gray(gray, cfg.pad, fill);

    try {
        r.binary = binarize(padded, cfg.binarize);
        r.components = decompose(r.binary, cfg.decompose);
    } catch (const Error& e) {
        throw StageError(Stage::Preprocess, e.what());
    }

    try {
        TrackerConfig tc = cfg.tracker;
        tc.record_bfs_traces = cfg.emit_bfs_trace || tc.record_bfs_traces;
        r.state = track_all(r.components, tc);
    } catch (const Error& e) {
        throw StageError(Stage::Track, e.what());
    }

    try {
        r.union_image = make_union_image(r.components, r.state);
        r.contour = extract_contour(r.union_image, r.state.regions, r.state.cluster_ids,
                                    r.state.continuations);
        r.traditional = extract_contour_traditional(r.union_image);
    } catch (const Error& e) {
        throw StageError(Stage::Contour, e.what());
    }

    shift_contour(r.contour, cfg.pad);
    if (r.traditional) shift_contour(*r.traditional, cfg.pad);
    r.report = build_report(r, cfg.pad);
    r.report.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void write_contour(const ParametricContour& contour, const std::string& path) {
    if (!contour.closed) throw Error("refusing to write an open contour");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "t,x,y,bridge\n";
    for (size_t i = 0; i < contour.points.size(); ++i)
        out << i + 1 << "," << contour.points[i].x << "," << contour.points[i].y << ","
            << int(contour.bridge[i]) << "\n";
    if (!out) throw Error("write failed: " + path);
}

void label_color(int label, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b) {
    const double hue = std::fmod(double(label) * 0.61803398875, 1.0) * 6.0;
    const double s = 0.85, v = 0.80;
    const int i = int(hue);
    const double f = hue - i;
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    double rr = v, gg = t, bb = p;
    switch (i % 6) {
        case 0: rr = v; gg = t; bb = p; break;
        case 1: rr = q; gg = v; bb = p; break;
        case 2: rr = p; gg = v; bb = t; break;
        case 3: rr = p; gg = q; bb = v; break;
        case 4: rr = t; gg = p; bb = v; break;
        case 5: rr = v; gg = p; bb = q; break;
    }
    r = std::uint8_t(rr * 255);
    g = std::uint8_t(gg * 255);
    b = std::uint8_t(bb * 255);
}

RgbImage render_overlay(const ComponentSet& components, const TrackState& state,
                        const ParametricContour& contour, int width, int height, Pixel shift) {
    RgbImage img(width, height, 255, 255, 255);
    auto kind_color = [](RegionKind k, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b) {
        switch (k) {
            case RegionKind::Crossing: r = 220; g = 30; b = 30; break;
            case RegionKind::Superposition: r = 240; g = 140; b = 0; break;
            case RegionKind::Unclassified: r = 200; g = 0; b = 200; break;
            default: r = 0; g = 150; b = 60; break;  // bifurcation family
        }
    };

    for (int y = 0; y < state.labels.height(); ++y)
        for (int x = 0; x < state.labels.width(); ++x) {
            const int px = x - shift.x, py = y - shift.y;
            if (components.soma.at(x, y) != 0 || components.soma_link.at(x, y) != 0)
                img.set(px, py, 120, 120, 120);
            else if (state.labels(x, y) > 0) {
                std::uint8_t r, g, b;
                label_color(state.labels(x, y), r, g, b);
                img.set(px, py, r, g, b);
            } else if (state.cluster_ids(x, y) >= 0) {
                std::uint8_t r, g, b;
                kind_color(state.regions[state.cluster_ids(x, y)].kind, r, g, b);
                img.set(px, py, r, g, b);
            }
        }

    for (size_t i = 0; i < contour.points.size(); ++i) {
        const Pixel p = contour.points[i];
        if (contour.bridge[i])
            img.set(p.x, p.y, 40, 60, 230);
        else
            img.set(p.x, p.y, 20, 20, 20);
    }
    return img;
}

void render_overlay(const ComponentSet& components, const TrackState& state, const ParametricContour& contour,
                    int width, int height, Pixel shift, const std::string& path) {
    write_png(render_overlay(components, state, contour, width, height, shift), path);
}

std::string report_to_string(const RunReport& rep) {
    std::ostringstream out;
    out << "input: " << rep.input << "\n";
    out << "width: " << rep.width << "\n";
    out << "height: " << rep.height << "\n";
    out << "branch_count: " << rep.branch_count << "\n";
    out << "label_count: " << rep.label_count << "\n";
    out << "region_count: " << rep.region_count << "\n";
    out << "unclassified_regions: " << rep.unclassified_regions << "\n";
    out << "unreached_pixels: " << rep.unreached_pixels << "\n";
    out << "continuation_pairs: " << rep.continuation_pairs << "\n";
    out << "contour_points: " << rep.contour_points << "\n";
    out << "contour_closed: " << (rep.contour_closed ? "true" : "false") << "\n";
    out << "bridge_events: " << rep.bridge_events << "\n";
    out << "traditional_points: " << rep.traditional_points << "\n";
    out << "[regions]\n";
    out << "id kind x y partner\n";
    for (const auto& r : rep.regions)
        out << r.id << " " << to_string(r.kind) << " " << r.at.x << " " << r.at.y << " " << r.partner << "\n";
    out << "[continuations]\n";
    out << "x1 y1 x2 y2\n";
    for (const auto& [a, b] : rep.continuations)
        out << a.x << " " << a.y << " " << b.x << " " << b.y << "\n";
    return out.str();
}

RunReport run_pipeline(const std::string& input_path, const PipelineConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;

    GrayImage gray;
    PipelineConfig effective = cfg;
    std::optional<BinaryImage> generated;
    try {
        if (fs::path(input_path).extension() == ".shape") {
            auto [mask, truth] = generate(parse_shape_file(input_path));
            generated = mask;
            gray = to_gray(mask);
            effective.binarize.policy = ThresholdPolicy::Fixed;
            effective.binarize.threshold = 128;
            effective.binarize.polarity = Polarity::BrightIsForeground;
        } else {
            gray = read_image(input_path);
        }
    } catch (const Error& e) {
        throw StageError(Stage::Io, e.what());
    }

    PipelineResult result = run_pipeline_on_image(gray, effective);
    result.report.input = input_path;

    try {
        const fs::path dir = fs::path(out_dir) / fs::path(input_path).stem();
        fs::create_directories(dir);
        write_contour(result.contour, (dir / "contour.csv").string());
        std::ofstream rep(dir / "report.txt", std::ios::binary);
        rep << report_to_string(result.report);
        if (!rep) throw Error("cannot write report");
        rep.close();
        std::ofstream timing(dir / "timing.txt", std::ios::binary);
        timing << "wall_time_ms: " << result.report.wall_time_ms << "\n";
        if (generated) write_pgm(to_gray(*generated), (dir / "input.pgm").string());
        if (cfg.emit_traditional && result.traditional)
            write_contour(*result.traditional, (dir / "contour_traditional.csv").string());
        if (cfg.emit_overlay) {
            const Pixel shift{effective.pad, effective.pad};
            render_overlay(result.components, result.state, result.contour, result.report.width,
                           result.report.height, shift, (dir / "overlay.png").string());
            if (result.traditional) {
                ParametricContour shifted = *result.traditional;
                render_overlay(result.components, result.state, shifted, result.report.width,
                               result.report.height, shift, (dir / "overlay_traditional.png").string());
            }
        }
        if (cfg.emit_bfs_trace) {
            std::ofstream tr(dir / "bfs_trace.txt", std::ios::binary);
            for (const auto& rec : result.state.bfs_traces) {
                tr << "region " << rec.region << "\n";
                tr << "state current queue B sigma\n";
                for (const auto& line : format_bfs_trace(rec.rows, rec.order)) tr << line << "\n";
                tr << "\n";
            }
        }
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(Stage::Write, e.what());
    }
    return result.report;
}

void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        if (eq == std::string::npos) throw Error("config line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r\n");
            const auto b = s.find_last_not_of(" \t\r\n");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto as_int = [&] { return std::stoi(value); };
        auto as_double = [&] { return std::stod(value); };

        if (key == "soma-erosion-radius") cfg.decompose.soma_erosion_radius = as_int();
        else if (key == "soma-dilation-radius") cfg.decompose.soma_dilation_radius = as_int();
        else if (key == "soma-min-area") cfg.decompose.soma_min_area = as_int();
        else if (key == "skel-min-area") cfg.decompose.skel_min_area = as_int();
        else if (key == "spur-len") cfg.decompose.spur_len = as_int();
        else if (key == "bfs-stop") cfg.tracker.bfs_stop_C = as_int();
        else if (key == "lookback") cfg.tracker.lookback_K = as_int();
        else if (key == "d-max") cfg.tracker.d_max = as_int();
        else if (key == "cos-eps") cfg.tracker.cos_eps = as_double();
        else if (key == "max-bfs-pixels") cfg.tracker.max_bfs_pixels = as_int();
        else if (key == "tie-break")
            cfg.tracker.tie_break = value == "highest" ? TieBreak::HighestIndex : TieBreak::LowestIndex;
        else if (key == "threshold") {
            cfg.binarize.policy = ThresholdPolicy::Fixed;
            cfg.binarize.threshold = as_int();
        } else if (key == "polarity")
            cfg.binarize.polarity = value == "dark" ? Polarity::DarkIsForeground : Polarity::BrightIsForeground;
        else if (key == "pad") cfg.pad = as_int();
        else throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
}

}  // namespace neurite
