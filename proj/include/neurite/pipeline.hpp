#pragma once

#include <optional>
#include <string>
#include <vector>

#include "neurite/contour.hpp"
#include "neurite/io.hpp"
#include "neurite/synth.hpp"

namespace neurite {

enum class Stage { Io = 1, Preprocess = 2, Track = 3, Contour = 4, Write = 5 };

const char* to_string(Stage stage);

/// Error carrying the pipeline stage it occurred in; the CLI maps the stage
/// to its exit status.
class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what)
        : Error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

struct PipelineConfig {
    DecomposeConfig decompose;
    TrackerConfig tracker;
    BinarizeOptions binarize;
    int pad = 2;  // background margin added around the input
    bool emit_overlay = false;
    bool emit_traditional = false;
    bool emit_bfs_trace = false;

    void validate() const;  // throws on out-of-range values
};

struct RunReport {
    std::string input;
    int width = 0;
    int height = 0;
    int branch_count = 0;
    int label_count = 0;
    int region_count = 0;
    int unclassified_regions = 0;
    int unreached_pixels = 0;
    int continuation_pairs = 0;
    int contour_points = 0;
    bool contour_closed = false;
    int bridge_events = 0;
    int traditional_points = 0;
    double wall_time_ms = 0.0;  // reported separately, never in the golden report text

    struct Region {
        int id = 0;
        RegionKind kind = RegionKind::Unclassified;
        Pixel at;
        int partner = -1;
    };
    std::vector<Region> regions;
    std::vector<std::pair<Pixel, Pixel>> continuations;
};

/// Full in-memory artifacts, for library callers and tests.
struct PipelineResult {
    BinaryImage binary;
    ComponentSet components;
    TrackState state;
    LabelImage union_image;
    ParametricContour contour;
    std::optional<ParametricContour> traditional;
    RunReport report;
};

/// Runs binarize -> decompose -> track -> contour on an in-memory image.
/// Coordinates in the report and contour are relative to the unpadded input.
PipelineResult run_pipeline_on_image(const GrayImage& gray, const PipelineConfig& cfg);
PipelineResult run_pipeline_on_mask(const BinaryImage& mask, const PipelineConfig& cfg);

/// File front end: reads `input_path` (PNM/PNG, or a .shape generator spec),
/// writes report.txt, contour.csv, timing.txt and the requested overlays
/// into `out_dir/<input stem>/`.
RunReport run_pipeline(const std::string& input_path, const PipelineConfig& cfg, const std::string& out_dir);

/// Plain-text table `t,x,y,bridge`, one row per contour sample, LF newlines.
void write_contour(const ParametricContour& contour, const std::string& path);

/// Raster overlay: input in gray, one color per label, critical regions
/// tinted by kind, contour as a one-pixel trace.
RgbImage render_overlay(const ComponentSet& components, const TrackState& state,
                        const ParametricContour& contour, int width, int height, Pixel origin_shift);
void render_overlay(const ComponentSet& components, const TrackState& state, const ParametricContour& contour,
                    int width, int height, Pixel origin_shift, const std::string& path);

std::string report_to_string(const RunReport& report);

/// key = value lines, # comments. Unknown keys are rejected.
void apply_config_file(PipelineConfig& cfg, const std::string& path);

/// Distinct color per label, stable across runs.
void label_color(int label, std::uint8_t& r, std::uint8_t& g, std::uint8_t& b);

}  // namespace neurite
