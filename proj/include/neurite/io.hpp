#pragma once

#include <string>
#include <vector>

#include "neurite/image.hpp"

namespace neurite {

/// Interleaved 8-bit RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major

    RgbImage() = default;
    RgbImage(int w, int h, std::uint8_t r = 255, std::uint8_t g = 255, std::uint8_t b = 255);
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

/// Reads PGM/PPM/PBM (P1-P6) or PNG into an 8-bit gray image.
GrayImage read_image(const std::string& path);

void write_pgm(const GrayImage& img, const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);
void write_png(const RgbImage& img, const std::string& path);

GrayImage to_gray(const BinaryImage& img);  // foreground = 255

}  // namespace neurite
