#include "neurite/io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>

namespace neurite {

RgbImage::RgbImage(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h), data(size_t(w) * h * 3) {
    for (size_t i = 0; i < data.size(); i += 3) {
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
}

void RgbImage::set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || x >= width || y < 0 || y >= height) return;
    const size_t i = (size_t(y) * width + x) * 3;
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
}

namespace {

int next_pnm_value(std::istream& in) {
    while (in) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    return v;
}

GrayImage read_pnm(std::ifstream& in, const std::string& path) {
    char p = 0, type = 0;
    in.get(p);
    in.get(type);
    if (p != 'P' || type < '1' || type > '6') throw Error("unsupported image format: " + path);

    const int w = next_pnm_value(in);
    const int h = next_pnm_value(in);
    if (w <= 0 || h <= 0) throw Error("bad image header: " + path);
    int maxval = 1;
    if (type != '1' && type != '4') {
        maxval = next_pnm_value(in);
        if (maxval <= 0 || maxval > 255) throw Error("unsupported sample depth in " + path);
    }

    GrayImage img(w, h);
    const bool ascii = type <= '3';
    if (!ascii) in.get();  // single whitespace after the header

    auto scale = [&](int v) { return std::uint8_t(v * 255 / maxval); };
    if (type == '1' || type == '4') {
        if (type == '1') {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) img(x, y) = next_pnm_value(in) ? 0 : 255;
        } else {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; x += 8) {
                    const int byte = in.get();
                    for (int b = 0; b < 8 && x + b < w; ++b)
                        img(x + b, y) = (byte >> (7 - b)) & 1 ? 0 : 255;
                }
        }
    } else if (type == '2' || type == '5') {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const int v = type == '2' ? next_pnm_value(in) : in.get();
                img(x, y) = scale(v);
            }
    } else {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int r, g, b;
                if (type == '3') {
                    r = next_pnm_value(in);
                    g = next_pnm_value(in);
                    b = next_pnm_value(in);
                } else {
                    r = in.get();
                    g = in.get();
                    b = in.get();
                }
                img(x, y) = scale((r * 299 + g * 587 + b * 114) / 1000);
            }
    }
    if (!in) throw Error("truncated image data: " + path);
    return img;
}

GrayImage read_png_file(const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str()))
        throw Error("cannot read PNG: " + path + ": " + png.message);
    png.format = PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw Error("cannot decode PNG: " + path + ": " + msg);
    }
    GrayImage img(int(png.width), int(png.height));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) img(x, y) = buf[size_t(y) * png.width + x];
    return img;
}

}  // namespace

GrayImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    const int c0 = in.peek();
    if (c0 == 'P') return read_pnm(in, path);
    return read_png_file(path);
}

void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out.put(char(img(x, y)));
    if (!out) throw Error("write failed: " + path);
}

void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()), std::streamsize(img.data.size()));
    if (!out) throw Error("write failed: " + path);
}

void write_png(const RgbImage& img, const std::string& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = png_uint_32(img.width);
    png.height = png_uint_32(img.height);
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, img.data.data(), 0, nullptr))
        throw Error("cannot write PNG: " + path + ": " + png.message);
}

GrayImage to_gray(const BinaryImage& img) {
    GrayImage g(img.width(), img.height());
    g.data() = (img.data() != 0).cast<std::uint8_t>() * 255;
    return g;
}

}  // namespace neurite
