#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cstdint>
#include <vector>

#include "neurite/error.hpp"

namespace neurite {

/// Integer pixel coordinate, x = column, y = row (y grows downward).
struct Pixel {
    int x = 0;
    int y = 0;

    friend bool operator==(const Pixel& a, const Pixel& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Pixel& a, const Pixel& b) { return !(a == b); }
    friend bool operator<(const Pixel& a, const Pixel& b) {
        return a.y != b.y ? a.y < b.y : a.x < b.x;  // raster order
    }
};

/// Dense 2D pixel grid backed by an Eigen array, indexed (x, y).
/// at() is bounds-checked and treats out-of-image coordinates as background (0).
template <typename Scalar>
class Image {
public:
    using Storage = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    Image() = default;

    Image(int width, int height, Scalar fill = Scalar{0}) {
        if (width <= 0 || height <= 0) throw Error("empty input: image dimensions must be positive");
        data_ = Storage::Constant(height, width, fill);
    }

    explicit Image(Storage data) : data_(std::move(data)) {}

    int width() const { return static_cast<int>(data_.cols()); }
    int height() const { return static_cast<int>(data_.rows()); }
    bool empty() const { return data_.size() == 0; }

    bool contains(int x, int y) const { return x >= 0 && x < width() && y >= 0 && y < height(); }
    bool contains(Pixel p) const { return contains(p.x, p.y); }

    Scalar at(int x, int y) const { return contains(x, y) ? data_(y, x) : Scalar{0}; }
    Scalar at(Pixel p) const { return at(p.x, p.y); }

    Scalar& operator()(int x, int y) {
        assert(contains(x, y));
        return data_(y, x);
    }
    const Scalar& operator()(int x, int y) const {
        assert(contains(x, y));
        return data_(y, x);
    }
    Scalar& operator()(Pixel p) { return (*this)(p.x, p.y); }
    const Scalar& operator()(Pixel p) const { return (*this)(p.x, p.y); }

    Storage& data() { return data_; }
    const Storage& data() const { return data_; }

    std::int64_t count_nonzero() const { return (data_ != Scalar{0}).count(); }

    friend bool operator==(const Image& a, const Image& b) {
        if (a.width() != b.width() || a.height() != b.height()) return false;
        if (a.empty()) return true;
        return (a.data_ == b.data_).all();
    }
    friend bool operator!=(const Image& a, const Image& b) { return !(a == b); }

private:
    Storage data_;
};

using BinaryImage = Image<std::uint8_t>;  // 0 = background, nonzero = foreground
using GrayImage = Image<std::uint8_t>;
using LabelImage = Image<std::int32_t>;

inline bool foreground(const BinaryImage& img, Pixel p) { return img.at(p) != 0; }

/// Count of foreground pixels among the 8 neighbors of (x, y).
inline int neighbor_count8(const BinaryImage& img, int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (img.at(x + dx, y + dy) != 0) ++n;
        }
    return n;
}
inline int neighbor_count8(const BinaryImage& img, Pixel p) { return neighbor_count8(img, p.x, p.y); }

/// All foreground pixels in raster order.
inline std::vector<Pixel> foreground_pixels(const BinaryImage& img) {
    std::vector<Pixel> out;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            if (img(x, y) != 0) out.push_back({x, y});
    return out;
}

inline BinaryImage mask_and(const BinaryImage& a, const BinaryImage& b) {
    BinaryImage out(a.width(), a.height());
    out.data() = ((a.data() != 0) && (b.data() != 0)).cast<std::uint8_t>();
    return out;
}

inline BinaryImage mask_or(const BinaryImage& a, const BinaryImage& b) {
    BinaryImage out(a.width(), a.height());
    out.data() = ((a.data() != 0) || (b.data() != 0)).cast<std::uint8_t>();
    return out;
}

/// a minus b.
inline BinaryImage mask_diff(const BinaryImage& a, const BinaryImage& b) {
    BinaryImage out(a.width(), a.height());
    out.data() = ((a.data() != 0) && (b.data() == 0)).cast<std::uint8_t>();
    return out;
}

inline BinaryImage mask_not(const BinaryImage& a) {
    BinaryImage out(a.width(), a.height());
    out.data() = (a.data() == 0).cast<std::uint8_t>();
    return out;
}

}  // namespace neurite
