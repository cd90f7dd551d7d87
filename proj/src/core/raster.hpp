#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sess {

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }

    std::uint8_t* at(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* at(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

/// CIELab raster with each channel rescaled to [0,1] (L/100, (a+128)/255, (b+128)/255).
struct LabImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    LabImage() = default;
    LabImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0.0f) {}

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }

    const float* at(int x, int y) const {
        return data.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    float* at(int x, int y) { return data.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
};

/// Per-pixel saliency in [0,1].
struct SaliencyMap {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    SaliencyMap() = default;
    SaliencyMap(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    bool same_size(const SaliencyMap& other) const {
        return width == other.width && height == other.height;
    }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }

    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { data[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
};

/// sRGB (D65) to CIELab, channels rescaled to [0,1].
LabImage rgb_to_lab(const RgbImage& img);

/// Quantizes to a 256-bin histogram and returns the bin boundary (bin/255) that
/// maximizes the inter-class variance of the split {v < t} / {v >= t}. Ties
/// resolve to the smallest threshold. A map whose mass sits in a single bin
/// returns that bin's boundary.
double otsu_threshold(const SaliencyMap& map);

/// Maps a saliency value to its histogram bin, consistent with otsu_threshold.
int saliency_bin(double value);

struct ComponentLabels {
    int count = 0;
    std::vector<std::int32_t> labels;  // 0 = background, 1..count = components
};

/// 8-connected components of the true pixels, labeled in raster-scan order.
ComponentLabels connected_components(const BinaryMask& mask);

}  // namespace sess
