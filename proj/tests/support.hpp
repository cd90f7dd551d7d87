#pragma once

// Shared helpers for the test binaries: deterministic synthetic rasters and
// scratch directories.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "core/raster.hpp"

namespace sess::test {

inline std::filesystem::path scratch_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("sess_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Position-stable hash noise in [-1, 1]; high-frequency, so superpixel mean
/// colors stay tight while individual pixels differ.
inline double pixel_noise(int x, int y, int channel) {
    std::uint32_t v = static_cast<std::uint32_t>(x) * 73856093u ^
                      static_cast<std::uint32_t>(y) * 19349663u ^
                      static_cast<std::uint32_t>(channel + 1) * 83492791u;
    v ^= v >> 13;
    v *= 2654435761u;
    v ^= v >> 16;
    return (v % 2001) / 1000.0 - 1.0;
}

/// Flat color field with per-pixel hash noise of the given amplitude.
inline RgbImage noisy_image(int width, int height, std::array<int, 3> base, int amplitude) {
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            std::uint8_t* px = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = base[c] + amplitude * pixel_noise(x, y, c);
                px[c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }
    return img;
}

/// Background with a mild low-frequency color texture; keeps superpixel mean
/// colors distinct without creating visible structure.
inline RgbImage textured_image(int width, int height, std::array<int, 3> base, int amplitude) {
    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double wave = std::sin(x * 0.11) * std::cos(y * 0.07) +
                                0.5 * std::sin((x + 2.0 * y) * 0.031);
            std::uint8_t* px = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = base[c] + amplitude * wave * (c == 1 ? 0.8 : 1.0);
                px[c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }
    return img;
}

inline void draw_disk(RgbImage& img, int cx, int cy, int radius, std::array<int, 3> color,
                      int noise_amplitude = 0) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const long dx = x - cx;
            const long dy = y - cy;
            if (dx * dx + dy * dy <= static_cast<long>(radius) * radius) {
                std::uint8_t* px = img.at(x, y);
                for (int c = 0; c < 3; ++c) {
                    const double v = color[c] + noise_amplitude * pixel_noise(x, y, c);
                    px[c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
                }
            }
        }
    }
}

inline void draw_rect(RgbImage& img, int x0, int y0, int w, int h, std::array<int, 3> color,
                      int noise_amplitude = 0) {
    for (int y = y0; y < std::min(img.height, y0 + h); ++y) {
        for (int x = x0; x < std::min(img.width, x0 + w); ++x) {
            std::uint8_t* px = img.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double v = color[c] + noise_amplitude * pixel_noise(x, y, c);
                px[c] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }
}

/// Canonical completion scene: a near-uniform noisy background, salient
/// disks, and a few small decoy patches of intermediate colors that give the
/// color model a usable dynamic range.
inline RgbImage completion_scene(int width, int height) {
    RgbImage img = noisy_image(width, height, {202, 202, 206}, 1);
    const int pw = std::max(4, width / 24);
    draw_rect(img, width / 16, height / 16, pw, pw, {204, 150, 130}, 1);
    draw_rect(img, width - width / 16 - pw, height / 16, pw, pw, {160, 120, 114}, 1);
    draw_rect(img, width / 16, height - height / 16 - pw, pw, pw, {188, 170, 150}, 1);
    return img;
}

inline void fill_disk(SaliencyMap& map, int cx, int cy, int radius, double value) {
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const long dx = x - cx;
            const long dy = y - cy;
            if (dx * dx + dy * dy <= static_cast<long>(radius) * radius) {
                map.at(x, y) = value;
            }
        }
    }
}

inline bool inside_disk(int x, int y, int cx, int cy, int radius) {
    const long dx = x - cx;
    const long dy = y - cy;
    return dx * dx + dy * dy <= static_cast<long>(radius) * radius;
}

/// Random multi-region image: a smooth background plus a few random color
/// rectangles and disks. Stands in for natural photos in forest tests.
inline RgbImage random_scene(int width, int height, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> channel(40, 215);
    RgbImage img = textured_image(width, height, {channel(rng), channel(rng), channel(rng)}, 18);
    std::uniform_int_distribution<int> px(0, width - 1);
    std::uniform_int_distribution<int> py(0, height - 1);
    std::uniform_int_distribution<int> extent(std::min(width, height) / 8,
                                              std::min(width, height) / 3);
    const int shapes = 3 + static_cast<int>(rng() % 4);
    for (int s = 0; s < shapes; ++s) {
        const std::array<int, 3> color{channel(rng), channel(rng), channel(rng)};
        if (rng() % 2 == 0) {
            draw_disk(img, px(rng), py(rng), extent(rng), color, 6);
        } else {
            const int x0 = px(rng);
            const int y0 = py(rng);
            const int w = extent(rng);
            const int h = extent(rng);
            for (int y = y0; y < std::min(height, y0 + h); ++y) {
                for (int x = x0; x < std::min(width, x0 + w); ++x) {
                    std::uint8_t* p = img.at(x, y);
                    p[0] = static_cast<std::uint8_t>(color[0]);
                    p[1] = static_cast<std::uint8_t>(color[1]);
                    p[2] = static_cast<std::uint8_t>(color[2]);
                }
            }
        }
    }
    return img;
}

inline SaliencyMap random_map(int width, int height, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> byte(0, 255);
    SaliencyMap map(width, height);
    for (double& v : map.data) {
        v = byte(rng) / 255.0;
    }
    return map;
}

}  // namespace sess::test
