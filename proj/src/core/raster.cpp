#include "core/raster.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace sess {

namespace {

double srgb_linearize(std::uint8_t c8) {
    const double c = c8 / 255.0;
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    // CIE 1976 cube-root with the linear toe below (6/29)^3.
    constexpr double kToe = 216.0 / 24389.0;
    constexpr double kKappa = 24389.0 / 27.0;
    if (t > kToe) {
        return std::cbrt(t);
    }
    return (kKappa * t + 16.0) / 116.0;
}

float clamp_unit(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

}  // namespace

LabImage rgb_to_lab(const RgbImage& img) {
    LabImage out(img.width, img.height);
    // D65 reference white in the nominal sRGB matrix space.
    constexpr double wx = 0.95047, wy = 1.0, wz = 1.08883;
    for (std::size_t p = 0; p < img.pixels(); ++p) {
        const double r = srgb_linearize(img.data[p * 3 + 0]);
        const double g = srgb_linearize(img.data[p * 3 + 1]);
        const double b = srgb_linearize(img.data[p * 3 + 2]);

        const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
        const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
        const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

        const double fx = lab_f(x / wx);
        const double fy = lab_f(y / wy);
        const double fz = lab_f(z / wz);

        const double L = 116.0 * fy - 16.0;
        const double a = 500.0 * (fx - fy);
        const double bb = 200.0 * (fy - fz);

        out.data[p * 3 + 0] = clamp_unit(L / 100.0);
        out.data[p * 3 + 1] = clamp_unit((a + 128.0) / 255.0);
        out.data[p * 3 + 2] = clamp_unit((bb + 128.0) / 255.0);
    }
    return out;
}

int saliency_bin(double value) {
    const long bin = std::lround(value * 255.0);
    return static_cast<int>(std::clamp(bin, 0L, 255L));
}

double otsu_threshold(const SaliencyMap& map) {
    if (map.pixels() == 0) {
        throw InvalidArgument("otsu_threshold: empty map");
    }
    std::array<std::int64_t, 256> hist{};
    for (double v : map.data) {
        ++hist[saliency_bin(v)];
    }

    int occupied = 0;
    int single_bin = 0;
    for (int b = 0; b < 256; ++b) {
        if (hist[b] > 0) {
            ++occupied;
            single_bin = b;
        }
    }
    if (occupied == 1) {
        return single_bin / 255.0;
    }

    const double total = static_cast<double>(map.pixels());
    double total_mean = 0.0;
    for (int b = 0; b < 256; ++b) {
        total_mean += static_cast<double>(b) * hist[b];
    }
    total_mean /= total;

    // Threshold t puts bins < t in the background class and bins >= t in the
    // foreground class; variance of an empty class contributes zero weight.
    int best_t = 0;
    double best_var = -1.0;
    double w0 = 0.0;
    double sum0 = 0.0;
    for (int t = 0; t < 256; ++t) {
        const double w1 = total - w0;
        double var = 0.0;
        if (w0 > 0.0 && w1 > 0.0) {
            const double mu0 = sum0 / w0;
            const double mu1 = (total_mean * total - sum0) / w1;
            var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        }
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
        w0 += static_cast<double>(hist[t]);
        sum0 += static_cast<double>(t) * hist[t];
    }
    return best_t / 255.0;
}

ComponentLabels connected_components(const BinaryMask& mask) {
    ComponentLabels out;
    out.labels.assign(mask.pixels(), 0);
    if (mask.pixels() == 0) {
        return out;
    }

    static constexpr int dx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int dy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

    std::vector<std::int32_t> stack;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.data[idx] || out.labels[idx] != 0) {
                continue;
            }
            const std::int32_t label = ++out.count;
            out.labels[idx] = label;
            stack.push_back(static_cast<std::int32_t>(idx));
            while (!stack.empty()) {
                const std::int32_t cur = stack.back();
                stack.pop_back();
                const int cx = cur % mask.width;
                const int cy = cur / mask.width;
                for (int k = 0; k < 8; ++k) {
                    const int nx = cx + dx[k];
                    const int ny = cy + dy[k];
                    if (nx < 0 || ny < 0 || nx >= mask.width || ny >= mask.height) {
                        continue;
                    }
                    const std::size_t nidx = static_cast<std::size_t>(ny) * mask.width + nx;
                    if (mask.data[nidx] && out.labels[nidx] == 0) {
                        out.labels[nidx] = label;
                        stack.push_back(static_cast<std::int32_t>(nidx));
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace sess
