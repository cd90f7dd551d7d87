#pragma once

#include <array>
#include <vector>

#include "core/raster.hpp"

namespace sess {

struct GroundTruth {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 0 or 1

    GroundTruth() = default;
    GroundTruth(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    bool at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x] != 0; }
    std::size_t foreground_count() const;
};

/// Binarizes a loaded mask file at 0.5.
GroundTruth binarize_ground_truth(const SaliencyMap& map);

struct PRPoint {
    int threshold = 0;  // binarize at threshold/255
    double precision = 0.0;
    double recall = 0.0;
};

using PRCurve = std::array<PRPoint, 256>;

struct MetricsReport {
    double mae = 0.0;
    double max_f = 0.0;
    double weighted_f = 0.0;
    double s_measure = 0.0;
    double e_measure = 0.0;
};

/// Mean absolute per-pixel difference.
double mae(const SaliencyMap& s, const GroundTruth& g);

/// Precision/recall at each of the 256 binarization thresholds; empty
/// predictions count as precision 1. Requires ground-truth foreground.
PRCurve pr_curve(const SaliencyMap& s, const GroundTruth& g);

/// Best F-measure over the curve, with beta^2 = 0.3.
double max_f(const PRCurve& curve);

/// Weighted F-measure: the error field is smoothed (Gaussian, sigma 5,
/// truncated at 4 sigma) and min-combined inside the foreground, and
/// amplified by proximity outside it, before weighted precision/recall.
double weighted_f(const SaliencyMap& s, const GroundTruth& g);

/// Structure measure: object-level mean/dispersion similarity blended with
/// region-level SSIM over the four quadrants at the ground-truth centroid.
double s_measure(const SaliencyMap& s, const GroundTruth& g);

/// Enhanced-alignment measure averaged over the 256 thresholds.
double e_measure(const SaliencyMap& s, const GroundTruth& g);

/// All five scores. Requires ground-truth foreground (callers skip empty
/// pairs).
MetricsReport evaluate_all(const SaliencyMap& s, const GroundTruth& g);

}  // namespace sess
