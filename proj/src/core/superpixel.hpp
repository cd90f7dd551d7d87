#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "core/raster.hpp"

namespace sess {

struct SuperpixelParams {
    double alpha = 12.0;  // feature-term weight
    double beta = 0.5;    // feature-term exponent
    double gamma = 10.0;  // saliency blending weight
    int iters = 5;        // seed-refinement rounds

    void validate() const;
};

struct SeedSet {
    std::vector<PixelCoord> positions;
    std::vector<std::uint8_t> object_flags;  // parallel to positions

    std::size_t size() const { return positions.size(); }
};

struct SuperpixelRecord {
    std::array<double, 3> mean_color{};  // mean Lab color F(S)
    int pixel_count = 0;
    double mean_saliency = 0.0;  // s(S) over the guiding map
    PixelCoord seed{};           // root of the optimum-path tree
};

struct Segmentation {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;  // 1..count(), every pixel labeled
    std::vector<SuperpixelRecord> records;

    int count() const { return static_cast<int>(records.size()); }
    std::int32_t label_at(int x, int y) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

/// Saliency-guided seed election. The object mask is the Otsu foreground of
/// `sal` (positive values only); n_s seeds per connected component go inside
/// it, the remainder outside. Deterministic; ties resolve in raster order.
SeedSet sample_seeds(const SaliencyMap& sal, int n, int n_s);

/// One Image Foresting Transform pass: a shortest-path spanning forest over
/// the 8-adjacent pixel grid. Arc cost into pixel t from a tree rooted at r:
///   (alpha * D(t, r))^beta + |coord(t) - coord(s)|
///   D(t, r) = |lab(t) - mu_r| * (1 + gamma * |sal(t) - sal(seed_r)|)
/// mu_r is the per-seed mean color (the seed pixel's own color when
/// mean_colors is absent). Equal path costs resolve first-in-first-out.
/// Fills labels, seeds and pixel counts; color/saliency stats are left to
/// the caller. path_costs, when given, receives the per-pixel optimum costs.
Segmentation ift_segment(const LabImage& lab, const SaliencyMap& sal, const SeedSet& seeds,
                         const std::vector<std::array<double, 3>>* mean_colors,
                         const SuperpixelParams& params,
                         std::vector<double>* path_costs = nullptr);

/// Moves every seed to the member pixel closest to its superpixel's centroid.
/// Idempotent for a fixed segmentation; object flags carry over by label.
SeedSet recenter_seeds(const Segmentation& seg, const SeedSet& seeds);

/// Mean Lab color of every superpixel.
std::vector<std::array<double, 3>> region_mean_colors(const LabImage& lab, const Segmentation& seg);

/// Mean saliency of every superpixel.
std::vector<double> region_mean_saliency(const SaliencyMap& sal, const Segmentation& seg);

/// Object-based iterative spanning forest: seed sampling plus `params.iters`
/// rounds of segmentation, color-model update and seed recentering. The
/// returned records carry mean color, pixel count and mean saliency.
Segmentation oisf(const LabImage& lab, const SaliencyMap& sal, int n, int n_s,
                  const SuperpixelParams& params);

}  // namespace sess
