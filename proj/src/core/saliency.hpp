#pragma once

#include <vector>

#include "core/config.hpp"
#include "core/raster.hpp"
#include "core/superpixel.hpp"

namespace sess {

/// Superpixels split into foreground and background query lists at the Otsu
/// threshold psi of the previous saliency map (mean saliency >= psi is
/// foreground). Indices are 0-based record indices.
struct QueryPartition {
    std::vector<int> foreground;
    std::vector<int> background;
    double psi = 0.0;
};

QueryPartition partition_queries(const Segmentation& seg, const SaliencyMap& prev);

/// Gaussian-weighted color similarity exp(-|a - b| / sigma2). The exponent
/// divides the plain Euclidean distance by the variance.
double similarity(const std::array<double, 3>& a, const std::array<double, 3>& b, double sigma2);

/// Best similarity to any foreground query; foreground queries themselves are
/// rescaled to the best non-query score (all ones when every superpixel is a
/// query). Throws when the foreground list is empty.
std::vector<double> foreground_score(const Segmentation& seg, const QueryPartition& q,
                                     double sigma2);

/// One minus the mean similarity to the background queries; the divisor stays
/// |Q_B| even for a query scoring itself. Throws when the background list is
/// empty.
std::vector<double> background_score(const Segmentation& seg, const QueryPartition& q,
                                     double sigma2);

/// Pixel-weighted mean squared deviation of a background score field from 0.5.
double background_deviation(const std::vector<double>& sb, const Segmentation& seg);

/// Guards against uninformative background scores: when the deviation drops
/// below 0.1 the field is replaced by the previous map's superpixel means.
std::vector<double> background_guard(const std::vector<double>& sb, const Segmentation& seg,
                                     const SaliencyMap& prev);

/// Per-superpixel product of the two scores.
std::vector<double> combine_scores(const std::vector<double>& sf, const std::vector<double>& sb);

/// Paints each superpixel's score over its pixels and min-max normalizes the
/// result (constant maps pass through).
SaliencyMap render_scores(const Segmentation& seg, const std::vector<double>& scores);

/// Superpixel count schedule: decays by cfg.decay per iteration, never below
/// cfg.floor.
int decayed_superpixel_count(int current, const SessConfig& cfg);

/// The enhancement loop: segmentation, query scoring and re-rendering for
/// cfg.iterations rounds with a decaying superpixel count. Iterations with a
/// degenerate query split pass the previous map through. Returns every
/// iteration's map in order.
std::vector<SaliencyMap> sem_loop(const LabImage& lab, const SaliencyMap& s0,
                                  const SessConfig& cfg);

}  // namespace sess
