#include "core/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace sess {

QueryPartition partition_queries(const Segmentation& seg, const SaliencyMap& prev) {
    if (seg.width != prev.width || seg.height != prev.height) {
        throw DimensionError("partition_queries: segmentation and map sizes differ");
    }
    QueryPartition q;
    q.psi = otsu_threshold(prev);
    for (int k = 0; k < seg.count(); ++k) {
        if (seg.records[k].mean_saliency >= q.psi) {
            q.foreground.push_back(k);
        } else {
            q.background.push_back(k);
        }
    }
    return q;
}

double similarity(const std::array<double, 3>& a, const std::array<double, 3>& b, double sigma2) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::exp(-std::sqrt(dx * dx + dy * dy + dz * dz) / sigma2);
}

std::vector<double> foreground_score(const Segmentation& seg, const QueryPartition& q,
                                     double sigma2) {
    if (q.foreground.empty()) {
        throw InvalidArgument("foreground_score: no foreground queries");
    }
    const int K = seg.count();
    std::vector<double> sf(K, 0.0);
    if (q.background.empty()) {
        // Every superpixel is a query: no non-query scale exists.
        std::fill(sf.begin(), sf.end(), 1.0);
        return sf;
    }

    double best_non_query = 0.0;
    for (int k : q.background) {
        double best = 0.0;
        for (int r : q.foreground) {
            best = std::max(best,
                            similarity(seg.records[k].mean_color, seg.records[r].mean_color, sigma2));
        }
        sf[k] = best;
        best_non_query = std::max(best_non_query, best);
    }
    for (int k : q.foreground) {
        sf[k] = best_non_query;
    }
    return sf;
}

std::vector<double> background_score(const Segmentation& seg, const QueryPartition& q,
                                     double sigma2) {
    if (q.background.empty()) {
        throw InvalidArgument("background_score: no background queries");
    }
    const int K = seg.count();
    std::vector<double> sb(K, 0.0);
    const double divisor = static_cast<double>(q.background.size());
    for (int k = 0; k < K; ++k) {
        double sum = 0.0;
        for (int r : q.background) {
            if (r == k) {
                continue;
            }
            sum += similarity(seg.records[k].mean_color, seg.records[r].mean_color, sigma2);
        }
        sb[k] = 1.0 - sum / divisor;
    }
    return sb;
}

double background_deviation(const std::vector<double>& sb, const Segmentation& seg) {
    double weighted = 0.0;
    double total = 0.0;
    for (int k = 0; k < seg.count(); ++k) {
        const double d = sb[k] - 0.5;
        weighted += d * d * seg.records[k].pixel_count;
        total += seg.records[k].pixel_count;
    }
    return total > 0.0 ? weighted / total : 0.0;
}

std::vector<double> background_guard(const std::vector<double>& sb, const Segmentation& seg,
                                     const SaliencyMap& prev) {
    if (background_deviation(sb, seg) >= 0.1) {
        return sb;
    }
    return region_mean_saliency(prev, seg);
}

std::vector<double> combine_scores(const std::vector<double>& sf, const std::vector<double>& sb) {
    if (sf.size() != sb.size()) {
        throw InvalidArgument("combine_scores: score vectors differ in length");
    }
    std::vector<double> out(sf.size());
    for (std::size_t k = 0; k < sf.size(); ++k) {
        out[k] = sf[k] * sb[k];
    }
    return out;
}

SaliencyMap render_scores(const Segmentation& seg, const std::vector<double>& scores) {
    if (static_cast<int>(scores.size()) != seg.count()) {
        throw InvalidArgument("render_scores: one score per superpixel required");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : scores) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool constant = !(hi > lo);
    const double span = hi - lo;

    SaliencyMap out(seg.width, seg.height);
    for (std::size_t p = 0; p < out.pixels(); ++p) {
        const double v = scores[seg.labels[p] - 1];
        out.data[p] = constant ? v : (v - lo) / span;
    }
    return out;
}

int decayed_superpixel_count(int current, const SessConfig& cfg) {
    const long next = std::lround(cfg.decay * current);
    return static_cast<int>(std::max<long>(next, cfg.floor));
}

std::vector<SaliencyMap> sem_loop(const LabImage& lab, const SaliencyMap& s0,
                                  const SessConfig& cfg) {
    cfg.validate();
    if (lab.width != s0.width || lab.height != s0.height) {
        throw DimensionError("sem_loop: image and saliency sizes differ");
    }

    std::vector<SaliencyMap> maps;
    maps.reserve(cfg.iterations);
    SaliencyMap prev = s0;
    int n_k = cfg.superpixels;
    const SuperpixelParams params = cfg.superpixel_params();

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        const Segmentation seg = oisf(lab, prev, n_k, cfg.seeds_per_component, params);
        const QueryPartition queries = partition_queries(seg, prev);
        if (queries.foreground.empty() || queries.background.empty()) {
            maps.push_back(prev);  // nothing to contrast against; keep the map
        } else {
            const auto sf = foreground_score(seg, queries, cfg.sigma2);
            auto sb = background_score(seg, queries, cfg.sigma2);
            sb = background_guard(sb, seg, prev);
            maps.push_back(render_scores(seg, combine_scores(sf, sb)));
        }
        prev = maps.back();
        n_k = decayed_superpixel_count(n_k, cfg);
    }
    return maps;
}

}  // namespace sess
