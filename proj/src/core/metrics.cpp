#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace sess {

namespace {

void require_same_size(const SaliencyMap& s, const GroundTruth& g, const char* where) {
    if (s.width != g.width || s.height != g.height) {
        throw DimensionError(std::string(where) + ": map and ground truth sizes differ");
    }
}

// --- weighted F-measure support ------------------------------------------

// Exact squared Euclidean distance to the nearest foreground pixel
// (column pre-pass, then the lower-envelope transform per row, restricted to
// columns that contain foreground at all).
std::vector<std::int64_t> squared_distance_to_foreground(const GroundTruth& g) {
    const int w = g.width;
    const int h = g.height;
    constexpr int kNone = -1;

    // Vertical distance to the nearest in-column foreground row (kNone when
    // the column is empty).
    std::vector<int> coldist(g.pixels(), kNone);
    for (int x = 0; x < w; ++x) {
        int last = kNone;
        for (int y = 0; y < h; ++y) {
            if (g.at(x, y)) {
                last = y;
            }
            if (last != kNone) {
                coldist[static_cast<std::size_t>(y) * w + x] = y - last;
            }
        }
        last = kNone;
        for (int y = h - 1; y >= 0; --y) {
            if (g.at(x, y)) {
                last = y;
            }
            if (last != kNone) {
                auto& d = coldist[static_cast<std::size_t>(y) * w + x];
                d = d == kNone ? last - y : std::min(d, last - y);
            }
        }
    }

    std::vector<std::int64_t> out(g.pixels(), 0);
    std::vector<int> sites(w);
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    std::vector<std::int64_t> f(w);
    for (int y = 0; y < h; ++y) {
        int count = 0;
        for (int x = 0; x < w; ++x) {
            const int d = coldist[static_cast<std::size_t>(y) * w + x];
            if (d != kNone) {
                sites[count] = x;
                f[count] = static_cast<std::int64_t>(d) * d;
                ++count;
            }
        }
        // The map has foreground somewhere, so every row sees >= 1 site.
        int k = 0;
        v[0] = 0;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        for (int q = 1; q < count; ++q) {
            double s = 0.0;
            while (true) {
                const int p = v[k];
                const double xq = sites[q];
                const double xp = sites[p];
                s = (static_cast<double>(f[q] - f[p]) + xq * xq - xp * xp) / (2.0 * (xq - xp));
                if (s <= z[k] && k > 0) {
                    --k;
                } else {
                    break;
                }
            }
            ++k;
            v[k] = q;
            z[k] = s;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        k = 0;
        for (int x = 0; x < w; ++x) {
            while (z[k + 1] < x) {
                ++k;
            }
            const std::int64_t dx = x - sites[v[k]];
            out[static_cast<std::size_t>(y) * w + x] = dx * dx + f[v[k]];
        }
    }
    return out;
}

}  // namespace

std::size_t GroundTruth::foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : data) {
        n += v != 0;
    }
    return n;
}

GroundTruth binarize_ground_truth(const SaliencyMap& map) {
    GroundTruth g(map.width, map.height);
    for (std::size_t p = 0; p < map.pixels(); ++p) {
        g.data[p] = map.data[p] >= 0.5 ? 1 : 0;
    }
    return g;
}

double mae(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "mae");
    double sum = 0.0;
    for (std::size_t p = 0; p < s.pixels(); ++p) {
        sum += std::abs(s.data[p] - (g.data[p] ? 1.0 : 0.0));
    }
    return sum / static_cast<double>(s.pixels());
}

PRCurve pr_curve(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "pr_curve");
    const std::size_t positives = g.foreground_count();
    if (positives == 0) {
        throw InvalidArgument("pr_curve: ground truth has no foreground");
    }
    PRCurve curve;
    for (int tau = 0; tau < 256; ++tau) {
        const double cut = tau / 255.0;
        std::size_t predicted = 0;
        std::size_t hits = 0;
        for (std::size_t p = 0; p < s.pixels(); ++p) {
            if (s.data[p] >= cut) {
                ++predicted;
                hits += g.data[p] ? 1 : 0;
            }
        }
        curve[tau].threshold = tau;
        curve[tau].precision =
            predicted == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(predicted);
        curve[tau].recall = static_cast<double>(hits) / static_cast<double>(positives);
    }
    return curve;
}

double max_f(const PRCurve& curve) {
    constexpr double beta2 = 0.3;
    double best = 0.0;
    for (const PRPoint& pt : curve) {
        const double denom = beta2 * pt.precision + pt.recall;
        if (denom > 0.0) {
            best = std::max(best, (1.0 + beta2) * pt.precision * pt.recall / denom);
        }
    }
    return best;
}

double weighted_f(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "weighted_f");
    if (g.foreground_count() == 0) {
        throw InvalidArgument("weighted_f: ground truth has no foreground");
    }
    const int w = g.width;
    const int h = g.height;

    std::vector<double> err(s.pixels());
    for (std::size_t p = 0; p < s.pixels(); ++p) {
        err[p] = std::abs(s.data[p] - (g.data[p] ? 1.0 : 0.0));
    }

    // Gaussian window, sigma 5 truncated at 4 sigma, normalized as a whole.
    constexpr double sigma = 5.0;
    constexpr int radius = 20;
    constexpr int side = 2 * radius + 1;
    std::vector<double> kernel(static_cast<std::size_t>(side) * side);
    double kernel_sum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            kernel[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] = v;
            kernel_sum += v;
        }
    }
    for (double& v : kernel) {
        v /= kernel_sum;
    }

    std::vector<double> smoothed(s.pixels(), 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) {
                    continue;
                }
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int xx = x + dx;
                    if (xx < 0 || xx >= w) {
                        continue;
                    }
                    acc += kernel[static_cast<std::size_t>(dy + radius) * side + (dx + radius)] *
                           err[static_cast<std::size_t>(yy) * w + xx];
                }
            }
            smoothed[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }

    const std::vector<std::int64_t> dist2 = squared_distance_to_foreground(g);
    const double decay = std::log(0.5) / 5.0;

    double tp = 0.0, fn = 0.0, fp = 0.0;
    for (std::size_t p = 0; p < s.pixels(); ++p) {
        if (g.data[p]) {
            const double ew = std::min(err[p], smoothed[p]);
            tp += 1.0 - ew;
            fn += ew;
        } else {
            const double delta = std::sqrt(static_cast<double>(dist2[p]));
            const double weight = 2.0 - std::exp(decay * delta);
            fp += err[p] * weight;
        }
    }

    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

// --- structure measure ----------------------------------------------------

struct Quadrant {
    int x0, y0, x1, y1;  // half-open
    std::size_t area() const {
        return static_cast<std::size_t>(std::max(0, x1 - x0)) * std::max(0, y1 - y0);
    }
};

double object_score(const SaliencyMap& s, const GroundTruth& g, bool foreground) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < s.pixels(); ++p) {
        if ((g.data[p] != 0) == foreground) {
            sum += foreground ? s.data[p] : 1.0 - s.data[p];
            ++n;
        }
    }
    if (n == 0) {
        return 0.0;
    }
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t p = 0; p < s.pixels(); ++p) {
        if ((g.data[p] != 0) == foreground) {
            const double v = (foreground ? s.data[p] : 1.0 - s.data[p]) - mean;
            var += v * v;
        }
    }
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;
    return 2.0 * mean / (mean * mean + 1.0 + sd);
}

double quadrant_ssim(const SaliencyMap& s, const GroundTruth& g, const Quadrant& q) {
    const std::size_t n = q.area();
    if (n == 0) {
        return 1.0;
    }
    double sum_s = 0.0, sum_g = 0.0;
    for (int y = q.y0; y < q.y1; ++y) {
        for (int x = q.x0; x < q.x1; ++x) {
            sum_s += s.at(x, y);
            sum_g += g.at(x, y) ? 1.0 : 0.0;
        }
    }
    const double mean_s = sum_s / static_cast<double>(n);
    const double mean_g = sum_g / static_cast<double>(n);

    double var_s = 0.0, var_g = 0.0, cov = 0.0;
    for (int y = q.y0; y < q.y1; ++y) {
        for (int x = q.x0; x < q.x1; ++x) {
            const double ds = s.at(x, y) - mean_s;
            const double dg = (g.at(x, y) ? 1.0 : 0.0) - mean_g;
            var_s += ds * ds;
            var_g += dg * dg;
            cov += ds * dg;
        }
    }
    if (n > 1) {
        var_s /= static_cast<double>(n - 1);
        var_g /= static_cast<double>(n - 1);
        cov /= static_cast<double>(n - 1);
    } else {
        var_s = var_g = cov = 0.0;
    }

    const double alpha = 4.0 * mean_s * mean_g * cov;
    const double beta = (mean_s * mean_s + mean_g * mean_g) * (var_s + var_g);
    if (alpha != 0.0) {
        return alpha / beta;
    }
    return beta == 0.0 ? 1.0 : 0.0;
}

double region_score(const SaliencyMap& s, const GroundTruth& g) {
    // Centroid of the foreground, rounded the way the reference formulation
    // rounds its 1-based indices.
    double sum_x = 0.0, sum_y = 0.0;
    double total = 0.0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            if (g.at(x, y)) {
                sum_x += x + 1.0;
                sum_y += y + 1.0;
                total += 1.0;
            }
        }
    }
    int cx = g.width / 2;
    int cy = g.height / 2;
    if (total > 0.0) {
        cx = static_cast<int>(std::lround(sum_x / total));
        cy = static_cast<int>(std::lround(sum_y / total));
        cx = std::clamp(cx, 1, g.width);
        cy = std::clamp(cy, 1, g.height);
    }

    const Quadrant quads[4] = {
        {0, 0, cx, cy},
        {cx, 0, g.width, cy},
        {0, cy, cx, g.height},
        {cx, cy, g.width, g.height},
    };
    const double area = static_cast<double>(g.pixels());
    double score = 0.0;
    for (const Quadrant& q : quads) {
        const double weight = static_cast<double>(q.area()) / area;
        score += weight * quadrant_ssim(s, g, q);
    }
    return score;
}

}  // namespace

double s_measure(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "s_measure");
    const std::size_t fg = g.foreground_count();
    double mean_s = 0.0;
    for (double v : s.data) {
        mean_s += v;
    }
    mean_s /= static_cast<double>(s.pixels());

    if (fg == 0) {
        return 1.0 - mean_s;
    }
    if (fg == g.pixels()) {
        return mean_s;
    }

    const double mu = static_cast<double>(fg) / static_cast<double>(g.pixels());
    const double object =
        mu * object_score(s, g, true) + (1.0 - mu) * object_score(s, g, false);
    const double region = region_score(s, g);
    return std::max(0.0, 0.5 * object + 0.5 * region);
}

double e_measure(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "e_measure");
    const std::size_t n = s.pixels();
    const std::size_t fg = g.foreground_count();
    const double mean_g = static_cast<double>(fg) / static_cast<double>(n);

    double total = 0.0;
    for (int tau = 0; tau < 256; ++tau) {
        const double cut = tau / 255.0;
        double score = 0.0;
        if (fg == 0 || fg == n) {
            // Constant ground truth: intersection with the matching class.
            for (std::size_t p = 0; p < n; ++p) {
                const bool b = s.data[p] >= cut;
                score += fg == 0 ? (b ? 0.0 : 1.0) : (b ? 1.0 : 0.0);
            }
        } else {
            std::size_t predicted = 0;
            for (std::size_t p = 0; p < n; ++p) {
                predicted += s.data[p] >= cut ? 1 : 0;
            }
            const double mean_b = static_cast<double>(predicted) / static_cast<double>(n);
            for (std::size_t p = 0; p < n; ++p) {
                const double phi_b = (s.data[p] >= cut ? 1.0 : 0.0) - mean_b;
                const double phi_g = (g.data[p] ? 1.0 : 0.0) - mean_g;
                const double denom = phi_g * phi_g + phi_b * phi_b;
                const double xi = denom > 0.0 ? 2.0 * phi_g * phi_b / denom : 0.0;
                score += (xi + 1.0) * (xi + 1.0) / 4.0;
            }
        }
        total += score / static_cast<double>(n);
    }
    return total / 256.0;
}

MetricsReport evaluate_all(const SaliencyMap& s, const GroundTruth& g) {
    require_same_size(s, g, "evaluate_all");
    if (g.foreground_count() == 0) {
        throw InvalidArgument("evaluate_all: ground truth has no foreground");
    }
    MetricsReport report;
    report.mae = mae(s, g);
    report.max_f = max_f(pr_curve(s, g));
    report.weighted_f = weighted_f(s, g);
    report.s_measure = s_measure(s, g);
    report.e_measure = e_measure(s, g);
    return report;
}

}  // namespace sess
