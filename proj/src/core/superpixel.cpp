#include "core/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>

#include "core/errors.hpp"

namespace sess {

namespace {

// Fixed 8-neighbor visiting order; both the forest and the seed machinery
// depend on it for reproducibility.
constexpr int kDx[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
constexpr int kDy[8] = {-1, -1, -1, 0, 0, 1, 1, 1};

struct Region {
    std::vector<std::int32_t> pixels;  // raster order
    int min_x = std::numeric_limits<int>::max();
    int min_y = std::numeric_limits<int>::max();
    int max_x = -1;
    int max_y = -1;

    void add(int idx, int x, int y) {
        pixels.push_back(idx);
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
};

// Nearest region pixel to a real-valued point, by expanding Chebyshev rings.
// Returns -1 when the region mask is empty within the search bound.
std::int32_t snap_to_region(double cx, double cy, const std::vector<std::uint8_t>& region_mask,
                            int width, int height) {
    const int px = std::clamp(static_cast<int>(std::lround(cx)), 0, width - 1);
    const int py = std::clamp(static_cast<int>(std::lround(cy)), 0, height - 1);
    const int max_radius = std::max(width, height);

    double best_d2 = std::numeric_limits<double>::infinity();
    std::int32_t best = -1;
    for (int r = 0; r <= max_radius; ++r) {
        // Rings farther than the best hit cannot improve it.
        if (best >= 0 && static_cast<double>(r) * r > best_d2) {
            break;
        }
        const int y0 = py - r, y1 = py + r;
        for (int y = y0; y <= y1; ++y) {
            if (y < 0 || y >= height) {
                continue;
            }
            const bool edge_row = (y == y0 || y == y1);
            const int step = edge_row ? 1 : 2 * r;
            for (int x = px - r; x <= px + r; x += std::max(step, 1)) {
                if (x < 0 || x >= width) {
                    continue;
                }
                const std::int32_t idx = y * width + x;
                if (!region_mask[idx]) {
                    continue;
                }
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = idx;
                }
            }
        }
    }
    return best;
}

// Deterministic in-region sampling: grid placement with snapping, then
// farthest-point (hop distance) fill when the grid under-produces.
std::vector<std::int32_t> sample_region(const Region& region,
                                        const std::vector<std::uint8_t>& region_mask, int width,
                                        int height, int target) {
    std::vector<std::int32_t> chosen;
    if (target <= 0 || region.pixels.empty()) {
        return chosen;
    }
    if (target >= static_cast<int>(region.pixels.size())) {
        return region.pixels;
    }

    std::vector<std::uint8_t> taken(static_cast<std::size_t>(width) * height, 0);
    const double area = static_cast<double>(region.pixels.size());
    const double stride = std::sqrt(area / target);
    const int bw = region.max_x - region.min_x + 1;
    const int bh = region.max_y - region.min_y + 1;
    const int cells_x = std::max(1, static_cast<int>(std::ceil(bw / stride)));
    const int cells_y = std::max(1, static_cast<int>(std::ceil(bh / stride)));

    for (int gy = 0; gy < cells_y && static_cast<int>(chosen.size()) < target; ++gy) {
        for (int gx = 0; gx < cells_x && static_cast<int>(chosen.size()) < target; ++gx) {
            const double cx = region.min_x + (gx + 0.5) * stride;
            const double cy = region.min_y + (gy + 0.5) * stride;
            const std::int32_t idx = snap_to_region(cx, cy, region_mask, width, height);
            if (idx >= 0 && !taken[idx]) {
                taken[idx] = 1;
                chosen.push_back(idx);
            }
        }
    }

    if (static_cast<int>(chosen.size()) >= target) {
        return chosen;
    }

    // Farthest-point fill over the region's 8-connected hop distance.
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> dist(static_cast<std::size_t>(width) * height, -1);
    for (std::int32_t idx : region.pixels) {
        dist[idx] = kInf;
    }
    std::deque<std::int32_t> queue;
    auto relax_from = [&](std::int32_t source) {
        dist[source] = 0;
        queue.push_back(source);
        while (!queue.empty()) {
            const std::int32_t cur = queue.front();
            queue.pop_front();
            const int cx = cur % width;
            const int cy = cur / width;
            for (int k = 0; k < 8; ++k) {
                const int nx = cx + kDx[k];
                const int ny = cy + kDy[k];
                if (nx < 0 || ny < 0 || nx >= width || ny >= height) {
                    continue;
                }
                const std::int32_t nidx = ny * width + nx;
                if (dist[nidx] >= 0 && dist[nidx] > dist[cur] + 1) {
                    dist[nidx] = dist[cur] + 1;
                    queue.push_back(nidx);
                }
            }
        }
    };
    for (std::int32_t idx : chosen) {
        relax_from(idx);
    }
    while (static_cast<int>(chosen.size()) < target) {
        std::int32_t farthest = -1;
        long long best = -1;
        for (std::int32_t idx : region.pixels) {
            if (taken[idx]) {
                continue;
            }
            const long long d = dist[idx] == kInf ? std::numeric_limits<long long>::max()
                                                  : static_cast<long long>(dist[idx]);
            if (d > best) {
                best = d;
                farthest = idx;
            }
        }
        if (farthest < 0) {
            break;  // region exhausted
        }
        taken[farthest] = 1;
        chosen.push_back(farthest);
        relax_from(farthest);
    }
    return chosen;
}

// Largest-remainder apportionment of `total` seeds over component areas with
// a floor of one per component, capped at component size.
std::vector<int> apportion_object_seeds(const std::vector<Region>& components, int total) {
    const int n_c = static_cast<int>(components.size());
    std::vector<int> quota(n_c, 0);
    if (total <= 0) {
        return quota;
    }

    if (total < n_c) {
        // Not enough seeds for every component: the largest ones win.
        std::vector<int> order(n_c);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return components[a].pixels.size() > components[b].pixels.size();
        });
        for (int i = 0; i < total; ++i) {
            quota[order[i]] = 1;
        }
        return quota;
    }

    double total_area = 0.0;
    for (const Region& c : components) {
        total_area += static_cast<double>(c.pixels.size());
    }
    std::fill(quota.begin(), quota.end(), 1);
    int remaining = total - n_c;
    std::vector<std::pair<double, int>> remainders(n_c);
    for (int i = 0; i < n_c; ++i) {
        const double ideal = remaining * components[i].pixels.size() / total_area;
        const int base = static_cast<int>(ideal);
        quota[i] += base;
        remainders[i] = {ideal - base, i};
    }
    int assigned = std::accumulate(quota.begin(), quota.end(), 0);
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int i = 0; assigned < total && i < n_c; ++i) {
        ++quota[remainders[i].second];
        ++assigned;
    }

    // Respect component sizes; spill overflow to components with room.
    int spill = 0;
    for (int i = 0; i < n_c; ++i) {
        const int cap = static_cast<int>(components[i].pixels.size());
        if (quota[i] > cap) {
            spill += quota[i] - cap;
            quota[i] = cap;
        }
    }
    for (int i = 0; spill > 0 && i < n_c; ++i) {
        const int cap = static_cast<int>(components[i].pixels.size());
        const int room = cap - quota[i];
        const int take = std::min(room, spill);
        quota[i] += take;
        spill -= take;
    }
    return quota;
}

double color_distance(const float* lab, const std::array<double, 3>& mu) {
    const double dl = static_cast<double>(lab[0]) - mu[0];
    const double da = static_cast<double>(lab[1]) - mu[1];
    const double db = static_cast<double>(lab[2]) - mu[2];
    return std::sqrt(dl * dl + da * da + db * db);
}

}  // namespace

void SuperpixelParams::validate() const {
    if (!(alpha > 0.0)) {
        throw InvalidArgument("superpixel alpha must be > 0");
    }
    if (!(beta > 0.0)) {
        throw InvalidArgument("superpixel beta must be > 0");
    }
    if (gamma < 0.0) {
        throw InvalidArgument("superpixel gamma must be >= 0");
    }
    if (iters < 1) {
        throw InvalidArgument("superpixel iteration count must be >= 1");
    }
}

SeedSet sample_seeds(const SaliencyMap& sal, int n, int n_s) {
    if (n < 2) {
        throw InvalidArgument("seed count must be >= 2");
    }
    if (n_s < 1) {
        throw InvalidArgument("seeds per component must be >= 1");
    }
    if (static_cast<std::size_t>(n) > sal.pixels()) {
        throw InvalidArgument("image has fewer pixels than requested seeds");
    }

    const int width = sal.width;
    const int height = sal.height;
    const double psi = otsu_threshold(sal);

    // Otsu foreground; an all-zero map has no salient area at all.
    BinaryMask mask(width, height);
    std::size_t mask_count = 0;
    for (std::size_t i = 0; i < sal.pixels(); ++i) {
        const bool fg = sal.data[i] > 0.0 && sal.data[i] >= psi;
        mask.data[i] = fg ? 1 : 0;
        mask_count += fg ? 1 : 0;
    }

    const ComponentLabels comps = connected_components(mask);
    const int n_c = comps.count;

    std::vector<Region> components(n_c);
    Region background;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::int32_t idx = y * width + x;
            const std::int32_t c = comps.labels[idx];
            if (c > 0) {
                components[c - 1].add(idx, x, y);
            } else {
                background.add(idx, x, y);
            }
        }
    }

    int n_os = 0;
    if (n_c > 0) {
        n_os = std::min(std::max(n_s * n_c, n_c), n - 1);
        // A background too small to host its share pushes seeds back into the
        // object components (one slot always stays outside the object quota).
        const int bg_available = static_cast<int>(background.pixels.size());
        n_os = std::min(std::max(n_os, n - bg_available), n - 1);
    }

    std::vector<int> quota = apportion_object_seeds(components, n_os);

    SeedSet out;
    out.positions.reserve(n);
    out.object_flags.reserve(n);
    std::vector<std::uint8_t> region_mask(static_cast<std::size_t>(width) * height, 0);
    std::vector<std::uint8_t> used(static_cast<std::size_t>(width) * height, 0);

    auto emit = [&](const std::vector<std::int32_t>& picks, bool object) {
        for (std::int32_t idx : picks) {
            out.positions.push_back({idx % width, idx / width});
            out.object_flags.push_back(object ? 1 : 0);
            used[idx] = 1;
        }
    };

    for (int c = 0; c < n_c; ++c) {
        if (quota[c] <= 0) {
            continue;
        }
        std::fill(region_mask.begin(), region_mask.end(), 0);
        for (std::int32_t idx : components[c].pixels) {
            region_mask[idx] = 1;
        }
        emit(sample_region(components[c], region_mask, width, height, quota[c]), true);
    }

    int n_bg = n - static_cast<int>(out.positions.size());
    if (n_bg > 0 && !background.pixels.empty()) {
        std::fill(region_mask.begin(), region_mask.end(), 0);
        for (std::int32_t idx : background.pixels) {
            region_mask[idx] = 1;
        }
        const int want = std::min<int>(n_bg, static_cast<int>(background.pixels.size()));
        emit(sample_region(background, region_mask, width, height, want), false);
    }

    // Leftovers (background pool exhausted): any unused pixel, raster order.
    for (std::int32_t idx = 0; static_cast<int>(out.positions.size()) < n &&
                               idx < static_cast<std::int32_t>(sal.pixels());
         ++idx) {
        if (!used[idx]) {
            out.positions.push_back({idx % width, idx / width});
            out.object_flags.push_back(mask.data[idx]);
            used[idx] = 1;
        }
    }
    return out;
}

Segmentation ift_segment(const LabImage& lab, const SaliencyMap& sal, const SeedSet& seeds,
                         const std::vector<std::array<double, 3>>* mean_colors,
                         const SuperpixelParams& params, std::vector<double>* path_costs) {
    params.validate();
    if (seeds.size() == 0) {
        throw InvalidArgument("ift_segment: no seeds");
    }
    if (lab.width != sal.width || lab.height != sal.height) {
        throw DimensionError("ift_segment: image and saliency sizes differ");
    }
    if (mean_colors && mean_colors->size() != seeds.size()) {
        throw InvalidArgument("ift_segment: one mean color per seed required");
    }

    const int width = lab.width;
    const int height = lab.height;
    const std::size_t pixel_count = lab.pixels();
    const int K = static_cast<int>(seeds.size());

    std::vector<std::array<double, 3>> mu(K);
    std::vector<double> seed_sal(K);
    for (int k = 0; k < K; ++k) {
        const PixelCoord p = seeds.positions[k];
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
            throw InvalidArgument("ift_segment: seed outside image bounds");
        }
        const float* c = lab.at(p.x, p.y);
        mu[k] = mean_colors ? (*mean_colors)[k]
                            : std::array<double, 3>{static_cast<double>(c[0]),
                                                    static_cast<double>(c[1]),
                                                    static_cast<double>(c[2])};
        seed_sal[k] = sal.at(p.x, p.y);
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> cost(pixel_count, kInf);
    std::vector<std::int32_t> label(pixel_count, 0);
    std::vector<std::uint8_t> done(pixel_count, 0);

    struct Entry {
        double cost;
        std::uint64_t seq;
        std::int32_t pixel;
        bool operator>(const Entry& other) const {
            if (cost != other.cost) {
                return cost > other.cost;
            }
            return seq > other.seq;
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    std::uint64_t seq = 0;

    for (int k = 0; k < K; ++k) {
        const PixelCoord p = seeds.positions[k];
        const std::int32_t idx = p.y * width + p.x;
        if (label[idx] != 0) {
            throw InvalidArgument("ift_segment: duplicate seed position");
        }
        cost[idx] = 0.0;
        label[idx] = k + 1;
        heap.push({0.0, seq++, idx});
    }

    const double sqrt2 = std::sqrt(2.0);
    while (!heap.empty()) {
        const Entry top = heap.top();
        heap.pop();
        const std::int32_t s = top.pixel;
        if (done[s] || top.cost != cost[s]) {
            continue;
        }
        done[s] = 1;
        const int sx = s % width;
        const int sy = s / width;
        const int root = label[s] - 1;
        const std::array<double, 3>& root_mu = mu[root];
        const double root_sal = seed_sal[root];
        for (int k = 0; k < 8; ++k) {
            const int tx = sx + kDx[k];
            const int ty = sy + kDy[k];
            if (tx < 0 || ty < 0 || tx >= width || ty >= height) {
                continue;
            }
            const std::int32_t t = ty * width + tx;
            if (done[t]) {
                continue;
            }
            const double d = color_distance(lab.at(tx, ty), root_mu) *
                             (1.0 + params.gamma * std::abs(sal.at(tx, ty) - root_sal));
            const double step = (kDx[k] != 0 && kDy[k] != 0) ? sqrt2 : 1.0;
            const double candidate = cost[s] + std::pow(params.alpha * d, params.beta) + step;
            if (candidate < cost[t]) {
                cost[t] = candidate;
                label[t] = label[s];
                heap.push({candidate, seq++, t});
            }
        }
    }

    if (path_costs) {
        *path_costs = std::move(cost);
    }
    Segmentation seg;
    seg.width = width;
    seg.height = height;
    seg.labels = std::move(label);
    seg.records.resize(K);
    for (int k = 0; k < K; ++k) {
        seg.records[k].seed = seeds.positions[k];
    }
    for (std::int32_t l : seg.labels) {
        ++seg.records[l - 1].pixel_count;
    }
    return seg;
}

SeedSet recenter_seeds(const Segmentation& seg, const SeedSet& seeds) {
    const int K = seg.count();
    if (static_cast<int>(seeds.size()) != K) {
        throw InvalidArgument("recenter_seeds: seed list does not match segmentation");
    }
    std::vector<double> sum_x(K, 0.0), sum_y(K, 0.0);
    std::vector<std::int64_t> count(K, 0);
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            const int k = seg.label_at(x, y) - 1;
            sum_x[k] += x;
            sum_y[k] += y;
            ++count[k];
        }
    }

    std::vector<double> best(K, std::numeric_limits<double>::infinity());
    SeedSet out;
    out.positions.assign(K, PixelCoord{});
    out.object_flags = seeds.object_flags;
    for (int y = 0; y < seg.height; ++y) {
        for (int x = 0; x < seg.width; ++x) {
            const int k = seg.label_at(x, y) - 1;
            const double cx = sum_x[k] / count[k];
            const double cy = sum_y[k] / count[k];
            const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            if (d2 < best[k]) {
                best[k] = d2;
                out.positions[k] = {x, y};
            }
        }
    }
    return out;
}

std::vector<std::array<double, 3>> region_mean_colors(const LabImage& lab, const Segmentation& seg) {
    const int K = seg.count();
    std::vector<std::array<double, 3>> sums(K, {0.0, 0.0, 0.0});
    std::vector<std::int64_t> counts(K, 0);
    for (std::size_t p = 0; p < lab.pixels(); ++p) {
        const int k = seg.labels[p] - 1;
        sums[k][0] += lab.data[p * 3 + 0];
        sums[k][1] += lab.data[p * 3 + 1];
        sums[k][2] += lab.data[p * 3 + 2];
        ++counts[k];
    }
    for (int k = 0; k < K; ++k) {
        if (counts[k] > 0) {
            sums[k][0] /= counts[k];
            sums[k][1] /= counts[k];
            sums[k][2] /= counts[k];
        }
    }
    return sums;
}

std::vector<double> region_mean_saliency(const SaliencyMap& sal, const Segmentation& seg) {
    const int K = seg.count();
    std::vector<double> sums(K, 0.0);
    std::vector<std::int64_t> counts(K, 0);
    for (std::size_t p = 0; p < sal.pixels(); ++p) {
        const int k = seg.labels[p] - 1;
        sums[k] += sal.data[p];
        ++counts[k];
    }
    for (int k = 0; k < K; ++k) {
        if (counts[k] > 0) {
            sums[k] /= counts[k];
        }
    }
    return sums;
}

Segmentation oisf(const LabImage& lab, const SaliencyMap& sal, int n, int n_s,
                  const SuperpixelParams& params) {
    params.validate();
    if (lab.width != sal.width || lab.height != sal.height) {
        throw DimensionError("oisf: image and saliency sizes differ");
    }

    SeedSet seeds = sample_seeds(sal, n, n_s);
    std::vector<std::array<double, 3>> mu;
    Segmentation seg;
    for (int round = 0; round < params.iters; ++round) {
        seg = ift_segment(lab, sal, seeds, round == 0 ? nullptr : &mu, params);
        if (round + 1 < params.iters) {
            mu = region_mean_colors(lab, seg);
            seeds = recenter_seeds(seg, seeds);
        }
    }

    const auto colors = region_mean_colors(lab, seg);
    const auto sals = region_mean_saliency(sal, seg);
    for (int k = 0; k < seg.count(); ++k) {
        seg.records[k].mean_color = colors[k];
        seg.records[k].mean_saliency = sals[k];
    }
    return seg;
}

}  // namespace sess
