#include "core/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace sess {

namespace {

double logit(double s) { return std::log(s / (1.0 - s)); }

double logistic(double l) { return 1.0 / (1.0 + std::exp(-l)); }

}  // namespace

MapStack MapStack::from(std::vector<SaliencyMap> layers) {
    if (layers.empty()) {
        throw InvalidArgument("map stack needs at least one layer");
    }
    for (const SaliencyMap& m : layers) {
        if (!m.same_size(layers.front())) {
            throw DimensionError("map stack layers differ in size");
        }
    }
    MapStack stack;
    stack.thresholds.reserve(layers.size());
    for (const SaliencyMap& m : layers) {
        stack.thresholds.push_back(otsu_threshold(m));
    }
    stack.layers = std::move(layers);
    return stack;
}

void CaConfig::validate() const {
    if (lambda < 0.0) {
        throw InvalidArgument("automaton lambda must be >= 0");
    }
    if (steps < 0) {
        throw InvalidArgument("automaton step count must be >= 0");
    }
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw InvalidArgument("log-odds clamp must be in (0, 0.5)");
    }
}

SaliencyMap integrate(const MapStack& stack, const CaConfig& cfg) {
    cfg.validate();
    const int width = stack.layers.front().width;
    const int height = stack.layers.front().height;
    const int depth = static_cast<int>(stack.layers.size());
    const std::size_t plane = static_cast<std::size_t>(width) * height;

    // State in log-odds; foreground votes compare against the originating
    // layer's threshold mapped into the same domain.
    std::vector<double> state(plane * depth);
    std::vector<double> logit_thr(depth);
    for (int z = 0; z < depth; ++z) {
        const double t = stack.thresholds[z];
        logit_thr[z] = t <= 0.0  ? -std::numeric_limits<double>::infinity()
                       : t >= 1.0 ? std::numeric_limits<double>::infinity()
                                  : logit(t);
        for (std::size_t p = 0; p < plane; ++p) {
            const double s = std::clamp(stack.layers[z].data[p], cfg.epsilon, 1.0 - cfg.epsilon);
            state[z * plane + p] = logit(s);
        }
    }

    // Synchronous rounds. The neighborhood factors into five (dx,dy) column
    // offsets spanning all layers, so per-column vote totals are shared.
    std::vector<int> votes(plane);
    std::vector<int> delta(plane * depth);
    for (int step = 0; step < cfg.steps; ++step) {
        std::fill(votes.begin(), votes.end(), 0);
        for (int z = 0; z < depth; ++z) {
            for (std::size_t p = 0; p < plane; ++p) {
                const int d = state[z * plane + p] >= logit_thr[z] ? 1 : -1;
                delta[z * plane + p] = d;
                votes[p] += d;
            }
        }
        for (int z = 0; z < depth; ++z) {
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    const std::size_t p = static_cast<std::size_t>(y) * width + x;
                    int total = votes[p] - delta[z * plane + p];
                    if (x > 0) {
                        total += votes[p - 1];
                    }
                    if (x + 1 < width) {
                        total += votes[p + 1];
                    }
                    if (y > 0) {
                        total += votes[p - width];
                    }
                    if (y + 1 < height) {
                        total += votes[p + width];
                    }
                    state[z * plane + p] += cfg.lambda * total;
                }
            }
        }
    }

    SaliencyMap out(width, height);
    for (std::size_t p = 0; p < plane; ++p) {
        double sum = 0.0;
        for (int z = 0; z < depth; ++z) {
            sum += logistic(state[z * plane + p]);
        }
        out.data[p] = sum / depth;
    }
    return out;
}

ColorPassResult final_color_pass(const LabImage& lab, const SaliencyMap& integrated,
                                 const SessConfig& cfg, int superpixel_count) {
    ColorPassResult result;
    result.segmentation =
        oisf(lab, integrated, superpixel_count, cfg.seeds_per_component, cfg.superpixel_params());
    const QueryPartition queries = partition_queries(result.segmentation, integrated);
    if (queries.foreground.empty() || queries.background.empty()) {
        result.map = integrated;
        result.bypassed = true;
        return result;
    }
    const auto sf = foreground_score(result.segmentation, queries, cfg.sigma2);
    result.map = render_scores(result.segmentation, sf);
    return result;
}

SaliencyMap reintroduce_deep(const SaliencyMap& s0, const Segmentation& seg) {
    if (s0.width != seg.width || s0.height != seg.height) {
        throw DimensionError("reintroduce_deep: map and segmentation sizes differ");
    }
    const std::vector<double> means = region_mean_saliency(s0, seg);
    SaliencyMap out(seg.width, seg.height);
    for (std::size_t p = 0; p < out.pixels(); ++p) {
        out.data[p] = means[seg.labels[p] - 1];
    }
    return out;
}

SaliencyMap merge_final(const SaliencyMap& sd, const SaliencyMap& sc) {
    if (!sd.same_size(sc)) {
        throw DimensionError("merge_final: map sizes differ");
    }
    SaliencyMap out(sd.width, sd.height);
    for (std::size_t p = 0; p < out.pixels(); ++p) {
        out.data[p] = std::max(sd.data[p], sc.data[p]);
    }
    return out;
}

SaliencyMap suppress_low(const SaliencyMap& map) {
    const double half_psi = otsu_threshold(map) / 2.0;
    SaliencyMap out = map;
    for (double& v : out.data) {
        if (v < half_psi) {
            v = 0.0;
        }
    }
    return out;
}

SessOutputs sess_run(const LabImage& lab, const SaliencyMap& s0, const SessConfig& cfg) {
    cfg.validate();
    if (lab.width != s0.width || lab.height != s0.height) {
        throw DimensionError("sess: image and saliency sizes differ");
    }

    SessOutputs out;
    out.iterations = sem_loop(lab, s0, cfg);

    // Count used by the last enhancement iteration (decayed i-1 times).
    int n_k = cfg.superpixels;
    for (int i = 1; i < cfg.iterations; ++i) {
        n_k = decayed_superpixel_count(n_k, cfg);
    }
    out.reduced_superpixels = n_k;

    const CaConfig ca{cfg.lambda, cfg.ca_steps, cfg.epsilon};
    out.integrated = integrate(MapStack::from(out.iterations), ca);

    const int final_count = cfg.keep_reduced_superpixels ? out.reduced_superpixels : cfg.superpixels;
    ColorPassResult pass = final_color_pass(lab, out.integrated, cfg, final_count);
    out.color_pass = std::move(pass.map);
    out.final_segmentation = std::move(pass.segmentation);

    if (cfg.no_deep_reintro) {
        out.final_map = suppress_low(out.color_pass);
    } else {
        out.deep_reintro = reintroduce_deep(s0, out.final_segmentation);
        out.final_map = suppress_low(merge_final(out.deep_reintro, out.color_pass));
    }
    return out;
}

SaliencyMap enhance(const LabImage& lab, const SaliencyMap& s0, const SessConfig& cfg) {
    return sess_run(lab, s0, cfg).final_map;
}

}  // namespace sess
