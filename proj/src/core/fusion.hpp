#pragma once

#include <vector>

#include "core/config.hpp"
#include "core/raster.hpp"
#include "core/saliency.hpp"
#include "core/superpixel.hpp"

namespace sess {

/// The z-stacked iteration maps feeding the automaton, with each layer's Otsu
/// threshold fixed at construction.
struct MapStack {
    std::vector<SaliencyMap> layers;
    std::vector<double> thresholds;

    static MapStack from(std::vector<SaliencyMap> layers);
};

struct CaConfig {
    double lambda = 0.0001;  // update rate
    int steps = 3;           // synchronous update rounds t
    double epsilon = 0.001;  // log-odds clamp

    void validate() const;
};

/// Cellular-automata consensus over the stack. Cell state is the clamped
/// log-odds of the saliency; each step every cell gains lambda per neighbor
/// voting foreground (its state at or above its own layer's threshold) and
/// loses lambda per background vote. The neighborhood is the 4-adjacency plus
/// the co-located cell replicated across every layer, minus the cell itself.
/// Output pixel = mean over layers of the logistic of the final state.
SaliencyMap integrate(const MapStack& stack, const CaConfig& cfg);

struct ColorPassResult {
    SaliencyMap map;
    Segmentation segmentation;
    bool bypassed = false;  // degenerate query split: map echoes the input
};

/// One more segmentation of the integrated map followed by the
/// foreground-query score alone, rendered and normalized. Uses
/// `superpixel_count` superpixels (the caller restores the initial count
/// unless the reduced-count ablation is on).
ColorPassResult final_color_pass(const LabImage& lab, const SaliencyMap& integrated,
                                 const SessConfig& cfg, int superpixel_count);

/// Averages the input network map inside each superpixel of the final
/// segmentation; keeps the network's own scale (no normalization).
SaliencyMap reintroduce_deep(const SaliencyMap& s0, const Segmentation& seg);

/// Per-pixel maximum of the two maps.
SaliencyMap merge_final(const SaliencyMap& sd, const SaliencyMap& sc);

/// Zeroes every pixel below half the map's Otsu threshold.
SaliencyMap suppress_low(const SaliencyMap& map);

/// Everything the pipeline produced, for inspection and dumping.
struct SessOutputs {
    SaliencyMap final_map;
    std::vector<SaliencyMap> iterations;
    SaliencyMap integrated;
    SaliencyMap color_pass;
    SaliencyMap deep_reintro;  // empty when reintroduction is disabled
    Segmentation final_segmentation;
    int reduced_superpixels = 0;  // superpixel count after the decay schedule
};

/// The full pipeline: enhancement loop, automaton integration, final color
/// pass, deep-map reintroduction (unless ablated), merge and low-saliency
/// suppression.
SessOutputs sess_run(const LabImage& lab, const SaliencyMap& s0, const SessConfig& cfg);

/// Convenience wrapper returning only the final map.
SaliencyMap enhance(const LabImage& lab, const SaliencyMap& s0, const SessConfig& cfg);

}  // namespace sess
