#pragma once

#include <string>

#include "core/superpixel.hpp"

namespace sess {

/// All pipeline hyperparameters plus the ablation switches. Defaults are the
/// published tuning for U²Net-style input maps.
struct SessConfig {
    int iterations = 12;          // enhancement iterations i
    int superpixels = 2500;       // initial superpixel count n
    int seeds_per_component = 10; // object seeds per salient component n_s
    int oisf_iters = 5;           // segmentation refinement rounds i_o
    double alpha = 12.0;
    double beta = 0.5;
    double gamma = 10.0;
    double sigma2 = 0.01;         // similarity variance
    double lambda = 0.0001;       // automaton update rate
    int ca_steps = 3;             // automaton iterations t
    double decay = 0.8;           // per-iteration superpixel keep ratio
    int floor = 200;              // superpixel count lower bound
    double epsilon = 0.001;       // log-odds clamp
    bool no_deep_reintro = false;
    bool keep_reduced_superpixels = false;

    SuperpixelParams superpixel_params() const {
        return SuperpixelParams{alpha, beta, gamma, oisf_iters};
    }

    void validate() const;  // throws InvalidArgument naming the offending key

    bool operator==(const SessConfig&) const = default;
};

/// Applies one of the bundled presets: "u2net", "basnet" or "msfnet".
void apply_preset(SessConfig& cfg, const std::string& name);

/// Applies a single `key = value` assignment with full validation.
void apply_config_entry(SessConfig& cfg, const std::string& key, const std::string& value);

/// Parses a `key = value` config file ('#' starts a comment; unknown keys and
/// out-of-range values are errors that carry the line number).
SessConfig parse_config(const std::string& path);

/// Parses config text (same grammar as parse_config).
SessConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Renders the effective configuration; parse_config_text of the result
/// reproduces the same SessConfig.
std::string format_config(const SessConfig& cfg);

}  // namespace sess
