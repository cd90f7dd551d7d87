#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace sess {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw InvalidArgument("value for '" + key + "' is not an integer: " + value);
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(out)) {
            throw std::invalid_argument(value);
        }
        return out;
    } catch (const std::exception&) {
        throw InvalidArgument("value for '" + key + "' is not a number: " + value);
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "off") {
        return false;
    }
    throw InvalidArgument("value for '" + key + "' is not a boolean: " + value);
}

}  // namespace

void SessConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvalidArgument(what);
        }
    };
    require(iterations >= 1, "'iterations' must be >= 1");
    require(superpixels >= 2, "'superpixels' must be >= 2");
    require(seeds_per_component >= 1, "'seeds_per_component' must be >= 1");
    require(oisf_iters >= 1, "'oisf_iters' must be >= 1");
    require(alpha > 0.0, "'alpha' must be > 0");
    require(beta > 0.0, "'beta' must be > 0");
    require(gamma >= 0.0, "'gamma' must be >= 0");
    require(sigma2 > 0.0, "'sigma2' must be > 0");
    require(lambda >= 0.0, "'lambda' must be >= 0");
    require(ca_steps >= 0, "'ca_steps' must be >= 0");
    require(decay > 0.0 && decay <= 1.0, "'decay' must be in (0, 1]");
    require(floor >= 2, "'floor' must be >= 2");
    require(epsilon > 0.0 && epsilon < 0.5, "'epsilon' must be in (0, 0.5)");
}

void apply_preset(SessConfig& cfg, const std::string& name) {
    // Per-baseline tunings: iterations, superpixels, seeds per component,
    // refinement rounds. Everything else is shared.
    if (name == "u2net") {
        cfg.iterations = 12;
        cfg.superpixels = 2500;
        cfg.seeds_per_component = 10;
        cfg.oisf_iters = 5;
    } else if (name == "basnet") {
        cfg.iterations = 9;
        cfg.superpixels = 200;
        cfg.seeds_per_component = 30;
        cfg.oisf_iters = 3;
    } else if (name == "msfnet") {
        cfg.iterations = 12;
        cfg.superpixels = 2500;
        cfg.seeds_per_component = 30;
        cfg.oisf_iters = 1;
    } else {
        throw InvalidArgument("unknown preset '" + name + "' (expected u2net, basnet or msfnet)");
    }
}

void apply_config_entry(SessConfig& out, const std::string& key, const std::string& value) {
    // Work on a copy so a rejected value leaves the configuration untouched.
    SessConfig cfg = out;
    if (key == "preset") {
        apply_preset(cfg, value);
    } else if (key == "iterations") {
        cfg.iterations = parse_int(key, value);
    } else if (key == "superpixels") {
        cfg.superpixels = parse_int(key, value);
    } else if (key == "seeds_per_component") {
        cfg.seeds_per_component = parse_int(key, value);
    } else if (key == "oisf_iters") {
        cfg.oisf_iters = parse_int(key, value);
    } else if (key == "alpha") {
        cfg.alpha = parse_real(key, value);
    } else if (key == "beta") {
        cfg.beta = parse_real(key, value);
    } else if (key == "gamma") {
        cfg.gamma = parse_real(key, value);
    } else if (key == "sigma2") {
        cfg.sigma2 = parse_real(key, value);
    } else if (key == "lambda") {
        cfg.lambda = parse_real(key, value);
    } else if (key == "ca_steps") {
        cfg.ca_steps = parse_int(key, value);
    } else if (key == "decay") {
        cfg.decay = parse_real(key, value);
    } else if (key == "floor") {
        cfg.floor = parse_int(key, value);
    } else if (key == "epsilon") {
        cfg.epsilon = parse_real(key, value);
    } else if (key == "no_deep_reintro") {
        cfg.no_deep_reintro = parse_bool(key, value);
    } else if (key == "keep_reduced_superpixels") {
        cfg.keep_reduced_superpixels = parse_bool(key, value);
    } else {
        throw InvalidArgument("unknown config key '" + key + "'");
    }

    try {
        cfg.validate();
    } catch (const InvalidArgument& e) {
        throw InvalidArgument("value out of range for '" + key + "': " + e.what());
    }
    out = cfg;
}

SessConfig parse_config_text(const std::string& text, const std::string& origin) {
    SessConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw InvalidArgument(origin + ":" + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
        }
        try {
            apply_config_entry(cfg, key, value);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return cfg;
}

SessConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

std::string format_config(const SessConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "iterations = " << cfg.iterations << "\n";
    out << "superpixels = " << cfg.superpixels << "\n";
    out << "seeds_per_component = " << cfg.seeds_per_component << "\n";
    out << "oisf_iters = " << cfg.oisf_iters << "\n";
    out << "alpha = " << cfg.alpha << "\n";
    out << "beta = " << cfg.beta << "\n";
    out << "gamma = " << cfg.gamma << "\n";
    out << "sigma2 = " << cfg.sigma2 << "\n";
    out << "lambda = " << cfg.lambda << "\n";
    out << "ca_steps = " << cfg.ca_steps << "\n";
    out << "decay = " << cfg.decay << "\n";
    out << "floor = " << cfg.floor << "\n";
    out << "epsilon = " << cfg.epsilon << "\n";
    out << "no_deep_reintro = " << (cfg.no_deep_reintro ? "true" : "false") << "\n";
    out << "keep_reduced_superpixels = " << (cfg.keep_reduced_superpixels ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace sess
