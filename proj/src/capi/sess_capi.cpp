#include "sess/sess.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/fusion.hpp"
#include "core/image_io.hpp"
#include "core/metrics.hpp"
#include "core/raster.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
sess_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return SESS_OK;
    } catch (const sess::DimensionError& e) {
        set_error(e.what());
        return SESS_ERROR_DIMENSION_MISMATCH;
    } catch (const sess::FormatError& e) {
        set_error(e.what());
        return SESS_ERROR_FORMAT;
    } catch (const sess::IoError& e) {
        set_error(e.what());
        return SESS_ERROR_IO;
    } catch (const sess::InvalidArgument& e) {
        set_error(e.what());
        return SESS_ERROR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SESS_ERROR_INTERNAL;
    }
}

}  // namespace

struct sess_image {
    sess::RgbImage rep;
};

struct sess_map {
    sess::SaliencyMap rep;
};

struct sess_config {
    sess::SessConfig rep;
};

struct sess_result {
    sess::SessOutputs rep;
    std::vector<sess_map> iteration_views;
    sess_map final_view;
    sess_map integrated_view;
    sess_map color_pass_view;
    sess_map deep_view;
    bool has_deep = false;
};

extern "C" {

const char* sess_version(void) { return "1.0.0"; }

const char* sess_last_error(void) { return g_last_error.c_str(); }

const char* sess_status_name(sess_status status) {
    switch (status) {
        case SESS_OK:
            return "ok";
        case SESS_ERROR_INVALID_ARGUMENT:
            return "invalid argument";
        case SESS_ERROR_IO:
            return "i/o error";
        case SESS_ERROR_FORMAT:
            return "format error";
        case SESS_ERROR_DIMENSION_MISMATCH:
            return "dimension mismatch";
        case SESS_ERROR_EMPTY_GROUND_TRUTH:
            return "empty ground truth";
        case SESS_ERROR_INTERNAL:
            return "internal error";
    }
    return "unknown";
}

sess_status sess_image_load(const char* path, sess_image** out) {
    if (!path || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new sess_image{sess::load_image(path)}; });
}

sess_status sess_image_create(int width, int height, const unsigned char* rgb, sess_image** out) {
    if (!rgb || !out || width < 1 || height < 1) {
        set_error("invalid image buffer or dimensions");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        sess::RgbImage img(width, height);
        std::memcpy(img.data.data(), rgb, img.data.size());
        *out = new sess_image{std::move(img)};
    });
}

sess_status sess_image_save(const sess_image* image, const char* path) {
    if (!image || !path) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { sess::save_image(image->rep, path); });
}

int sess_image_width(const sess_image* image) { return image ? image->rep.width : 0; }

int sess_image_height(const sess_image* image) { return image ? image->rep.height : 0; }

void sess_image_free(sess_image* image) { delete image; }

sess_status sess_map_load(const char* path, sess_map** out) {
    if (!path || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new sess_map{sess::load_saliency(path)}; });
}

sess_status sess_map_create(int width, int height, const double* values, sess_map** out) {
    if (!values || !out || width < 1 || height < 1) {
        set_error("invalid map buffer or dimensions");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    const std::size_t count = static_cast<std::size_t>(width) * height;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
            set_error("map values must be finite and within [0,1]");
            return SESS_ERROR_INVALID_ARGUMENT;
        }
    }
    return guarded([&] {
        sess::SaliencyMap map(width, height);
        std::memcpy(map.data.data(), values, count * sizeof(double));
        *out = new sess_map{std::move(map)};
    });
}

sess_status sess_map_save(const sess_map* map, const char* path) {
    if (!map || !path) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { sess::save_map(map->rep, path); });
}

int sess_map_width(const sess_map* map) { return map ? map->rep.width : 0; }

int sess_map_height(const sess_map* map) { return map ? map->rep.height : 0; }

const double* sess_map_values(const sess_map* map) { return map ? map->rep.data.data() : nullptr; }

void sess_map_free(sess_map* map) { delete map; }

sess_status sess_config_create(sess_config** out) {
    if (!out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new sess_config{}; });
}

sess_status sess_config_parse_file(const char* path, sess_config** out) {
    if (!path || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { *out = new sess_config{sess::parse_config(path)}; });
}

sess_status sess_config_set(sess_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { sess::apply_config_entry(cfg->rep, key, value); });
}

sess_status sess_config_format(const sess_config* cfg, char* buffer, size_t capacity,
                               size_t* length) {
    if (!cfg) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const std::string text = sess::format_config(cfg->rep);
        if (length) {
            *length = text.size();
        }
        if (buffer && capacity > 0) {
            const std::size_t n = std::min(capacity - 1, text.size());
            std::memcpy(buffer, text.data(), n);
            buffer[n] = '\0';
        }
    });
}

void sess_config_free(sess_config* cfg) { delete cfg; }

sess_status sess_enhance(const sess_image* image, const sess_map* saliency,
                         const sess_config* cfg, sess_map** out) {
    if (!image || !saliency || !cfg || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const sess::LabImage lab = sess::rgb_to_lab(image->rep);
        *out = new sess_map{sess::enhance(lab, saliency->rep, cfg->rep)};
    });
}

sess_status sess_enhance_full(const sess_image* image, const sess_map* saliency,
                              const sess_config* cfg, sess_result** out) {
    if (!image || !saliency || !cfg || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] {
        const sess::LabImage lab = sess::rgb_to_lab(image->rep);
        auto result = std::make_unique<sess_result>();
        result->rep = sess::sess_run(lab, saliency->rep, cfg->rep);
        result->final_view.rep = result->rep.final_map;
        result->integrated_view.rep = result->rep.integrated;
        result->color_pass_view.rep = result->rep.color_pass;
        result->has_deep = !cfg->rep.no_deep_reintro;
        if (result->has_deep) {
            result->deep_view.rep = result->rep.deep_reintro;
        }
        result->iteration_views.resize(result->rep.iterations.size());
        for (std::size_t i = 0; i < result->rep.iterations.size(); ++i) {
            result->iteration_views[i].rep = result->rep.iterations[i];
        }
        *out = result.release();
    });
}

const sess_map* sess_result_final(const sess_result* result) {
    return result ? &result->final_view : nullptr;
}

int sess_result_iteration_count(const sess_result* result) {
    return result ? static_cast<int>(result->iteration_views.size()) : 0;
}

const sess_map* sess_result_iteration(const sess_result* result, int index) {
    if (!result || index < 0 || index >= static_cast<int>(result->iteration_views.size())) {
        return nullptr;
    }
    return &result->iteration_views[index];
}

const sess_map* sess_result_integrated(const sess_result* result) {
    return result ? &result->integrated_view : nullptr;
}

const sess_map* sess_result_color_pass(const sess_result* result) {
    return result ? &result->color_pass_view : nullptr;
}

const sess_map* sess_result_deep_reintro(const sess_result* result) {
    return result && result->has_deep ? &result->deep_view : nullptr;
}

sess_status sess_result_save_labels(const sess_result* result, const char* path) {
    if (!result || !path) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded([&] { sess::save_labels(result->rep.final_segmentation, path); });
}

sess_status sess_result_save_boundaries(const sess_result* result, const sess_image* image,
                                        const char* path) {
    if (!result || !image || !path) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    return guarded(
        [&] { sess::save_boundary_overlay(image->rep, result->rep.final_segmentation, path); });
}

void sess_result_free(sess_result* result) { delete result; }

sess_status sess_evaluate(const sess_map* prediction, const sess_map* ground_truth,
                          sess_metrics_report* out) {
    if (!prediction || !ground_truth || !out) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    const sess::GroundTruth gt = sess::binarize_ground_truth(ground_truth->rep);
    if (prediction->rep.width == gt.width && prediction->rep.height == gt.height &&
        gt.foreground_count() == 0) {
        set_error("ground truth has no foreground pixels");
        return SESS_ERROR_EMPTY_GROUND_TRUTH;
    }
    return guarded([&] {
        const sess::MetricsReport report = sess::evaluate_all(prediction->rep, gt);
        out->mae = report.mae;
        out->max_f = report.max_f;
        out->weighted_f = report.weighted_f;
        out->s_measure = report.s_measure;
        out->e_measure = report.e_measure;
    });
}

sess_status sess_evaluate_pr(const sess_map* prediction, const sess_map* ground_truth,
                             double* precision, double* recall) {
    if (!prediction || !ground_truth || !precision || !recall) {
        set_error("null argument");
        return SESS_ERROR_INVALID_ARGUMENT;
    }
    const sess::GroundTruth gt = sess::binarize_ground_truth(ground_truth->rep);
    if (prediction->rep.width == gt.width && prediction->rep.height == gt.height &&
        gt.foreground_count() == 0) {
        set_error("ground truth has no foreground pixels");
        return SESS_ERROR_EMPTY_GROUND_TRUTH;
    }
    return guarded([&] {
        const sess::PRCurve curve = sess::pr_curve(prediction->rep, gt);
        for (int i = 0; i < 256; ++i) {
            precision[i] = curve[i].precision;
            recall[i] = curve[i].recall;
        }
    });
}

} /* extern "C" */
