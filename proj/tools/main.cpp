// Command-line driver for the sess shared library: single-pair enhancement,
// batch dataset processing and metric evaluation. Talks to the pipeline
// exclusively through the public C interface.

#include <sess/sess.h>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct ConfigDeleter {
    void operator()(sess_config* c) const { sess_config_free(c); }
};
struct ImageDeleter {
    void operator()(sess_image* i) const { sess_image_free(i); }
};
struct MapDeleter {
    void operator()(sess_map* m) const { sess_map_free(m); }
};
struct ResultDeleter {
    void operator()(sess_result* r) const { sess_result_free(r); }
};

using ConfigPtr = std::unique_ptr<sess_config, ConfigDeleter>;
using ImagePtr = std::unique_ptr<sess_image, ImageDeleter>;
using MapPtr = std::unique_ptr<sess_map, MapDeleter>;
using ResultPtr = std::unique_ptr<sess_result, ResultDeleter>;

[[noreturn]] void fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    std::exit(1);
}

void check(sess_status status, const std::string& context) {
    if (status != SESS_OK) {
        fail(context + ": " + sess_last_error());
    }
}

// Options shared by every subcommand that builds a configuration.
struct ConfigArgs {
    std::string config_file;
    std::string preset;
    std::vector<std::string> sets;
    bool no_deep_reintro = false;
    bool keep_reduced_superpixels = false;
    bool print_config = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "Configuration file (key = value lines)");
        cmd->add_option("--preset", preset, "Parameter preset: u2net, basnet or msfnet");
        cmd->add_option("--set", sets, "Override a single key, e.g. --set gamma=5")
            ->expected(-1);
        cmd->add_flag("--no-deep-reintro", no_deep_reintro,
                      "Skip reintroducing the input map into the final merge");
        cmd->add_flag("--keep-reduced-superpixels", keep_reduced_superpixels,
                      "Keep the decayed superpixel count for the final color pass");
        cmd->add_flag("--print-config", print_config,
                      "Print the effective configuration and exit");
    }

    ConfigPtr build() const {
        sess_config* raw = nullptr;
        if (!config_file.empty()) {
            check(sess_config_parse_file(config_file.c_str(), &raw), "config");
        } else {
            check(sess_config_create(&raw), "config");
        }
        ConfigPtr cfg(raw);
        if (!preset.empty()) {
            check(sess_config_set(cfg.get(), "preset", preset.c_str()), "config");
        }
        for (const std::string& kv : sets) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                fail("--set expects key=value, got '" + kv + "'");
            }
            check(sess_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                  kv.substr(eq + 1).c_str()),
                  "config");
        }
        if (no_deep_reintro) {
            check(sess_config_set(cfg.get(), "no_deep_reintro", "true"), "config");
        }
        if (keep_reduced_superpixels) {
            check(sess_config_set(cfg.get(), "keep_reduced_superpixels", "true"), "config");
        }
        return cfg;
    }

    // Returns true when the command should stop after printing.
    bool handle_print(const ConfigPtr& cfg) const {
        if (!print_config) {
            return false;
        }
        size_t length = 0;
        check(sess_config_format(cfg.get(), nullptr, 0, &length), "config");
        std::string text(length + 1, '\0');
        check(sess_config_format(cfg.get(), text.data(), text.size(), &length), "config");
        text.resize(length);
        std::cout << text;
        return true;
    }
};

std::string lower_ext(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_raster(const fs::path& p) {
    const std::string ext = lower_ext(p);
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

// stem -> path for every raster in a directory.
std::map<std::string, fs::path> index_rasters(const fs::path& dir, const char* what) {
    if (!fs::is_directory(dir)) {
        fail(std::string(what) + " directory does not exist: " + dir.string());
    }
    std::map<std::string, fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_raster(entry.path())) {
            out[entry.path().stem().string()] = entry.path();
        }
    }
    return out;
}

int jobs_from_env() {
    if (const char* env = std::getenv("SESS_JOBS")) {
        const int v = std::atoi(env);
        if (v >= 1) {
            return v;
        }
    }
    return 1;
}

MapPtr load_map_or_fail(const std::string& path) {
    sess_map* raw = nullptr;
    check(sess_map_load(path.c_str(), &raw), path);
    return MapPtr(raw);
}

ImagePtr load_image_or_fail(const std::string& path) {
    sess_image* raw = nullptr;
    check(sess_image_load(path.c_str(), &raw), path);
    return ImagePtr(raw);
}

std::string format_metric(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << v;
    return out.str();
}

// ---- enhance --------------------------------------------------------------

struct EnhanceArgs {
    std::string image, saliency, out;
    std::string dump_iterations, dump_stages, dump_labels, dump_boundaries;
    ConfigArgs config;
};

void dump_result(const sess_result* result, const EnhanceArgs& args) {
    if (!args.dump_iterations.empty()) {
        fs::create_directories(args.dump_iterations);
        const int count = sess_result_iteration_count(result);
        for (int i = 0; i < count; ++i) {
            std::ostringstream name;
            name << "iteration_" << (i < 9 ? "0" : "") << (i + 1) << ".png";
            const fs::path path = fs::path(args.dump_iterations) / name.str();
            check(sess_map_save(sess_result_iteration(result, i), path.string().c_str()),
                  path.string());
        }
        const fs::path integrated = fs::path(args.dump_iterations) / "integrated.png";
        check(sess_map_save(sess_result_integrated(result), integrated.string().c_str()),
              integrated.string());
    }
    if (!args.dump_stages.empty()) {
        fs::create_directories(args.dump_stages);
        const fs::path color = fs::path(args.dump_stages) / "color_pass.png";
        check(sess_map_save(sess_result_color_pass(result), color.string().c_str()),
              color.string());
        if (const sess_map* deep = sess_result_deep_reintro(result)) {
            const fs::path path = fs::path(args.dump_stages) / "deep_reintro.png";
            check(sess_map_save(deep, path.string().c_str()), path.string());
        }
    }
}

int run_enhance(const EnhanceArgs& args) {
    const ConfigPtr cfg = args.config.build();
    if (args.config.handle_print(cfg)) {
        return 0;
    }
    if (args.image.empty() || args.saliency.empty() || args.out.empty()) {
        fail("enhance needs --image, --saliency and --out");
    }

    const ImagePtr image = load_image_or_fail(args.image);
    const MapPtr saliency = load_map_or_fail(args.saliency);
    if (sess_image_width(image.get()) != sess_map_width(saliency.get()) ||
        sess_image_height(image.get()) != sess_map_height(saliency.get())) {
        std::ostringstream msg;
        msg << "dimension mismatch: image " << args.image << " is "
            << sess_image_width(image.get()) << "x" << sess_image_height(image.get())
            << " but saliency " << args.saliency << " is " << sess_map_width(saliency.get())
            << "x" << sess_map_height(saliency.get());
        fail(msg.str());
    }

    const bool need_full = !args.dump_iterations.empty() || !args.dump_stages.empty() ||
                           !args.dump_labels.empty() || !args.dump_boundaries.empty();
    if (need_full) {
        sess_result* raw = nullptr;
        check(sess_enhance_full(image.get(), saliency.get(), cfg.get(), &raw), "enhance");
        const ResultPtr result(raw);
        dump_result(result.get(), args);
        if (!args.dump_labels.empty()) {
            check(sess_result_save_labels(result.get(), args.dump_labels.c_str()),
                  args.dump_labels);
        }
        if (!args.dump_boundaries.empty()) {
            check(sess_result_save_boundaries(result.get(), image.get(),
                                              args.dump_boundaries.c_str()),
                  args.dump_boundaries);
        }
        check(sess_map_save(sess_result_final(result.get()), args.out.c_str()), args.out);
    } else {
        sess_map* raw = nullptr;
        check(sess_enhance(image.get(), saliency.get(), cfg.get(), &raw), "enhance");
        const MapPtr enhanced(raw);
        check(sess_map_save(enhanced.get(), args.out.c_str()), args.out);
    }
    return 0;
}

// ---- batch ------------------------------------------------------------------

struct BatchArgs {
    std::string images_dir, saliency_dir, out_dir;
    int jobs = 0;
    ConfigArgs config;
};

int run_batch(const BatchArgs& args) {
    const ConfigPtr cfg = args.config.build();
    if (args.config.handle_print(cfg)) {
        return 0;
    }
    if (args.images_dir.empty() || args.saliency_dir.empty() || args.out_dir.empty()) {
        fail("batch needs --images, --saliency and --out");
    }

    const auto images = index_rasters(args.images_dir, "image");
    const auto maps = index_rasters(args.saliency_dir, "saliency");

    struct Pair {
        std::string stem;
        fs::path image, saliency, out;
    };
    std::vector<Pair> pairs;
    std::vector<std::string> unmatched;
    for (const auto& [stem, map_path] : maps) {
        const auto it = images.find(stem);
        if (it == images.end()) {
            unmatched.push_back(stem);
            continue;
        }
        pairs.push_back({stem, it->second, map_path, fs::path(args.out_dir) / (stem + ".png")});
    }
    if (pairs.empty()) {
        fail("no image/saliency pairs found");
    }
    fs::create_directories(args.out_dir);

    const int jobs = std::max(1, args.jobs > 0 ? args.jobs : jobs_from_env());
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(pairs.size());
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pairs.size()) {
                return;
            }
            const Pair& pair = pairs[i];
            sess_image* image = nullptr;
            sess_map* saliency = nullptr;
            sess_map* enhanced = nullptr;
            auto record = [&](const std::string& what) {
                errors[i] = what + ": " + sess_last_error();
            };
            if (sess_image_load(pair.image.string().c_str(), &image) != SESS_OK) {
                record("load image");
            } else if (sess_map_load(pair.saliency.string().c_str(), &saliency) != SESS_OK) {
                record("load saliency");
            } else if (sess_enhance(image, saliency, cfg.get(), &enhanced) != SESS_OK) {
                record("enhance");
            } else if (sess_map_save(enhanced, pair.out.string().c_str()) != SESS_OK) {
                record("save");
            }
            sess_map_free(enhanced);
            sess_map_free(saliency);
            sess_image_free(image);
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
        t.join();
    }

    std::size_t failed = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!errors[i].empty()) {
            ++failed;
            std::cerr << "failed " << pairs[i].stem << " (" << errors[i] << ")\n";
        }
    }
    for (const std::string& stem : unmatched) {
        std::cerr << "no matching image for saliency '" << stem << "'\n";
    }
    std::cout << "processed " << (pairs.size() - failed) << ", failed "
              << (failed + unmatched.size()) << "\n";
    return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
    std::string pred_dir, gt_dir, report_csv, pr_csv;
    int jobs = 0;
};

int run_eval(const EvalArgs& args) {
    if (args.pred_dir.empty() || args.gt_dir.empty() || args.report_csv.empty() ||
        args.pr_csv.empty()) {
        fail("eval needs --pred, --gt, --report and --pr");
    }
    const auto preds = index_rasters(args.pred_dir, "prediction");
    const auto gts = index_rasters(args.gt_dir, "ground-truth");

    struct Pair {
        std::string stem;
        fs::path pred, gt;
    };
    std::vector<Pair> pairs;
    for (const auto& [stem, pred_path] : preds) {
        const auto it = gts.find(stem);
        if (it != gts.end()) {
            pairs.push_back({stem, pred_path, it->second});
        }
    }
    if (pairs.empty()) {
        fail("no prediction/ground-truth pairs found");
    }

    struct Row {
        bool evaluated = false;
        bool skipped_empty = false;
        std::string error;
        sess_metrics_report report{};
        std::vector<double> precision, recall;
    };
    std::vector<Row> rows(pairs.size());

    const int jobs = std::max(1, args.jobs > 0 ? args.jobs : jobs_from_env());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pairs.size()) {
                return;
            }
            Row& row = rows[i];
            sess_map* pred = nullptr;
            sess_map* gt = nullptr;
            if (sess_map_load(pairs[i].pred.string().c_str(), &pred) != SESS_OK) {
                row.error = std::string("load prediction: ") + sess_last_error();
            } else if (sess_map_load(pairs[i].gt.string().c_str(), &gt) != SESS_OK) {
                row.error = std::string("load ground truth: ") + sess_last_error();
            } else {
                const sess_status status = sess_evaluate(pred, gt, &row.report);
                if (status == SESS_ERROR_EMPTY_GROUND_TRUTH) {
                    row.skipped_empty = true;
                } else if (status != SESS_OK) {
                    row.error = sess_last_error();
                } else {
                    row.precision.resize(256);
                    row.recall.resize(256);
                    if (sess_evaluate_pr(pred, gt, row.precision.data(), row.recall.data()) !=
                        SESS_OK) {
                        row.error = sess_last_error();
                    } else {
                        row.evaluated = true;
                    }
                }
            }
            sess_map_free(pred);
            sess_map_free(gt);
        }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) {
        threads.emplace_back(worker);
    }
    for (std::thread& t : threads) {
        t.join();
    }

    std::ofstream report(args.report_csv);
    if (!report) {
        fail("cannot write " + args.report_csv);
    }
    report << "image,mae,max_f,weighted_f,s_measure,e_measure\n";
    sess_metrics_report mean{};
    std::vector<double> mean_precision(256, 0.0), mean_recall(256, 0.0);
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Row& row = rows[i];
        if (!row.evaluated) {
            continue;
        }
        ++evaluated;
        report << pairs[i].stem << "," << format_metric(row.report.mae) << ","
               << format_metric(row.report.max_f) << "," << format_metric(row.report.weighted_f)
               << "," << format_metric(row.report.s_measure) << ","
               << format_metric(row.report.e_measure) << "\n";
        mean.mae += row.report.mae;
        mean.max_f += row.report.max_f;
        mean.weighted_f += row.report.weighted_f;
        mean.s_measure += row.report.s_measure;
        mean.e_measure += row.report.e_measure;
        for (int t = 0; t < 256; ++t) {
            mean_precision[t] += row.precision[t];
            mean_recall[t] += row.recall[t];
        }
    }
    if (evaluated == 0) {
        fail("no pair could be evaluated");
    }
    report << "mean," << format_metric(mean.mae / evaluated) << ","
           << format_metric(mean.max_f / evaluated) << ","
           << format_metric(mean.weighted_f / evaluated) << ","
           << format_metric(mean.s_measure / evaluated) << ","
           << format_metric(mean.e_measure / evaluated) << "\n";

    std::ofstream pr(args.pr_csv);
    if (!pr) {
        fail("cannot write " + args.pr_csv);
    }
    pr << "threshold,precision,recall\n";
    for (int t = 0; t < 256; ++t) {
        pr << t << "," << format_metric(mean_precision[t] / evaluated) << ","
           << format_metric(mean_recall[t] / evaluated) << "\n";
    }

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (rows[i].skipped_empty) {
            std::cerr << "skipped " << pairs[i].stem << " (empty ground truth)\n";
        } else if (!rows[i].error.empty()) {
            std::cerr << "failed " << pairs[i].stem << " (" << rows[i].error << ")\n";
        }
    }
    std::cout << "evaluated " << evaluated << " of " << pairs.size() << " pairs\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Saliency-map enhancement over superpixel similarity"};
    app.require_subcommand(1);

    EnhanceArgs enhance_args;
    CLI::App* enhance = app.add_subcommand("enhance", "Enhance one saliency map");
    enhance->add_option("--image", enhance_args.image, "Input image (PNG/PPM)");
    enhance->add_option("--saliency", enhance_args.saliency, "Input saliency map (grayscale)");
    enhance->add_option("--out", enhance_args.out, "Output map path");
    enhance->add_option("--dump-iterations", enhance_args.dump_iterations,
                        "Directory for per-iteration maps plus the integrated map");
    enhance->add_option("--dump-stages", enhance_args.dump_stages,
                        "Directory for the color-pass and reintroduction maps");
    enhance->add_option("--dump-labels", enhance_args.dump_labels,
                        "Write the final superpixel labels (16-bit PNG)");
    enhance->add_option("--dump-boundaries", enhance_args.dump_boundaries,
                        "Write a superpixel boundary overlay");
    enhance_args.config.attach(enhance);

    BatchArgs batch_args;
    CLI::App* batch = app.add_subcommand("batch", "Enhance a dataset directory");
    batch->add_option("--images", batch_args.images_dir, "Image directory");
    batch->add_option("--saliency", batch_args.saliency_dir, "Saliency map directory");
    batch->add_option("--out", batch_args.out_dir, "Output directory");
    batch->add_option("--jobs", batch_args.jobs, "Parallel workers (default $SESS_JOBS or 1)");
    batch_args.config.attach(batch);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    eval->add_option("--pred", eval_args.pred_dir, "Prediction directory");
    eval->add_option("--gt", eval_args.gt_dir, "Ground-truth directory");
    eval->add_option("--report", eval_args.report_csv, "Per-image metrics CSV");
    eval->add_option("--pr", eval_args.pr_csv, "Aggregated precision-recall CSV");
    eval->add_option("--jobs", eval_args.jobs, "Parallel workers (default $SESS_JOBS or 1)");

    CLI11_PARSE(app, argc, argv);

    if (*enhance) {
        return run_enhance(enhance_args);
    }
    if (*batch) {
        return run_batch(batch_args);
    }
    return run_eval(eval_args);
}
