#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/fusion.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace sess;

namespace {

SaliencyMap collapse_oracle_state(const std::vector<double>& state, int w, int h, int depth) {
    SaliencyMap out(w, h);
    const std::size_t plane = static_cast<std::size_t>(w) * h;
    for (std::size_t p = 0; p < plane; ++p) {
        double sum = 0.0;
        for (int z = 0; z < depth; ++z) {
            sum += 1.0 / (1.0 + std::exp(-state[z * plane + p]));
        }
        out.data[p] = sum / depth;
    }
    return out;
}

}  // namespace

TEST_CASE("a stack needs at least one layer") {
    CHECK_THROWS_AS(MapStack::from({}), InvalidArgument);
    SaliencyMap a(4, 4, 0.5), b(5, 4, 0.5);
    CHECK_THROWS_AS(MapStack::from({a, b}), DimensionError);
}

TEST_CASE("zero update rate returns the clamped layer mean") {
    const SaliencyMap layer = test::random_map(9, 6, 21);
    CaConfig cfg;
    cfg.lambda = 0.0;

    SUBCASE("single layer is the identity within the clamp") {
        const SaliencyMap out = integrate(MapStack::from({layer}), cfg);
        for (std::size_t p = 0; p < layer.pixels(); ++p) {
            const double clamped = std::clamp(static_cast<double>(layer.data[p]), cfg.epsilon,
                                              1.0 - cfg.epsilon);
            CHECK(std::abs(out.data[p] - clamped) <= 1e-9);
        }
    }
    SUBCASE("two layers average") {
        const SaliencyMap other = test::random_map(9, 6, 22);
        const SaliencyMap out = integrate(MapStack::from({layer, other}), cfg);
        for (std::size_t p = 0; p < layer.pixels(); ++p) {
            const double a = std::clamp(static_cast<double>(layer.data[p]), cfg.epsilon,
                                        1.0 - cfg.epsilon);
            const double b = std::clamp(static_cast<double>(other.data[p]), cfg.epsilon,
                                        1.0 - cfg.epsilon);
            CHECK(std::abs(out.data[p] - (a + b) / 2.0) <= 1e-9);
        }
    }
}

TEST_CASE("uniformly salient layer grows everywhere") {
    const SaliencyMap layer(10, 8, 0.8f);
    CaConfig cfg;  // lambda 1e-4, 3 steps
    const SaliencyMap out = integrate(MapStack::from({layer}), cfg);
    for (std::size_t p = 0; p < layer.pixels(); ++p) {
        CHECK(out.data[p] > layer.data[p]);
    }
}

TEST_CASE("automaton matches the direct simulation oracle") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 6; ++trial) {
        const int depth = 2 + static_cast<int>(rng() % 3);
        std::vector<SaliencyMap> layers;
        for (int z = 0; z < depth; ++z) {
            layers.push_back(test::random_map(8, 8, rng()));
        }
        const MapStack stack = MapStack::from(layers);
        for (int steps : {1, 2, 3}) {
            CaConfig cfg;
            cfg.steps = steps;
            const SaliencyMap out = integrate(stack, cfg);
            const auto state = test::automaton_oracle(stack.layers, stack.thresholds, cfg.lambda,
                                                      steps, cfg.epsilon);
            const SaliencyMap expected = collapse_oracle_state(state, 8, 8, depth);
            REQUIRE(out.data.size() == expected.data.size());
            for (std::size_t p = 0; p < out.data.size(); ++p) {
                CHECK(out.data[p] == expected.data[p]);
            }
        }
    }
}

TEST_CASE("two identical layers behave like a reinforced single layer") {
    const SaliencyMap layer = test::random_map(8, 8, 77);
    const MapStack stack = MapStack::from({layer, layer});
    CaConfig cfg;
    const SaliencyMap out = integrate(stack, cfg);
    const auto state =
        test::automaton_oracle(stack.layers, stack.thresholds, cfg.lambda, cfg.steps, cfg.epsilon);
    const SaliencyMap expected = collapse_oracle_state(state, 8, 8, 2);
    for (std::size_t p = 0; p < out.data.size(); ++p) {
        CHECK(out.data[p] == expected.data[p]);
    }
}

TEST_CASE("merge takes the per-pixel maximum") {
    SaliencyMap a(2, 1), b(2, 1);
    a.data = {0.3f, 0.0f};
    b.data = {0.8f, 0.0f};
    const SaliencyMap merged = merge_final(a, b);
    CHECK(merged.data[0] == 0.8f);
    CHECK(merged.data[1] == 0.0f);

    const SaliencyMap m = test::random_map(7, 5, 3);
    const SaliencyMap n = test::random_map(7, 5, 4);
    const SaliencyMap k = test::random_map(7, 5, 5);
    CHECK(merge_final(m, n).data == merge_final(n, m).data);
    CHECK(merge_final(merge_final(m, n), k).data == merge_final(m, merge_final(n, k)).data);
    CHECK(merge_final(m, m).data == m.data);

    SaliencyMap zero(7, 5, 0.0f);
    CHECK(merge_final(m, zero).data == m.data);

    SaliencyMap wrong(6, 5, 0.0f);
    CHECK_THROWS_AS(merge_final(m, wrong), DimensionError);
}

TEST_CASE("suppression zeroes only the low tail") {
    SaliencyMap map(10, 10);
    for (std::size_t p = 0; p < 45; ++p) {
        map.data[p] = 0.4f;
    }
    for (std::size_t p = 45; p < 90; ++p) {
        map.data[p] = 0.7f;
    }
    for (std::size_t p = 90; p < 100; ++p) {
        map.data[p] = 0.01f;
    }
    const SaliencyMap out = suppress_low(map);
    const double half_psi = otsu_threshold(map) / 2.0;
    for (std::size_t p = 0; p < map.pixels(); ++p) {
        if (static_cast<double>(map.data[p]) < half_psi) {
            CHECK(out.data[p] == 0.0f);
        } else {
            CHECK(out.data[p] == map.data[p]);
        }
        CHECK(out.data[p] <= map.data[p]);
    }
    CHECK(out.data[95] == 0.0f);  // the 0.01 tail goes
    CHECK(out.data[0] == 0.4f);

    SaliencyMap binary(4, 4);
    binary.data[5] = binary.data[6] = 1.0f;
    CHECK(suppress_low(binary).data == binary.data);

    const SaliencyMap constant(4, 4, 0.37f);
    CHECK(suppress_low(constant).data == constant.data);
}

TEST_CASE("deep reintroduction averages inside superpixels") {
    // Two-tone image so the forest splits at the color edge.
    const int w = 12, h = 8;
    LabImage lab(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            lab.at(x, y)[0] = x < 6 ? 0.2f : 0.8f;
            lab.at(x, y)[1] = 0.5f;
            lab.at(x, y)[2] = 0.5f;
        }
    }
    const SaliencyMap guide(w, h, 0.0f);
    SeedSet seeds;
    seeds.positions = {{3, 4}, {8, 4}};
    seeds.object_flags = {0, 0};
    SuperpixelParams params;
    params.gamma = 0.0;
    const Segmentation seg = ift_segment(lab, guide, seeds, nullptr, params);

    SUBCASE("constant map is reproduced") {
        const SaliencyMap s0(w, h, 0.7f);
        const SaliencyMap sd = reintroduce_deep(s0, seg);
        for (float v : sd.data) {
            CHECK(v == doctest::Approx(0.7).epsilon(1e-7));
        }
    }
    SUBCASE("aligned binary map is reproduced") {
        SaliencyMap s0(w, h, 0.0f);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < 6; ++x) {
                s0.at(x, y) = 1.0f;
            }
        }
        const SaliencyMap sd = reintroduce_deep(s0, seg);
        CHECK(sd.data == s0.data);
    }
    SUBCASE("half-and-half region averages to one half") {
        SaliencyMap s0(w, h, 0.0f);
        for (int y = 0; y < h / 2; ++y) {
            for (int x = 0; x < w; ++x) {
                s0.at(x, y) = 1.0f;
            }
        }
        const SaliencyMap sd = reintroduce_deep(s0, seg);
        for (float v : sd.data) {
            CHECK(v == doctest::Approx(0.5).epsilon(1e-7));
        }
    }
}

TEST_CASE("final color pass bypasses on a degenerate query split") {
    const RgbImage scene = test::completion_scene(48, 36);
    const LabImage lab = rgb_to_lab(scene);
    const SaliencyMap integrated(48, 36, 0.5f);
    SessConfig cfg;
    cfg.superpixels = 40;
    cfg.seeds_per_component = 4;
    cfg.oisf_iters = 1;
    const ColorPassResult result = final_color_pass(lab, integrated, cfg, cfg.superpixels);
    CHECK(result.bypassed);
    CHECK(result.map.data == integrated.data);
    CHECK(result.segmentation.count() == 40);
}

TEST_CASE("final color pass restores the requested superpixel count") {
    RgbImage scene = test::completion_scene(48, 36);
    test::draw_disk(scene, 24, 18, 7, {170, 60, 60}, 1);
    const LabImage lab = rgb_to_lab(scene);
    SaliencyMap integrated(48, 36, 0.05f);
    test::fill_disk(integrated, 24, 18, 7, 0.95f);
    SessConfig cfg;
    cfg.seeds_per_component = 4;
    cfg.oisf_iters = 1;
    const ColorPassResult full = final_color_pass(lab, integrated, cfg, 64);
    CHECK(full.segmentation.count() == 64);
    CHECK_FALSE(full.bypassed);
    const ColorPassResult reduced = final_color_pass(lab, integrated, cfg, 24);
    CHECK(reduced.segmentation.count() == 24);
}

TEST_CASE("pipeline completes the twin disk and stays deterministic") {
    const int w = 96, h = 72;
    RgbImage scene = test::completion_scene(w, h);
    test::draw_disk(scene, 26, 36, 11, {170, 60, 60}, 1);
    test::draw_disk(scene, 68, 36, 13, {170, 60, 60}, 1);
    const LabImage lab = rgb_to_lab(scene);
    SaliencyMap s0(w, h, 0.0f);
    test::fill_disk(s0, 26, 36, 11, 1.0f);

    SessConfig cfg;
    cfg.iterations = 4;
    cfg.superpixels = 120;
    cfg.seeds_per_component = 8;
    cfg.oisf_iters = 2;

    const SessOutputs out = sess_run(lab, s0, cfg);
    REQUIRE(static_cast<int>(out.iterations.size()) == cfg.iterations);
    CHECK(out.final_map.width == w);
    CHECK(out.final_map.height == h);
    for (float v : out.final_map.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }

    double twin = 0.0, twin_n = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (test::inside_disk(x, y, 68, 36, 13)) {
                twin += out.final_map.at(x, y);
                twin_n += 1.0;
            }
        }
    }
    CHECK(twin / twin_n >= 0.5);

    const SaliencyMap again = enhance(lab, s0, cfg);
    CHECK(again.data == out.final_map.data);
}

TEST_CASE("a perfect input map does not regress") {
    const int w = 64, h = 48;
    RgbImage scene = test::completion_scene(w, h);
    test::draw_disk(scene, 32, 24, 10, {60, 90, 170}, 1);
    const LabImage lab = rgb_to_lab(scene);
    SaliencyMap s0(w, h, 0.0f);
    test::fill_disk(s0, 32, 24, 10, 1.0f);

    SessConfig cfg;
    cfg.iterations = 3;
    cfg.superpixels = 80;
    cfg.seeds_per_component = 6;
    cfg.oisf_iters = 2;
    const SaliencyMap out = enhance(lab, s0, cfg);

    double disk = 0.0, disk_n = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (test::inside_disk(x, y, 32, 24, 10)) {
                disk += out.at(x, y);
                disk_n += 1.0;
            }
        }
    }
    CHECK(disk / disk_n >= 0.9);
}

TEST_CASE("dimension mismatches are rejected") {
    const LabImage lab = rgb_to_lab(test::completion_scene(32, 24));
    const SaliencyMap s0(16, 12, 0.5f);
    SessConfig cfg;
    CHECK_THROWS_AS(enhance(lab, s0, cfg), DimensionError);
}
