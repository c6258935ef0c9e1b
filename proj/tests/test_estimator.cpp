#include "oracles.hpp"

#include "roma/estimator.hpp"

#include <doctest.h>

using namespace roma;

namespace {

LatencyState latencies(std::vector<double> est, std::size_t current, std::size_t previous) {
    LatencyState s;
    s.estimates = std::move(est);
    s.current = current;
    s.previous = previous;
    return s;
}

PriorModel three_detector_prior() {
    PriorModel p;
    p.matrix = {{10, 20, 30}, {20, 25, 30}, {40, 30, 30}};
    p.detector_order = {0, 1, 2};
    return p;
}

} // namespace

TEST_CASE("update_latency") {
    SUBCASE("kept detector scales every estimate") {
        const auto s = update_latency(latencies({0.1, 0.2, 0.3}, 1, 1), 0.4, false);
        CHECK(s.estimates[0] == doctest::Approx(0.2));
        CHECK(s.estimates[1] == 0.4);
        CHECK(s.estimates[2] == doctest::Approx(0.6));
    }
    SUBCASE("switch replaces only the current estimate") {
        const auto s = update_latency(latencies({0.1, 0.2, 0.3}, 1, 0), 0.15, true);
        CHECK(s.estimates == std::vector<double>{0.1, 0.15, 0.3});
    }
    SUBCASE("unchanged latency leaves estimates alone") {
        const auto s = update_latency(latencies({0.1, 0.2, 0.3}, 2, 2), 0.3, false);
        CHECK(s.estimates == std::vector<double>{0.1, 0.2, 0.3});
    }
    SUBCASE("non-positive measurements are errors") {
        CHECK_THROWS_AS(update_latency(latencies({0.1}, 0, 0), 0.0, false), ConfigError);
        CHECK_THROWS_AS(update_latency(latencies({0.1}, 0, 0), -1.0, true), ConfigError);
    }
}

TEST_CASE("frame_block_size") {
    CHECK(frame_block_size(30, 0.225) == 7);
    CHECK(frame_block_size(30, 0) == 1);
    CHECK(frame_block_size(25, 0.1) == 3);
    CHECK(frame_block_size(30, 1.0 / 30.0 * 0.999) == 1);
    CHECK(frame_block_size(30, 5.0) == 30);
    CHECK(frame_block_size(30, 0.966) == 29);
    CHECK(frame_block_size(30, 0.967) == 30);
}

TEST_CASE("missing_per_frame") {
    CHECK(missing_per_frame(10, 10, 4) == 0.0);
    CHECK(missing_per_frame(10, 7, 3) == doctest::Approx(1.0));
    CHECK(missing_per_frame(0, 0, 5) == 0.0);
}

TEST_CASE("update_betas examples") {
    const auto fresh = DegradationState::initial();
    const std::vector<std::size_t> blocks{1, 3, 3};
    SUBCASE("no loss keeps beta at one") {
        const auto s = update_betas(fresh, 8, 0, 5, blocks);
        for (double b : s.beta)
            CHECK(b == 1.0);
    }
    SUBCASE("quadratic decay") {
        const auto s = update_betas(fresh, 10, 2, 3, blocks);
        CHECK(s.beta[0] == 1.0);
        CHECK(s.beta[1] == doctest::Approx(0.64));
        CHECK(s.beta[2] == doctest::Approx(0.36));
    }
    SUBCASE("small block freezes beta") {
        auto prior = update_betas(fresh, 10, 2, 3, blocks);
        const auto s = update_betas(prior, 10, 5, 2, blocks);
        CHECK(s.beta == prior.beta);
        CHECK(s.beta_prev == prior.beta);
    }
    SUBCASE("beta reaches zero once every object is lost") {
        const auto s = update_betas(fresh, 4, 3, 5, blocks);
        CHECK(s.beta[1] == doctest::Approx(1.0 / 16.0));
        CHECK(s.beta[2] == 0.0);
        CHECK(s.beta[4] == 0.0);
    }
    SUBCASE("entries past the current block reuse the previous decay") {
        auto first = update_betas(fresh, 10, 1, 10, blocks);
        const auto s = update_betas(first, 10, 2, 3, std::vector<std::size_t>{3, 10});
        for (std::size_t j = 3; j < 10; ++j)
            CHECK(s.beta[j] == doctest::Approx(s.beta[j - 1] * first.beta[j] / first.beta[j - 1]));
    }
}

TEST_CASE("update_betas agrees with the recursion on random input") {
    oracle::Gen g(21);
    auto state = DegradationState::initial();
    for (int k = 0; k < 2000; ++k) {
        const double q0 = g.coin(0.1) ? 0.0 : g.uniform(0, 30);
        const double u = g.coin(0.1) ? 0.0 : g.uniform(0, 5);
        const std::size_t bc = g.index(1, 30);
        std::vector<std::size_t> blocks{g.index(1, 30), bc, g.index(1, 30)};
        const auto expected = oracle::betas(state.beta, q0, u, bc, blocks);
        const auto next = update_betas(state, q0, u, bc, blocks);
        for (std::size_t j = 0; j < expected.size(); ++j)
            CHECK(oracle::rel_err(next.beta[j], expected[j]) <= 1e-12);
        CHECK(next.beta[0] == 1.0);
        for (std::size_t j = 1; j < next.beta.size(); ++j) {
            CHECK(next.beta[j] <= next.beta[j - 1]);
            CHECK(next.beta[j] >= 0.0);
        }
        state = next;
    }
}

TEST_CASE("compute_rap") {
    DegradationState betas = DegradationState::initial();
    SUBCASE("symmetric pool") {
        const std::vector<double> l{5, 5, 5};
        const auto r = compute_rap(l, 5, betas, std::vector<std::size_t>{4, 4, 4}, 1);
        for (double a : r.rap)
            CHECK(a == doctest::Approx(5.0 / 5.1));
    }
    SUBCASE("gamma from the mean of beta") {
        betas.beta[1] = 0.64;
        betas.beta[2] = 0.36;
        for (std::size_t j = 3; j < betas.beta.size(); ++j)
            betas.beta[j] = 0.36;
        const auto r = compute_rap(std::vector<double>{1, 1}, 1, betas, std::vector<std::size_t>{1, 3}, 1);
        CHECK(r.gamma[0] == doctest::Approx(1.5));
        CHECK(r.gamma[1] == doctest::Approx(1.0));
    }
    SUBCASE("zero measured count uses the divisor guard") {
        const auto r = compute_rap(std::vector<double>{2, 0}, 0, betas, std::vector<std::size_t>{1, 1}, 1);
        CHECK(r.alpha[0] == doctest::Approx(20));
        CHECK(r.alpha[1] == 0.0);
    }
    SUBCASE("current detector has gamma one") {
        oracle::Gen g(22);
        for (int k = 0; k < 100; ++k) {
            for (std::size_t j = 1; j < betas.beta.size(); ++j)
                betas.beta[j] = betas.beta[j - 1] * g.uniform(0.5, 1.0);
            const std::size_t c = g.index(0, 3);
            std::vector<std::size_t> blocks(4);
            for (auto &b : blocks)
                b = g.index(1, 30);
            const auto r = compute_rap(std::vector<double>{1, 2, 3, 4}, 3, betas, blocks, c);
            CHECK(r.gamma[c] == 1.0);
        }
    }
}

TEST_CASE("select_detector breaks ties toward the lighter detector") {
    const std::vector<std::size_t> order{2, 0, 1};
    CHECK(select_detector(std::vector<double>{1, 1, 1}, order) == 2);
    CHECK(select_detector(std::vector<double>{1, 3, 3}, order) == 2);
    CHECK(select_detector(std::vector<double>{1, 4, 3}, order) == 1);
    CHECK(select_detector(std::vector<double>{5, 3, 3}, order) == 0);
    CHECK(select_detector(std::vector<double>{5, 3, 3}, std::vector<std::size_t>{0, 1, 2}) == 0);
}

TEST_CASE("estimator starts heavy and stays there on a static scene") {
    const VideoMeta meta{100, 30, 640, 480};
    RomaEstimator est(three_detector_prior(), {0.01, 0.02, 0.05}, meta, {});
    CHECK(est.current() == 2);
    const std::vector<BoundingBox> boxes{{10, 10, 20, 20, 1}, {100, 100, 60, 60, 1}, {300, 300, 100, 100, 1}};
    for (int k = 0; k < 10; ++k) {
        const auto t = est.step(boxes, 0.05);
        CHECK(t.current == 2);
        CHECK(t.selected == 2);
        if (k > 0) {
            CHECK(t.surviving == 3);
            CHECK(t.missing_per_frame == 0.0);
        }
    }
}

TEST_CASE("estimator step telemetry follows the formulas") {
    const VideoMeta meta{100, 30, 640, 480};
    auto prior = three_detector_prior();
    RomaEstimator est(prior, {0.01, 0.02, 0.1}, meta, {});
    const std::vector<BoundingBox> boxes{{10, 10, 20, 20, 1}, {100, 100, 60, 60, 1}};
    auto t = est.step(boxes, 0.2);
    // kept detector: every estimate doubles
    CHECK(t.latency_estimates[0] == doctest::Approx(0.02));
    CHECK(t.latency_estimates[2] == doctest::Approx(0.2));
    CHECK(t.rap.block_sizes == std::vector<std::size_t>{1, 2, 7});
    // region counts {1, 1, 0}; r_0 = [10/40, 20/30, 1]
    CHECK(t.estimated_counts[0] == doctest::Approx(0.25 + 20.0 / 30.0));
    CHECK(t.estimated_counts[2] == doctest::Approx(2.0));
    CHECK(t.rap.alpha[2] == doctest::Approx(2.0 / 2.1));
}

TEST_CASE("estimator downgrades when objects vanish between analyzed frames") {
    const VideoMeta meta{100, 30, 640, 480};
    PriorModel p;
    p.matrix = {{90, 10, 10}, {100, 10, 10}};
    p.detector_order = {0, 1};
    RomaEstimator est(p, {0.01, 0.3}, meta, {});
    oracle::Gen g(23);
    std::size_t last = est.current();
    for (int k = 0; k < 6; ++k) {
        const auto boxes = g.boxes(10, 600);
        last = est.step(boxes, est.current() == 0 ? 0.01 : 0.3).selected;
    }
    CHECK(last == 0);
}
