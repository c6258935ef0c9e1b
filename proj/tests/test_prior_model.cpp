#include "roma/prior_model.hpp"

#include <doctest.h>

#include <sstream>

using namespace roma;

namespace {

BoundingBox sized(double area) { return {0, 0, area / 10.0, 10.0, 0.9}; }

} // namespace

TEST_CASE("build_prior sums region counts and orders by latency") {
    const VideoMeta vga{2, 30, 640, 480};
    const std::vector<BoxList> heavy{{sized(1000), sized(3000), sized(9000)}, {sized(1000), sized(2000)}};
    std::vector<BoxList> light{{sized(9000)}, {sized(8000), sized(100)}};
    light[1][1].confidence = 0.1;
    const std::vector<DetectionTrace> traces{DetectionTrace("heavy", heavy, LatencyProfile(0.2)),
                                             DetectionTrace("light", light, LatencyProfile(0.02))};
    const auto p = build_prior(traces, RegionBoundaries{}, vga, 0.3);
    CHECK(p.matrix == std::vector<std::vector<double>>{{3, 1, 1}, {0, 0, 2}});
    CHECK(p.detector_order == std::vector<std::size_t>{1, 0});
    CHECK(p.heaviest() == 0);
    CHECK(p.lightest() == 1);
    CHECK(p.rank_of(0) == 1);
}

TEST_CASE("build_prior rejects bad input") {
    const VideoMeta vga{2, 30, 640, 480};
    CHECK_THROWS_AS(build_prior({}, RegionBoundaries{}, vga, 0.3), DataError);
    const std::vector<DetectionTrace> uneven{DetectionTrace("a", std::vector<BoxList>(2), LatencyProfile(0.1)),
                                             DetectionTrace("b", std::vector<BoxList>(3), LatencyProfile(0.1))};
    CHECK_THROWS_AS(build_prior(uneven, RegionBoundaries{}, vga, 0.3), DataError);
}

TEST_CASE("detection ratio and estimated counts") {
    PriorModel p;
    p.matrix = {{4, 0, 0}, {8, 5, 3}};
    p.detector_order = {0, 1};
    const auto r = detection_ratio(p, 1, 0);
    CHECK(r[0] == 2.0);
    CHECK(r[1] == doctest::Approx(50.0));
    CHECK(r[2] == doctest::Approx(30.0));
    const auto back = detection_ratio(p, 0, 1);
    CHECK(back[0] == 0.5);
    CHECK(back[1] == 0.0);
    PriorModel z;
    z.matrix = {{0, 1}, {0, 2}};
    z.boundaries.thresholds = {100};
    z.detector_order = {0, 1};
    CHECK(detection_ratio(z, 0, 1)[0] == 1.0);
    CHECK(estimate_detected(std::vector<double>{2, 0.5, 1}, SizeHistogram{{3, 4, 0}}) == 8.0);
    CHECK(detection_ratio(p, 1, 1) == std::vector<double>{1, 1, 1});
}

TEST_CASE("prior text format round-trips") {
    PriorModel p;
    p.matrix = {{1921, 3550, 2748}, {4603, 3872, 2488}, {8502, 3506, 2982}, {9526, 3603, 2993}};
    p.detector_order = {0, 1, 2, 3};
    std::stringstream s;
    write_prior(s, p);
    CHECK(read_prior(s) == p);

    PriorModel q;
    q.matrix = {{0.1, 1e-7}, {1.0 / 3.0, 12345.678}};
    q.boundaries.thresholds = {1234.5};
    q.boundaries.reference_width = 1920;
    q.boundaries.reference_height = 1080;
    q.detector_order = {1, 0};
    std::stringstream t;
    write_prior(t, q);
    CHECK(read_prior(t) == q);
}

TEST_CASE("malformed prior files") {
    auto parse = [](const std::string &text) {
        std::istringstream in(text);
        return read_prior(in);
    };
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("roma-prior 2\n"), ParseError);
    CHECK_THROWS_AS(parse("roma-prior 1\ndetectors 1\nregions 2\nthresholds 10\nreference 640 480\norder 0\nrow 1\n"),
                    ParseError);
    CHECK_THROWS_AS(parse("roma-prior 1\ndetectors 1\nregions 2\nthresholds 10\nreference 640 480\norder 0\nrow 0 0\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse("roma-prior 1\ndetectors 2\nregions 1\nthresholds\nreference 640 480\norder 0 0\nrow 1\nrow 1\n"),
                    ConfigError);
    CHECK_NOTHROW(parse("# comment\nroma-prior 1\ndetectors 1\nregions 1\nthresholds\nreference 640 480\norder 0\nrow 3\n"));
}
