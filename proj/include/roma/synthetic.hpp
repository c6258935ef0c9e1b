#pragma once

// Synthetic videos with known ground truth and simulated detector traces.
//
// Objects of a segment live for the whole segment, move in a straight line at
// the segment's velocity (pixels per frame) and wrap at the frame edges. Each
// detector sees each object on each frame with the recall of the object's size
// region, and reports it with uniform jitter on the box position. With
// `persistence` p the previous frame's seen/missed state is kept with
// probability p and redrawn otherwise, which preserves the per-frame recall.
//
// Scenario files are JSON:
//   {
//     "format": "roma-scenario", "version": 1,
//     "width": 640, "height": 480, "fps": 30,
//     "boundaries": {"thresholds": [2500, 7500], "reference": [640, 480]},
//     "jitter": 1.0, "aspect": 0.5, "persistence": 0.0,
//     "segments": [{"frames": 120, "objects": 10, "size_weights": [1, 0, 0], "velocity": 0.5}],
//     "detectors": [{"name": "tiny", "latency": 0.03, "recall": [0.3, 0.7, 0.9],
//                    "confidence": [0.5, 1.0]}]
//   }

#include "roma/geometry.hpp"
#include "roma/trace_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace roma {

inline constexpr int kScenarioVersion = 1;

struct SegmentSpec {
    std::size_t frames = 1;
    std::size_t objects = 0;
    /// Relative frequency of each size region; length H.
    std::vector<double> size_weights;
    double velocity = 0.0;
};

struct DetectorSpec {
    std::string name;
    double latency = 0.0;
    /// Probability of detecting an object of each size region; length H.
    std::vector<double> recall;
    double confidence_low = 1.0;
    double confidence_high = 1.0;
};

struct ScenarioSpec {
    double width = 640.0;
    double height = 480.0;
    double fps = 30.0;
    RegionBoundaries boundaries;
    double jitter = 0.0;
    /// width / height of every object box
    double aspect = 0.5;
    double persistence = 0.0;
    std::vector<SegmentSpec> segments;
    std::vector<DetectorSpec> detectors;

    std::size_t frame_count() const;
    VideoMeta meta() const;
    /// Throws ConfigError for out-of-range probabilities, empty segments, etc.
    void validate() const;
};

struct SyntheticScenario {
    GroundTruth ground_truth;
    std::vector<DetectionTrace> traces;
    VideoMeta meta;
};

/// Pure function of (spec, seed).
SyntheticScenario generate_synthetic_scenario(const ScenarioSpec &spec, std::uint64_t seed);

ScenarioSpec scenario_from_json(const nlohmann::json &j);
nlohmann::ordered_json scenario_to_json(const ScenarioSpec &spec);
ScenarioSpec load_scenario(const std::string &path);

} // namespace roma
