#pragma once

// Deterministic real-time replay of detector traces.
//
// Frames arrive at a fixed rate. Analyzing frame s with detector d takes
// latency(d, s) * workload(s) + policy overhead seconds, during which
// floor(fps * latency) further frames arrive and are dropped; they reuse the
// boxes found on s. The next analysis starts on the first frame after the
// block, with whatever detector the policy chose.

#include "roma/estimator.hpp"
#include "roma/policies.hpp"
#include "roma/trace_model.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace roma {

/// Piecewise-constant latency multiplier over frame index.
class WorkloadSchedule {
public:
    WorkloadSchedule() : WorkloadSchedule(1.0) {}
    explicit WorkloadSchedule(double constant_multiplier);
    /// Segments are (start_frame, multiplier); starts strictly ascending from 0.
    explicit WorkloadSchedule(std::vector<std::pair<std::size_t, double>> segments);

    double multiplier_at(std::size_t frame) const;
    const std::vector<std::pair<std::size_t, double>> &segments() const { return segments_; }

private:
    std::vector<std::pair<std::size_t, double>> segments_;
};

struct AnalyzedFrame {
    std::size_t step = 0;
    std::size_t frame_index = 0;
    std::size_t detector = 0;
    double detector_latency = 0.0;
    double overhead = 0.0;
    /// detector_latency + overhead
    double simulated_latency = 0.0;
    /// Frames covered by this analysis, truncated at the end of the video.
    std::size_t block_size = 1;
    std::size_t next_detector = 0;
    BoxList boxes;
    std::optional<EstimatorTelemetry> telemetry;
};

class SimulationRun {
public:
    SimulationRun() = default;
    SimulationRun(std::vector<AnalyzedFrame> analyzed, std::size_t frame_count);

    std::size_t frame_count() const { return frame_source_.size(); }
    const std::vector<AnalyzedFrame> &analyzed() const { return analyzed_; }

    /// Boxes reported for `frame` (copied from its analyzed frame when dropped).
    std::span<const BoundingBox> boxes_for(std::size_t frame) const;
    std::size_t source_frame(std::size_t frame) const;
    std::size_t detector_for(std::size_t frame) const;

    /// Fraction of analyzed frames run by each detector.
    std::vector<double> selection_frequency(std::size_t pool_size) const;

private:
    std::vector<AnalyzedFrame> analyzed_;
    /// index into analyzed_ for every video frame
    std::vector<std::size_t> frame_source_;
};

struct SimulationConfig {
    double confidence_threshold = 0.3;
};

/// Throws DataError if a trace does not cover every frame of `meta`.
SimulationRun run_simulation(std::span<const DetectionTrace> traces, const VideoMeta &meta,
                             const WorkloadSchedule &schedule, Policy &policy, const SimulationConfig &config);

/// Per-frame output boxes as a MOT detection file (1-based frames).
void write_run_mot(std::ostream &out, const SimulationRun &run);

/// One row per analyzed frame. Estimator columns are empty for policies
/// without telemetry; vector columns are ';'-joined.
void write_telemetry_csv(std::ostream &out, const SimulationRun &run);

} // namespace roma
