#pragma once

#include "roma/estimator.hpp"
#include "roma/prior_model.hpp"
#include "roma/trace_model.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roma {

/// What a policy may observe after an analyzed frame. No ground truth.
struct PolicyInput {
    std::size_t step = 0;
    std::size_t frame_index = 0;
    std::size_t current_detector = 0;
    std::span<const BoundingBox> detections_now;
    std::span<const BoundingBox> detections_prev;
    /// Detection latency of the analyzed frame, seconds.
    double measured_latency = 0.0;
    VideoMeta meta;
};

struct PolicyDecision {
    std::size_t next_detector = 0;
    /// Decision cost added to the analyzed frame's processing time, seconds.
    double overhead = 0.0;
    std::optional<EstimatorTelemetry> telemetry;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual std::size_t initial_detector() const = 0;
    virtual PolicyDecision step(const PolicyInput &input) = 0;
};

/// Always runs one detector.
class StaticPolicy final : public Policy {
public:
    StaticPolicy(std::size_t detector, std::size_t pool_size);
    std::string name() const override;
    std::size_t initial_detector() const override { return detector_; }
    PolicyDecision step(const PolicyInput &input) override;

private:
    std::size_t detector_;
};

/// Picks a detector from the median detected-object size of the last frame.
class TodPolicy final : public Policy {
public:
    /// `region_to_detector[k]` is the detector for size region k. Empty means
    /// the default map: region 0 -> heaviest, region k -> k-th heaviest, last
    /// region -> lightest.
    TodPolicy(RegionBoundaries boundaries, std::vector<std::size_t> detector_order,
              std::vector<std::size_t> region_to_detector = {});
    std::string name() const override { return "TOD"; }
    std::size_t initial_detector() const override { return order_.back(); }
    PolicyDecision step(const PolicyInput &input) override;

    const std::vector<std::size_t> &region_map() const { return region_to_detector_; }

private:
    RegionBoundaries boundaries_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> region_to_detector_;
};

/// Median box area; mean of the two middle areas for an even count.
double median_area(std::span<const BoundingBox> boxes);

/// Steps one detector lighter when the latency exceeds 1/fps, one heavier
/// when it is below `upgrade_fraction`/fps.
class LadPolicy final : public Policy {
public:
    explicit LadPolicy(std::vector<std::size_t> detector_order, double upgrade_fraction = 0.3);
    std::string name() const override { return "LAD"; }
    std::size_t initial_detector() const override { return order_.back(); }
    PolicyDecision step(const PolicyInput &input) override;

private:
    std::vector<std::size_t> order_;
    double upgrade_fraction_;
};

struct RomaPolicyConfig {
    EstimatorConfig estimator;
    /// Decision overhead model: kappa * (detected objects)^2 seconds.
    double overhead_kappa = 0.0;
};

/// Label-free selection by estimated relative AP.
class RomaPolicy final : public Policy {
public:
    RomaPolicy(PriorModel prior, std::vector<double> prior_latencies, VideoMeta meta, RomaPolicyConfig config);
    std::string name() const override { return "ROMA"; }
    std::size_t initial_detector() const override { return initial_; }
    PolicyDecision step(const PolicyInput &input) override;

    const RomaEstimator &estimator() const { return estimator_; }

private:
    RomaEstimator estimator_;
    RomaPolicyConfig config_;
    std::size_t initial_;
};

/// Smallest latency the estimator accepts; zero-latency traces are raised to it.
inline constexpr double kMinMeasuredLatency = 1e-9;

} // namespace roma
