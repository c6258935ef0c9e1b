#include "roma/policies.hpp"

#include "roma/geometry.hpp"

#include <algorithm>

namespace roma {

StaticPolicy::StaticPolicy(std::size_t detector, std::size_t pool_size) : detector_(detector) {
    if (detector >= pool_size)
        throw ConfigError("static detector " + std::to_string(detector) + " outside a pool of " +
                          std::to_string(pool_size));
}

std::string StaticPolicy::name() const { return "static-" + std::to_string(detector_); }

PolicyDecision StaticPolicy::step(const PolicyInput &) { return {detector_, 0.0, std::nullopt}; }

double median_area(std::span<const BoundingBox> boxes) {
    std::vector<double> areas;
    areas.reserve(boxes.size());
    for (const auto &b : boxes)
        areas.push_back(b.area());
    if (areas.empty())
        return 0.0;
    std::sort(areas.begin(), areas.end());
    const std::size_t mid = areas.size() / 2;
    if (areas.size() % 2 == 1)
        return areas[mid];
    return 0.5 * (areas[mid - 1] + areas[mid]);
}

TodPolicy::TodPolicy(RegionBoundaries boundaries, std::vector<std::size_t> detector_order,
                     std::vector<std::size_t> region_to_detector)
    : boundaries_(std::move(boundaries)), order_(std::move(detector_order)),
      region_to_detector_(std::move(region_to_detector)) {
    boundaries_.validate();
    if (order_.empty())
        throw ConfigError("TOD needs at least one detector");
    const std::size_t regions = boundaries_.regions();
    const std::size_t n = order_.size();
    if (region_to_detector_.empty()) {
        for (std::size_t k = 0; k < regions; ++k) {
            std::size_t rank = 0;
            if (k + 1 < regions)
                rank = n > k ? n - 1 - k : 0;
            region_to_detector_.push_back(order_[rank]);
        }
    }
    if (region_to_detector_.size() != regions)
        throw ConfigError("TOD region map must have one entry per size region");
    for (auto d : region_to_detector_) {
        if (std::find(order_.begin(), order_.end(), d) == order_.end())
            throw ConfigError("TOD region map names unknown detector " + std::to_string(d));
    }
}

PolicyDecision TodPolicy::step(const PolicyInput &input) {
    if (input.detections_now.empty())
        return {input.current_detector, 0.0, std::nullopt};
    const double median = median_area(input.detections_now);
    const auto region = size_region(median, boundaries_, input.meta);
    return {region_to_detector_[region], 0.0, std::nullopt};
}

LadPolicy::LadPolicy(std::vector<std::size_t> detector_order, double upgrade_fraction)
    : order_(std::move(detector_order)), upgrade_fraction_(upgrade_fraction) {
    if (order_.empty())
        throw ConfigError("LAD needs at least one detector");
    if (!(upgrade_fraction_ > 0.0 && upgrade_fraction_ < 1.0))
        throw ConfigError("LAD upgrade fraction must be in (0, 1)");
}

PolicyDecision LadPolicy::step(const PolicyInput &input) {
    auto it = std::find(order_.begin(), order_.end(), input.current_detector);
    if (it == order_.end())
        throw ConfigError("LAD: current detector not in order");
    std::size_t rank = static_cast<std::size_t>(it - order_.begin());
    const double budget = 1.0 / input.meta.fps;
    if (input.measured_latency > budget) {
        if (rank > 0)
            --rank;
    } else if (input.measured_latency < upgrade_fraction_ * budget) {
        if (rank + 1 < order_.size())
            ++rank;
    }
    return {order_[rank], 0.0, std::nullopt};
}

RomaPolicy::RomaPolicy(PriorModel prior, std::vector<double> prior_latencies, VideoMeta meta,
                       RomaPolicyConfig config)
    : estimator_(std::move(prior), std::move(prior_latencies), meta, config.estimator), config_(config),
      initial_(estimator_.current()) {
    if (!(config_.overhead_kappa >= 0.0))
        throw ConfigError("overhead kappa must be non-negative");
}

PolicyDecision RomaPolicy::step(const PolicyInput &input) {
    if (input.current_detector != estimator_.current())
        throw ConfigError("ROMA: simulator ran detector " + std::to_string(input.current_detector) +
                          " but the estimator selected " + std::to_string(estimator_.current()));
    auto tel = estimator_.step(input.detections_now, std::max(input.measured_latency, kMinMeasuredLatency));
    const double k = static_cast<double>(input.detections_now.size());
    PolicyDecision d;
    d.next_detector = tel.selected;
    d.overhead = config_.overhead_kappa * k * k;
    d.telemetry = std::move(tel);
    return d;
}

} // namespace roma
