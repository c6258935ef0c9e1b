#pragma once

#include "roma/trace_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace roma {

/// Intersection over union on continuous coordinates. 0 for disjoint boxes.
double iou(const BoundingBox &a, const BoundingBox &b);

/// Number of boxes in `prev` that overlap some box in `curr` with IoU >= threshold.
/// Each previous box is counted at most once, so the result is independent of
/// the order of either list.
std::size_t count_surviving(std::span<const BoundingBox> prev, std::span<const BoundingBox> curr,
                            double iou_threshold);

/// Object-size region boundaries (areas in pixel^2) defined at a reference
/// resolution. H regions are separated by H-1 ascending thresholds.
struct RegionBoundaries {
    std::vector<double> thresholds{2500.0, 7500.0};
    double reference_width = 640.0;
    double reference_height = 480.0;

    std::size_t regions() const { return thresholds.size() + 1; }
    void validate() const;

    /// Thresholds rescaled to a frame of the given size by the ratio of frame areas.
    std::vector<double> scaled_to(double width, double height) const;

    friend bool operator==(const RegionBoundaries &, const RegionBoundaries &) = default;
};

/// Per-region object counts.
struct SizeHistogram {
    std::vector<double> counts;

    double total() const;
    friend bool operator==(const SizeHistogram &, const SizeHistogram &) = default;
};

/// 0-based region index of an area. Regions are lower-inclusive:
/// region k covers [t_{k-1}, t_k) of the scaled thresholds.
std::size_t size_region(double area, const RegionBoundaries &boundaries, const VideoMeta &frame);

/// Same as above with thresholds already scaled to the frame.
std::size_t size_region_scaled(double area, std::span<const double> scaled_thresholds);

SizeHistogram histogram(std::span<const BoundingBox> boxes, const RegionBoundaries &boundaries,
                        const VideoMeta &frame);

} // namespace roma
