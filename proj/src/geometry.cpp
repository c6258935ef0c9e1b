#include "roma/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace roma {

double iou(const BoundingBox &a, const BoundingBox &b) {
    const double iw = std::min(a.right(), b.right()) - std::max(a.left, b.left);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top, b.top);
    if (iw <= 0.0 || ih <= 0.0)
        return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0)
        return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::size_t count_surviving(std::span<const BoundingBox> prev, std::span<const BoundingBox> curr,
                            double iou_threshold) {
    std::size_t surviving = 0;
    for (const auto &p : prev) {
        for (const auto &c : curr) {
            if (iou(p, c) >= iou_threshold) {
                ++surviving;
                break;
            }
        }
    }
    return surviving;
}

void RegionBoundaries::validate() const {
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(thresholds[k] > 0.0) || !std::isfinite(thresholds[k]))
            throw ConfigError("region thresholds must be positive");
        if (k > 0 && !(thresholds[k] > thresholds[k - 1]))
            throw ConfigError("region thresholds must be strictly ascending");
    }
    if (!(reference_width > 0.0) || !(reference_height > 0.0))
        throw ConfigError("reference resolution must be positive");
}

std::vector<double> RegionBoundaries::scaled_to(double width, double height) const {
    const double ratio = (width * height) / (reference_width * reference_height);
    std::vector<double> scaled(thresholds.size());
    std::transform(thresholds.begin(), thresholds.end(), scaled.begin(), [ratio](double t) { return t * ratio; });
    return scaled;
}

double SizeHistogram::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

std::size_t size_region_scaled(double area, std::span<const double> scaled_thresholds) {
    // first threshold strictly greater than area
    auto it = std::upper_bound(scaled_thresholds.begin(), scaled_thresholds.end(), area);
    return static_cast<std::size_t>(it - scaled_thresholds.begin());
}

std::size_t size_region(double area, const RegionBoundaries &boundaries, const VideoMeta &frame) {
    const auto scaled = boundaries.scaled_to(frame.width, frame.height);
    return size_region_scaled(area, scaled);
}

SizeHistogram histogram(std::span<const BoundingBox> boxes, const RegionBoundaries &boundaries,
                        const VideoMeta &frame) {
    const auto scaled = boundaries.scaled_to(frame.width, frame.height);
    SizeHistogram h{std::vector<double>(boundaries.regions(), 0.0)};
    for (const auto &b : boxes)
        h.counts[size_region_scaled(b.area(), scaled)] += 1.0;
    return h;
}

} // namespace roma
