#include "roma/trace_model.hpp"

#include <cmath>
#include <numeric>

namespace roma {

void VideoMeta::validate() const {
    if (frame_count < 1)
        throw ConfigError("video must have at least one frame");
    if (!(fps > 0.0) || !std::isfinite(fps))
        throw ConfigError("fps must be positive");
    if (!(width > 0.0) || !(height > 0.0))
        throw ConfigError("frame width and height must be positive");
}

LatencyProfile::LatencyProfile(double constant) : constant_(constant) {
    if (!(constant >= 0.0) || !std::isfinite(constant))
        throw ConfigError("latency must be finite and non-negative");
}

LatencyProfile::LatencyProfile(std::vector<double> per_frame) : per_frame_(std::move(per_frame)) {
    if (per_frame_.empty())
        throw ConfigError("per-frame latency profile is empty");
    for (std::size_t i = 0; i < per_frame_.size(); ++i) {
        if (!(per_frame_[i] >= 0.0) || !std::isfinite(per_frame_[i]))
            throw ConfigError("latency at frame " + std::to_string(i) + " is not a finite non-negative value");
    }
}

double LatencyProfile::at(std::size_t frame) const {
    if (per_frame_.empty())
        return constant_;
    if (frame >= per_frame_.size())
        throw DataError("latency profile has no entry for frame " + std::to_string(frame));
    return per_frame_[frame];
}

double LatencyProfile::nominal() const {
    if (per_frame_.empty())
        return constant_;
    return std::accumulate(per_frame_.begin(), per_frame_.end(), 0.0) / static_cast<double>(per_frame_.size());
}

DetectionTrace::DetectionTrace(std::string name, std::vector<BoxList> frames, LatencyProfile latency)
    : name_(std::move(name)), frames_(std::move(frames)), latency_(std::move(latency)) {
    if (!latency_.is_constant() && latency_.per_frame().size() < frames_.size())
        throw DataError("latency profile of '" + name_ + "' covers " +
                        std::to_string(latency_.per_frame().size()) + " frames, trace has " +
                        std::to_string(frames_.size()));
}

DetectionTrace DetectionTrace::from_map(std::string name, const FrameBoxMap &sparse,
                                        std::size_t frame_count, LatencyProfile latency) {
    std::vector<BoxList> frames(frame_count);
    for (const auto &[frame, boxes] : sparse) {
        if (frame >= frame_count)
            throw DataError("trace '" + name + "' has frame " + std::to_string(frame) +
                            " beyond frame count " + std::to_string(frame_count));
        frames[frame] = boxes;
    }
    return DetectionTrace(std::move(name), std::move(frames), std::move(latency));
}

const BoxList &DetectionTrace::boxes(std::size_t frame) const {
    if (frame >= frames_.size())
        throw DataError("trace '" + name_ + "' is missing frame " + std::to_string(frame));
    return frames_[frame];
}

GroundTruth GroundTruth::from_map(const FrameBoxMap &sparse, std::size_t frame_count) {
    GroundTruth gt;
    gt.frames.resize(frame_count);
    for (const auto &[frame, boxes] : sparse) {
        if (frame >= frame_count)
            throw DataError("ground truth has frame " + std::to_string(frame) + " beyond frame count " +
                            std::to_string(frame_count));
        gt.frames[frame] = boxes;
    }
    return gt;
}

BoxList filter_by_confidence(const BoxList &boxes, double threshold) {
    BoxList kept;
    kept.reserve(boxes.size());
    for (const auto &b : boxes) {
        if (b.confidence >= threshold)
            kept.push_back(b);
    }
    return kept;
}

} // namespace roma
