#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace roma {

/// Raised when an input file cannot be parsed. Carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line), detail_(what) {}
    std::size_t line() const { return line_; }
    const std::string &detail() const { return detail_; }

private:
    std::size_t line_;
    std::string detail_;
};

/// Invalid configuration values (probabilities out of range, empty pools, ...).
class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Data that violates a structural precondition (missing frames, empty traces).
class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Axis-aligned box in pixel coordinates. Coordinates may be fractional.
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;
    double confidence = 1.0;

    double area() const { return width * height; }
    double right() const { return left + width; }
    double bottom() const { return top + height; }
    bool valid() const { return width > 0.0 && height > 0.0; }

    friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

using BoxList = std::vector<BoundingBox>;

/// Boxes of one frame. `frame_index` is 0-based.
struct FrameDetections {
    std::size_t frame_index = 0;
    BoxList boxes;
};

/// Sparse per-frame box map as read from disk; frames without rows are absent.
using FrameBoxMap = std::map<std::size_t, BoxList>;

struct VideoMeta {
    std::size_t frame_count = 1;
    double fps = 30.0;
    double width = 640.0;
    double height = 480.0;

    void validate() const;
};

/// Detection latency of one detector, either constant or per frame (seconds).
class LatencyProfile {
public:
    LatencyProfile() = default;
    explicit LatencyProfile(double constant);
    explicit LatencyProfile(std::vector<double> per_frame);

    double at(std::size_t frame) const;
    /// Mean latency; used to order detectors from lightest to heaviest.
    double nominal() const;
    bool is_constant() const { return per_frame_.empty(); }
    const std::vector<double> &per_frame() const { return per_frame_; }

private:
    double constant_ = 0.0;
    std::vector<double> per_frame_;
};

/// Pre-computed output of one detector over a whole video. Stands in for
/// running the network: the simulator looks boxes and latency up by frame.
class DetectionTrace {
public:
    DetectionTrace() = default;
    DetectionTrace(std::string name, std::vector<BoxList> frames, LatencyProfile latency);
    /// Densifies a sparse map; frames absent from `sparse` get no boxes.
    static DetectionTrace from_map(std::string name, const FrameBoxMap &sparse,
                                   std::size_t frame_count, LatencyProfile latency);

    const std::string &name() const { return name_; }
    std::size_t frame_count() const { return frames_.size(); }
    const BoxList &boxes(std::size_t frame) const;
    double latency(std::size_t frame) const { return latency_.at(frame); }
    const LatencyProfile &latency_profile() const { return latency_; }
    const std::vector<BoxList> &frames() const { return frames_; }

private:
    std::string name_;
    std::vector<BoxList> frames_;
    LatencyProfile latency_;
};

/// Ground-truth boxes per frame. Confidence is ignored.
struct GroundTruth {
    std::vector<BoxList> frames;

    std::size_t frame_count() const { return frames.size(); }
    static GroundTruth from_map(const FrameBoxMap &sparse, std::size_t frame_count);
};

/// Keeps boxes with confidence >= threshold.
BoxList filter_by_confidence(const BoxList &boxes, double threshold);

} // namespace roma
