#pragma once

// MOTChallenge CSV reading/writing and the latency sidecar format.
//
// MOT rows are `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z` with
// 1-based frame numbers. In memory every frame index is 0-based; the reader
// subtracts one and the writer adds it back.

#include "roma/trace_model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace roma {

enum class MotKind { detections, ground_truth };

struct MotParseResult {
    FrameBoxMap frames;
    /// Rows dropped for non-positive width or height.
    std::size_t rejected_rows = 0;
};

MotParseResult parse_mot(std::istream &in, MotKind kind);
MotParseResult parse_mot_string(const std::string &text, MotKind kind);
MotParseResult read_mot_file(const std::string &path, MotKind kind);

/// Writes rows in frame order with id -1. Numbers use the shortest
/// representation that parses back to the same double.
void write_mot(std::ostream &out, const FrameBoxMap &frames);
void write_mot(std::ostream &out, const std::vector<BoxList> &dense);

/// Sidecar rows are `frame_index,latency_seconds` with 0-based frame index.
/// An optional non-numeric header line is skipped. Every frame in
/// [0, frame_count) must be present.
LatencyProfile parse_latency_sidecar(std::istream &in, std::size_t frame_count);
LatencyProfile read_latency_sidecar(const std::string &path, std::size_t frame_count);
void write_latency_sidecar(std::ostream &out, const LatencyProfile &latency, std::size_t frame_count);

/// Shortest round-trip decimal text for a double.
std::string format_double(double value);

} // namespace roma
