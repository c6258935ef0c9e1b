#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same contract; tests hold them equal and roma_bench compares their speed.
// Results never depend on the thread count: partial results are combined in
// a fixed order.

#include "roma/evaluation.hpp"
#include "roma/trace_model.hpp"

#include <span>
#include <vector>

namespace roma::kernels {

/// Per-region counts of boxes (confidence >= threshold) summed over frames.
std::vector<double> region_counts_serial(std::span<const BoxList> frames, std::span<const double> scaled_thresholds,
                                         double confidence_threshold);
std::vector<double> region_counts_omp(std::span<const BoxList> frames, std::span<const double> scaled_thresholds,
                                      double confidence_threshold);

/// Parallel over previous-frame boxes; same result as roma::count_surviving.
std::size_t count_surviving_omp(std::span<const BoundingBox> prev, std::span<const BoundingBox> curr,
                                double iou_threshold);

using FrameView = std::span<const BoundingBox>;

/// Matches every frame's detections against its ground truth. Detections
/// below `confidence_threshold` are dropped first. Output is concatenated in
/// frame order, detections within a frame in input order.
MatchedDetections match_frames_serial(std::span<const FrameView> detections, std::span<const BoxList> ground_truth,
                                      double iou_threshold, double confidence_threshold);
MatchedDetections match_frames_omp(std::span<const FrameView> detections, std::span<const BoxList> ground_truth,
                                   double iou_threshold, double confidence_threshold);

} // namespace roma::kernels
