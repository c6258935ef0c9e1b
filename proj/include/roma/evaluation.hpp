#pragma once

// Detection accuracy: greedy IoU matching and 11-point interpolated AP.
// Real-time AP scores every frame of a simulated run, including frames whose
// boxes were copied forward from the last analyzed frame.

#include "roma/trace_model.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roma {

class SimulationRun;

struct ScoredDetection {
    double confidence = 0.0;
    bool true_positive = false;
};

struct MatchedDetections {
    std::vector<ScoredDetection> detections;
    std::size_t gt_count = 0;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct ApReport {
    double ap = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t gt_count = 0;
};

/// TP flags aligned with `detections`. Detections are visited by descending
/// confidence (stable for ties); each takes the unmatched ground-truth box of
/// highest IoU if that IoU >= threshold.
std::vector<bool> match_frame(std::span<const BoundingBox> detections, std::span<const BoundingBox> ground_truth,
                              double iou_threshold);

/// Precision/recall after each detection in descending-confidence order.
std::vector<PrPoint> pr_curve(std::span<const ScoredDetection> detections, std::size_t gt_count);

/// Mean of the right-max interpolated precision at recall 0, 0.1, ..., 1.
/// With no ground truth: 1 if there are no detections either, else 0.
ApReport ap_11point(std::span<const ScoredDetection> detections, std::size_t gt_count);

/// Scores one trace frame by frame against ground truth (no frame drops).
ApReport offline_ap(const DetectionTrace &trace, const GroundTruth &gt, double iou_threshold,
                    double confidence_threshold);

/// Scores every frame of a run against its own ground truth.
ApReport realtime_ap(const SimulationRun &run, const GroundTruth &gt, double iou_threshold,
                     double confidence_threshold);

void write_ap_json(std::ostream &out, const ApReport &report);

} // namespace roma
