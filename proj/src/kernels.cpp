#include "roma/kernels.hpp"

#include "roma/geometry.hpp"

#include <omp.h>

namespace roma::kernels {
namespace {

void count_frame(const BoxList &boxes, std::span<const double> scaled, double conf, std::vector<double> &counts) {
    for (const auto &b : boxes) {
        if (b.confidence >= conf)
            counts[size_region_scaled(b.area(), scaled)] += 1.0;
    }
}

void match_one(FrameView dets, const BoxList &gt, double iou_threshold, double conf,
               std::vector<ScoredDetection> &out) {
    BoxList kept;
    kept.reserve(dets.size());
    for (const auto &d : dets) {
        if (d.confidence >= conf)
            kept.push_back(d);
    }
    const auto flags = match_frame(kept, gt, iou_threshold);
    for (std::size_t k = 0; k < kept.size(); ++k)
        out.push_back({kept[k].confidence, flags[k]});
}

void check_lengths(std::span<const FrameView> detections, std::span<const BoxList> ground_truth) {
    if (detections.size() != ground_truth.size())
        throw DataError("detections cover " + std::to_string(detections.size()) + " frames, ground truth " +
                        std::to_string(ground_truth.size()));
}

} // namespace

std::vector<double> region_counts_serial(std::span<const BoxList> frames, std::span<const double> scaled_thresholds,
                                         double confidence_threshold) {
    std::vector<double> counts(scaled_thresholds.size() + 1, 0.0);
    for (const auto &f : frames)
        count_frame(f, scaled_thresholds, confidence_threshold, counts);
    return counts;
}

std::vector<double> region_counts_omp(std::span<const BoxList> frames, std::span<const double> scaled_thresholds,
                                      double confidence_threshold) {
    const std::size_t regions = scaled_thresholds.size() + 1;
    const auto n = static_cast<std::ptrdiff_t>(frames.size());
    std::vector<std::vector<double>> partial(static_cast<std::size_t>(omp_get_max_threads()),
                                             std::vector<double>(regions, 0.0));
#pragma omp parallel
    {
        auto &local = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::ptrdiff_t f = 0; f < n; ++f)
            count_frame(frames[static_cast<std::size_t>(f)], scaled_thresholds, confidence_threshold, local);
    }
    // counts are integers held in doubles, so summation order does not matter
    std::vector<double> counts(regions, 0.0);
    for (const auto &p : partial)
        for (std::size_t k = 0; k < regions; ++k)
            counts[k] += p[k];
    return counts;
}

std::size_t count_surviving_omp(std::span<const BoundingBox> prev, std::span<const BoundingBox> curr,
                                double iou_threshold) {
    const auto n = static_cast<std::ptrdiff_t>(prev.size());
    long long surviving = 0;
#pragma omp parallel for reduction(+ : surviving) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (const auto &c : curr) {
            if (iou(prev[static_cast<std::size_t>(i)], c) >= iou_threshold) {
                ++surviving;
                break;
            }
        }
    }
    return static_cast<std::size_t>(surviving);
}

MatchedDetections match_frames_serial(std::span<const FrameView> detections, std::span<const BoxList> ground_truth,
                                      double iou_threshold, double confidence_threshold) {
    check_lengths(detections, ground_truth);
    MatchedDetections result;
    for (std::size_t f = 0; f < detections.size(); ++f) {
        match_one(detections[f], ground_truth[f], iou_threshold, confidence_threshold, result.detections);
        result.gt_count += ground_truth[f].size();
    }
    return result;
}

MatchedDetections match_frames_omp(std::span<const FrameView> detections, std::span<const BoxList> ground_truth,
                                   double iou_threshold, double confidence_threshold) {
    check_lengths(detections, ground_truth);
    const auto n = static_cast<std::ptrdiff_t>(detections.size());
    std::vector<std::vector<ScoredDetection>> per_frame(detections.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::ptrdiff_t f = 0; f < n; ++f) {
        const auto idx = static_cast<std::size_t>(f);
        match_one(detections[idx], ground_truth[idx], iou_threshold, confidence_threshold, per_frame[idx]);
    }
    MatchedDetections result;
    std::size_t total = 0;
    for (const auto &v : per_frame)
        total += v.size();
    result.detections.reserve(total);
    for (std::size_t f = 0; f < per_frame.size(); ++f) {
        result.detections.insert(result.detections.end(), per_frame[f].begin(), per_frame[f].end());
        result.gt_count += ground_truth[f].size();
    }
    return result;
}

} // namespace roma::kernels
