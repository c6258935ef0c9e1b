#include "roma/evaluation.hpp"

#include "roma/geometry.hpp"
#include "roma/kernels.hpp"
#include "roma/simulator.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace roma {

std::vector<bool> match_frame(std::span<const BoundingBox> detections, std::span<const BoundingBox> ground_truth,
                              double iou_threshold) {
    std::vector<std::size_t> order(detections.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detections[a].confidence > detections[b].confidence;
    });

    std::vector<bool> flags(detections.size(), false);
    std::vector<bool> taken(ground_truth.size(), false);
    for (std::size_t d : order) {
        double best = -1.0;
        std::size_t best_gt = ground_truth.size();
        for (std::size_t g = 0; g < ground_truth.size(); ++g) {
            if (taken[g])
                continue;
            const double o = iou(detections[d], ground_truth[g]);
            if (o >= iou_threshold && o > best) {
                best = o;
                best_gt = g;
            }
        }
        if (best_gt < ground_truth.size()) {
            taken[best_gt] = true;
            flags[d] = true;
        }
    }
    return flags;
}

namespace {

std::vector<ScoredDetection> ranked(std::span<const ScoredDetection> detections) {
    std::vector<ScoredDetection> sorted(detections.begin(), detections.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredDetection &a, const ScoredDetection &b) { return a.confidence > b.confidence; });
    return sorted;
}

} // namespace

std::vector<PrPoint> pr_curve(std::span<const ScoredDetection> detections, std::size_t gt_count) {
    const auto sorted = ranked(detections);
    std::vector<PrPoint> curve;
    curve.reserve(sorted.size());
    std::size_t tp = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (sorted[k].true_positive)
            ++tp;
        const double recall = gt_count ? static_cast<double>(tp) / static_cast<double>(gt_count) : 0.0;
        const double precision = static_cast<double>(tp) / static_cast<double>(k + 1);
        curve.push_back({recall, precision});
    }
    return curve;
}

ApReport ap_11point(std::span<const ScoredDetection> detections, std::size_t gt_count) {
    ApReport report;
    report.gt_count = gt_count;
    for (const auto &d : detections)
        (d.true_positive ? report.tp : report.fp) += 1;
    if (report.tp > gt_count)
        throw DataError("more true positives than ground-truth objects");
    if (gt_count == 0) {
        report.ap = detections.empty() ? 1.0 : 0.0;
        return report;
    }

    auto curve = pr_curve(detections, gt_count);
    // right-max interpolation
    for (std::size_t k = curve.size(); k-- > 1;)
        curve[k - 1].precision = std::max(curve[k - 1].precision, curve[k].precision);

    double sum = 0.0;
    std::size_t k = 0;
    for (int level = 0; level <= 10; ++level) {
        const double r = level / 10.0;
        // curve recall is non-decreasing; first point reaching r carries the max
        while (k < curve.size() && curve[k].recall < r)
            ++k;
        if (k < curve.size())
            sum += curve[k].precision;
    }
    report.ap = sum / 11.0;
    return report;
}

namespace {

ApReport score(std::span<const kernels::FrameView> views, const GroundTruth &gt, double iou_threshold,
               double confidence_threshold) {
    auto matched = kernels::match_frames_omp(views, gt.frames, iou_threshold, confidence_threshold);
    return ap_11point(matched.detections, matched.gt_count);
}

} // namespace

ApReport offline_ap(const DetectionTrace &trace, const GroundTruth &gt, double iou_threshold,
                    double confidence_threshold) {
    if (trace.frame_count() < gt.frame_count())
        throw DataError("trace '" + trace.name() + "' does not cover the ground-truth frames");
    std::vector<kernels::FrameView> views(gt.frame_count());
    for (std::size_t f = 0; f < views.size(); ++f)
        views[f] = trace.boxes(f);
    return score(views, gt, iou_threshold, confidence_threshold);
}

ApReport realtime_ap(const SimulationRun &run, const GroundTruth &gt, double iou_threshold,
                     double confidence_threshold) {
    if (run.frame_count() != gt.frame_count())
        throw DataError("run covers " + std::to_string(run.frame_count()) + " frames, ground truth " +
                        std::to_string(gt.frame_count()));
    std::vector<kernels::FrameView> views(gt.frame_count());
    for (std::size_t f = 0; f < views.size(); ++f)
        views[f] = run.boxes_for(f);
    return score(views, gt, iou_threshold, confidence_threshold);
}

void write_ap_json(std::ostream &out, const ApReport &report) {
    nlohmann::ordered_json j;
    j["ap"] = report.ap;
    j["tp"] = report.tp;
    j["fp"] = report.fp;
    j["gt_count"] = report.gt_count;
    out << j.dump(2) << '\n';
}

} // namespace roma
