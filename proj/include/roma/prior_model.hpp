#pragma once

#include "roma/geometry.hpp"
#include "roma/trace_model.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace roma {

/// Offline detected-object histogram per detector (rows) and size region
/// (columns). Row i is the total number of objects detector i found in each
/// region over an offline video set.
struct PriorModel {
    std::vector<std::vector<double>> matrix;
    RegionBoundaries boundaries;
    /// Detector indices from lightest to heaviest (ascending nominal latency).
    std::vector<std::size_t> detector_order;

    std::size_t detectors() const { return matrix.size(); }
    std::size_t regions() const { return boundaries.regions(); }
    std::size_t lightest() const { return detector_order.front(); }
    std::size_t heaviest() const { return detector_order.back(); }
    /// Position of `detector` in detector_order (0 = lightest).
    std::size_t rank_of(std::size_t detector) const;

    /// Throws ConfigError unless every row has H non-negative entries with at
    /// least one positive, and detector_order is a permutation of 0..n-1.
    /// Single-detector pools are accepted (they make selection trivial).
    void validate() const;

    friend bool operator==(const PriorModel &, const PriorModel &) = default;
};

/// Denominator used in place of a zero offline count.
inline constexpr double kRatioZeroGuard = 0.1;

/// Sums the per-frame size histograms of each trace. Boxes below
/// `confidence_threshold` are not counted. Detector order comes from each
/// trace's nominal latency (ties keep input order).
PriorModel build_prior(std::span<const DetectionTrace> traces, const RegionBoundaries &boundaries,
                       const VideoMeta &frame, double confidence_threshold);

/// Elementwise P[i][k] / P[c][k]. A zero denominator gives 1 when the
/// numerator is also zero, otherwise P[i][k] / 0.1.
std::vector<double> detection_ratio(const PriorModel &prior, std::size_t i, std::size_t c);

/// Estimated number of objects another detector would have found: r . p~.
double estimate_detected(std::span<const double> ratio, const SizeHistogram &observed);

/// Text format:
///   roma-prior 1
///   detectors <n>
///   regions <H>
///   thresholds <t1> ... <t_{H-1}>
///   reference <width> <height>
///   order <i_lightest> ... <i_heaviest>
///   row <p_1> ... <p_H>      (n lines)
void write_prior(std::ostream &out, const PriorModel &prior);
PriorModel read_prior(std::istream &in);
PriorModel load_prior(const std::string &path);
void save_prior(const std::string &path, const PriorModel &prior);

} // namespace roma
