#pragma once

// Run-time relative-accuracy estimator.
//
// After every analyzed frame the estimator sees only label-free observables:
// the current detector's boxes on this and the previous analyzed frame and
// the measured detection latency. From them it predicts, for every detector
// in the pool, the mean AP over that detector's own frame block relative to
// the current detector (the RAP), and picks the detector with the largest.
//
//   RAP_i = alpha_i * gamma_i
//   alpha_i = l_i / (l~ + 0.1)                 estimated vs measured object count
//   gamma_i = mean(beta[0..b_i)) / mean(beta[0..b_c))
//
// beta[j] is the AP retained j frames after an analyzed frame when boxes are
// copied forward; it decays with the number of objects whose boxes stop
// overlapping between consecutive analyzed frames.

#include "roma/geometry.hpp"
#include "roma/prior_model.hpp"
#include "roma/trace_model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace roma {

inline constexpr std::size_t kMaxBlockSize = 30;
inline constexpr std::size_t kMinUpdateBlock = 3;
inline constexpr double kAlphaDivisorGuard = 0.1;

struct LatencyState {
    /// Estimated latency of every detector, seconds.
    std::vector<double> estimates;
    double last_measured = 0.0;
    std::size_t current = 0;
    std::size_t previous = 0;
};

/// Proportional update when the detector was kept, direct replacement of the
/// current detector's estimate after a switch. Throws ConfigError if
/// `measured` is not positive.
LatencyState update_latency(const LatencyState &state, double measured, bool switched);

/// floor(fps * latency) + 1, clamped to [1, max_block].
std::size_t frame_block_size(double fps, double latency, std::size_t max_block = kMaxBlockSize);

/// Objects lost per copied frame: (prev_count - surviving) / current_block.
double missing_per_frame(double prev_count, double surviving, std::size_t current_block);

struct DegradationState {
    /// beta[j] for the block starting at the current analyzed frame; beta[0] = 1.
    std::vector<double> beta = std::vector<double>(kMaxBlockSize, 1.0);
    /// beta of the previous analyzed frame.
    std::vector<double> beta_prev = std::vector<double>(kMaxBlockSize, 1.0);
    std::size_t min_update_block = kMinUpdateBlock;

    static DegradationState initial(std::size_t max_block = kMaxBlockSize,
                                    std::size_t min_update_block = kMinUpdateBlock);
};

/// Advances beta by one analyzed frame.
///  - current_block < min_update_block: beta is kept as is.
///  - 1 <= j < current_block: q_j = max(q_{j-1} - u, 0), beta_j = beta_{j-1} (q_j / q_{j-1})^2
///    (0 once q reaches 0).
///  - current_block <= j < max_block: beta_j = beta_{j-1} * old_j / old_{j-1} using
///    the pre-update beta (0 when old_{j-1} is 0).
/// `block_sizes` is accepted for interface symmetry with compute_rap; the
/// carry-over branch always runs to the end of the beta array.
DegradationState update_betas(const DegradationState &state, double q0, double u, std::size_t current_block,
                              std::span<const std::size_t> block_sizes);

struct RapResult {
    std::vector<double> alpha;
    std::vector<double> gamma;
    std::vector<double> rap;
    std::vector<std::size_t> block_sizes;
};

RapResult compute_rap(std::span<const double> estimated_counts, double measured_count,
                      const DegradationState &betas, std::span<const std::size_t> block_sizes,
                      std::size_t current);

/// argmax of `rap`; ties go to the detector that comes first in `order`
/// (the lighter one).
std::size_t select_detector(std::span<const double> rap, std::span<const std::size_t> order);

struct EstimatorConfig {
    double fps = 30.0;
    double survival_iou = 0.5;
    std::size_t max_block = kMaxBlockSize;
    std::size_t min_update_block = kMinUpdateBlock;
};

/// One row of estimator telemetry per analyzed frame.
struct EstimatorTelemetry {
    std::size_t step = 0;
    std::size_t current = 0;
    std::size_t selected = 0;
    double measured_latency = 0.0;
    double measured_count = 0.0;
    std::size_t surviving = 0;
    double missing_per_frame = 0.0;
    std::vector<double> latency_estimates;
    std::vector<double> estimated_counts;
    RapResult rap;
};

/// Stateful estimator for one video stream.
class RomaEstimator {
public:
    /// `initial_latencies` are the per-detector prior latencies (seconds).
    /// The first detector is the heaviest one in the prior's order.
    RomaEstimator(PriorModel prior, std::vector<double> initial_latencies, VideoMeta frame, EstimatorConfig config);

    std::size_t current() const { return latency_.current; }
    const LatencyState &latency() const { return latency_; }
    const DegradationState &degradation() const { return degradation_; }
    const PriorModel &prior() const { return prior_; }

    /// Consumes the current detector's boxes on the analyzed frame (already
    /// confidence filtered) and its measured latency. Returns the telemetry
    /// of this step; `selected` becomes the current detector for the next
    /// analyzed frame.
    EstimatorTelemetry step(std::span<const BoundingBox> detections, double measured_latency);

private:
    PriorModel prior_;
    VideoMeta frame_;
    EstimatorConfig config_;
    LatencyState latency_;
    DegradationState degradation_;
    BoxList previous_boxes_;
    double previous_count_ = 0.0;
    std::size_t steps_ = 0;
};

} // namespace roma
