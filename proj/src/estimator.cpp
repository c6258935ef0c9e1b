#include "roma/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace roma {

LatencyState update_latency(const LatencyState &state, double measured, bool switched) {
    if (!(measured > 0.0) || !std::isfinite(measured))
        throw ConfigError("measured latency must be positive and finite");
    if (state.current >= state.estimates.size())
        throw ConfigError("current detector out of range");
    LatencyState next = state;
    next.last_measured = measured;
    if (switched) {
        next.estimates[state.current] = measured;
        return next;
    }
    const double ratio = measured / state.estimates[state.current];
    for (auto &l : next.estimates)
        l *= ratio;
    // exact, not ratio * old
    next.estimates[state.current] = measured;
    return next;
}

std::size_t frame_block_size(double fps, double latency, std::size_t max_block) {
    const double frames = std::floor(fps * std::max(latency, 0.0)) + 1.0;
    if (!(frames < static_cast<double>(max_block)))
        return max_block;
    return std::max<std::size_t>(1, static_cast<std::size_t>(frames));
}

double missing_per_frame(double prev_count, double surviving, std::size_t current_block) {
    const double lost = std::max(prev_count - surviving, 0.0);
    return lost / static_cast<double>(std::max<std::size_t>(current_block, 1));
}

DegradationState DegradationState::initial(std::size_t max_block, std::size_t min_update_block) {
    DegradationState s;
    s.beta.assign(max_block, 1.0);
    s.beta_prev.assign(max_block, 1.0);
    s.min_update_block = min_update_block;
    return s;
}

DegradationState update_betas(const DegradationState &state, double q0, double u, std::size_t current_block,
                              std::span<const std::size_t> /*block_sizes*/) {
    DegradationState next = state;
    next.beta_prev = state.beta;
    if (current_block < state.min_update_block)
        return next;

    const auto &old = state.beta;
    const std::size_t len = old.size();
    std::vector<double> beta(len, 0.0);
    if (len == 0)
        return next;
    beta[0] = 1.0;

    const std::size_t measured_end = std::min(current_block, len);
    double q_prev = std::max(q0, 0.0);
    for (std::size_t j = 1; j < measured_end; ++j) {
        const double q = std::max(q_prev - u, 0.0);
        if (q_prev > 0.0) {
            const double ratio = q / q_prev;
            beta[j] = beta[j - 1] * ratio * ratio;
        } else {
            beta[j] = 0.0;
        }
        q_prev = q;
    }
    // beyond the measured block, reuse the previous step's per-frame decay
    for (std::size_t j = measured_end; j < len; ++j)
        beta[j] = old[j - 1] > 0.0 ? beta[j - 1] * (old[j] / old[j - 1]) : 0.0;

    for (std::size_t j = 1; j < len; ++j)
        beta[j] = std::clamp(beta[j], 0.0, beta[j - 1]);
    next.beta = std::move(beta);
    return next;
}

RapResult compute_rap(std::span<const double> estimated_counts, double measured_count,
                      const DegradationState &betas, std::span<const std::size_t> block_sizes,
                      std::size_t current) {
    const std::size_t n = estimated_counts.size();
    if (block_sizes.size() != n)
        throw ConfigError("block sizes and estimates differ in length");
    if (current >= n)
        throw ConfigError("current detector out of range");
    const auto &beta = betas.beta;
    std::vector<double> prefix(beta.size() + 1, 0.0);
    for (std::size_t j = 0; j < beta.size(); ++j)
        prefix[j + 1] = prefix[j] + beta[j];
    auto mean_beta = [&](std::size_t b) {
        b = std::clamp<std::size_t>(b, 1, beta.size());
        return prefix[b] / static_cast<double>(b);
    };

    RapResult r;
    r.alpha.resize(n);
    r.gamma.resize(n);
    r.rap.resize(n);
    r.block_sizes.assign(block_sizes.begin(), block_sizes.end());
    const double divisor = measured_count + kAlphaDivisorGuard;
    const double current_mean = mean_beta(block_sizes[current]);
    for (std::size_t i = 0; i < n; ++i) {
        r.alpha[i] = estimated_counts[i] / divisor;
        r.gamma[i] = mean_beta(block_sizes[i]) / current_mean;
        r.rap[i] = r.alpha[i] * r.gamma[i];
    }
    return r;
}

std::size_t select_detector(std::span<const double> rap, std::span<const std::size_t> order) {
    if (rap.empty())
        throw ConfigError("cannot select from an empty pool");
    if (order.empty())
        throw ConfigError("detector order is empty");
    std::size_t best = order.front();
    for (std::size_t i : order) {
        if (rap[i] > rap[best])
            best = i;
    }
    return best;
}

RomaEstimator::RomaEstimator(PriorModel prior, std::vector<double> initial_latencies, VideoMeta frame,
                             EstimatorConfig config)
    : prior_(std::move(prior)), frame_(frame), config_(config),
      degradation_(DegradationState::initial(config.max_block, config.min_update_block)) {
    prior_.validate();
    if (initial_latencies.size() != prior_.detectors())
        throw ConfigError("need one initial latency per detector");
    for (double l : initial_latencies) {
        if (!(l > 0.0) || !std::isfinite(l))
            throw ConfigError("initial latencies must be positive");
    }
    if (config_.max_block < 1)
        throw ConfigError("maximum block size must be at least 1");
    latency_.estimates = std::move(initial_latencies);
    latency_.current = prior_.heaviest();
    latency_.previous = latency_.current;
    latency_.last_measured = latency_.estimates[latency_.current];
}

EstimatorTelemetry RomaEstimator::step(std::span<const BoundingBox> detections, double measured_latency) {
    const std::size_t n = prior_.detectors();
    const std::size_t c = latency_.current;

    EstimatorTelemetry tel;
    tel.step = steps_;
    tel.current = c;
    tel.measured_latency = measured_latency;

    const auto observed = histogram(detections, prior_.boundaries, frame_);
    const double measured_count = static_cast<double>(detections.size());
    tel.measured_count = measured_count;
    tel.estimated_counts.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        tel.estimated_counts[i] = estimate_detected(detection_ratio(prior_, i, c), observed);

    latency_ = update_latency(latency_, measured_latency, latency_.current != latency_.previous);
    tel.latency_estimates = latency_.estimates;

    std::vector<std::size_t> blocks(n);
    for (std::size_t i = 0; i < n; ++i)
        blocks[i] = frame_block_size(config_.fps, latency_.estimates[i], config_.max_block);

    if (steps_ > 0) {
        tel.surviving = count_surviving(previous_boxes_, detections, config_.survival_iou);
        tel.missing_per_frame =
            missing_per_frame(previous_count_, static_cast<double>(tel.surviving), blocks[c]);
        degradation_ = update_betas(degradation_, measured_count, tel.missing_per_frame, blocks[c], blocks);
    }

    tel.rap = compute_rap(tel.estimated_counts, measured_count, degradation_, blocks, c);
    tel.selected = select_detector(tel.rap.rap, prior_.detector_order);

    previous_boxes_.assign(detections.begin(), detections.end());
    previous_count_ = measured_count;
    latency_.previous = c;
    latency_.current = tel.selected;
    ++steps_;
    return tel;
}

} // namespace roma
