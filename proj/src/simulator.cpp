#include "roma/simulator.hpp"

#include "roma/mot_io.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace roma {

WorkloadSchedule::WorkloadSchedule(double constant_multiplier)
    : WorkloadSchedule(std::vector<std::pair<std::size_t, double>>{{0, constant_multiplier}}) {}

WorkloadSchedule::WorkloadSchedule(std::vector<std::pair<std::size_t, double>> segments)
    : segments_(std::move(segments)) {
    if (segments_.empty() || segments_.front().first != 0)
        throw ConfigError("workload schedule must start at frame 0");
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (!(segments_[k].second > 0.0) || !std::isfinite(segments_[k].second))
            throw ConfigError("workload multipliers must be positive");
        if (k > 0 && segments_[k].first <= segments_[k - 1].first)
            throw ConfigError("workload segment starts must be strictly ascending");
    }
}

double WorkloadSchedule::multiplier_at(std::size_t frame) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), frame,
                               [](std::size_t f, const auto &seg) { return f < seg.first; });
    return std::prev(it)->second;
}

SimulationRun::SimulationRun(std::vector<AnalyzedFrame> analyzed, std::size_t frame_count)
    : analyzed_(std::move(analyzed)), frame_source_(frame_count) {
    std::size_t covered = 0;
    for (std::size_t a = 0; a < analyzed_.size(); ++a) {
        const auto &af = analyzed_[a];
        if (af.frame_index != covered)
            throw DataError("analyzed frames must tile the video");
        for (std::size_t k = 0; k < af.block_size; ++k)
            frame_source_[covered + k] = a;
        covered += af.block_size;
    }
    if (covered != frame_count)
        throw DataError("analyzed frames cover " + std::to_string(covered) + " of " + std::to_string(frame_count) +
                        " frames");
}

std::span<const BoundingBox> SimulationRun::boxes_for(std::size_t frame) const {
    return analyzed_.at(frame_source_.at(frame)).boxes;
}

std::size_t SimulationRun::source_frame(std::size_t frame) const {
    return analyzed_.at(frame_source_.at(frame)).frame_index;
}

std::size_t SimulationRun::detector_for(std::size_t frame) const {
    return analyzed_.at(frame_source_.at(frame)).detector;
}

std::vector<double> SimulationRun::selection_frequency(std::size_t pool_size) const {
    std::vector<double> freq(pool_size, 0.0);
    if (analyzed_.empty())
        return freq;
    for (const auto &a : analyzed_)
        freq.at(a.detector) += 1.0;
    for (auto &f : freq)
        f /= static_cast<double>(analyzed_.size());
    return freq;
}

SimulationRun run_simulation(std::span<const DetectionTrace> traces, const VideoMeta &meta,
                             const WorkloadSchedule &schedule, Policy &policy, const SimulationConfig &config) {
    meta.validate();
    if (traces.empty())
        throw ConfigError("simulation needs at least one detector trace");
    for (std::size_t d = 0; d < traces.size(); ++d) {
        if (traces[d].frame_count() < meta.frame_count)
            throw DataError("trace " + std::to_string(d) + " ('" + traces[d].name() + "') is missing frame " +
                            std::to_string(traces[d].frame_count()));
    }

    std::vector<AnalyzedFrame> analyzed;
    std::size_t detector = policy.initial_detector();
    std::size_t frame = 0;
    BoxList previous;
    while (frame < meta.frame_count) {
        if (detector >= traces.size())
            throw ConfigError("policy selected detector " + std::to_string(detector) + " outside the pool");
        AnalyzedFrame af;
        af.step = analyzed.size();
        af.frame_index = frame;
        af.detector = detector;
        af.detector_latency = traces[detector].latency(frame) * schedule.multiplier_at(frame);
        af.boxes = filter_by_confidence(traces[detector].boxes(frame), config.confidence_threshold);

        PolicyInput input;
        input.step = af.step;
        input.frame_index = frame;
        input.current_detector = detector;
        input.detections_now = af.boxes;
        input.detections_prev = previous;
        input.measured_latency = af.detector_latency;
        input.meta = meta;
        auto decision = policy.step(input);

        af.overhead = decision.overhead;
        af.simulated_latency = af.detector_latency + decision.overhead;
        const double consumed = std::floor(meta.fps * af.simulated_latency) + 1.0;
        const auto remaining = meta.frame_count - frame;
        af.block_size = consumed >= static_cast<double>(remaining) ? remaining : static_cast<std::size_t>(consumed);
        af.next_detector = decision.next_detector;
        af.telemetry = std::move(decision.telemetry);

        frame += af.block_size;
        detector = decision.next_detector;
        previous = af.boxes;
        analyzed.push_back(std::move(af));
    }
    return SimulationRun(std::move(analyzed), meta.frame_count);
}

void write_run_mot(std::ostream &out, const SimulationRun &run) {
    std::vector<BoxList> dense(run.frame_count());
    for (std::size_t f = 0; f < run.frame_count(); ++f) {
        auto boxes = run.boxes_for(f);
        dense[f].assign(boxes.begin(), boxes.end());
    }
    write_mot(out, dense);
}

namespace {

template <typename T>
void write_joined(std::ostream &out, const std::vector<T> &values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k)
            out << ';';
        if constexpr (std::is_floating_point_v<T>)
            out << format_double(values[k]);
        else
            out << values[k];
    }
}

} // namespace

void write_telemetry_csv(std::ostream &out, const SimulationRun &run) {
    out << "step,frame,detector,detector_latency,overhead,simulated_latency,block_size,next_detector,"
           "detected,surviving,missing_per_frame,latency_estimates,block_sizes,alpha,gamma,rap\n";
    for (const auto &a : run.analyzed()) {
        out << a.step << ',' << a.frame_index << ',' << a.detector << ',' << format_double(a.detector_latency)
            << ',' << format_double(a.overhead) << ',' << format_double(a.simulated_latency) << ',' << a.block_size
            << ',' << a.next_detector << ',' << a.boxes.size() << ',';
        if (a.telemetry) {
            const auto &t = *a.telemetry;
            out << t.surviving << ',' << format_double(t.missing_per_frame) << ',';
            write_joined(out, t.latency_estimates);
            out << ',';
            write_joined(out, t.rap.block_sizes);
            out << ',';
            write_joined(out, t.rap.alpha);
            out << ',';
            write_joined(out, t.rap.gamma);
            out << ',';
            write_joined(out, t.rap.rap);
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
}

} // namespace roma
