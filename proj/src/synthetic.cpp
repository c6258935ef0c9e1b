#include "roma/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

namespace roma {
namespace {

std::uint64_t splitmix64(std::uint64_t &state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// mt19937_64 with a fixed bits-to-double mapping, so draws are identical
/// across standard library implementations.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed ^ (stream * 0xD1B54A32D192ED03ULL);
        engine_.seed(splitmix64(s));
    }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

double wrap(double value, double extent) { return value - extent * std::floor(value / extent); }

struct ObjectPath {
    std::size_t region = 0;
    double width = 0.0;
    double height = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

std::pair<double, double> area_range(std::size_t region, const std::vector<double> &scaled, double frame_ratio) {
    if (scaled.empty())
        return {500.0 * frame_ratio, 10000.0 * frame_ratio};
    if (region == 0)
        return {0.25 * scaled.front(), scaled.front()};
    if (region == scaled.size())
        return {scaled.back(), 2.0 * scaled.back()};
    return {scaled[region - 1], scaled[region]};
}

std::size_t pick_region(const std::vector<double> &weights, double u) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        acc += weights[k] / total;
        if (u < acc && weights[k] > 0.0)
            return k;
    }
    for (std::size_t k = weights.size(); k-- > 0;) {
        if (weights[k] > 0.0)
            return k;
    }
    return 0;
}

void require_probability(double p, const std::string &what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw ConfigError(what + " must be in [0, 1], got " + std::to_string(p));
}

} // namespace

std::size_t ScenarioSpec::frame_count() const {
    std::size_t n = 0;
    for (const auto &s : segments)
        n += s.frames;
    return n;
}

VideoMeta ScenarioSpec::meta() const { return VideoMeta{frame_count(), fps, width, height}; }

void ScenarioSpec::validate() const {
    boundaries.validate();
    const std::size_t regions = boundaries.regions();
    if (segments.empty())
        throw ConfigError("scenario needs at least one segment");
    if (detectors.empty())
        throw ConfigError("scenario needs at least one detector");
    if (!(width > 0.0) || !(height > 0.0) || !(fps > 0.0))
        throw ConfigError("scenario width, height and fps must be positive");
    if (!(jitter >= 0.0))
        throw ConfigError("jitter must be non-negative");
    if (!(aspect > 0.0))
        throw ConfigError("aspect must be positive");
    require_probability(persistence, "persistence");
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const auto &seg = segments[s];
        const auto where = "segment " + std::to_string(s);
        if (seg.frames == 0)
            throw ConfigError(where + " has no frames");
        if (seg.size_weights.size() != regions)
            throw ConfigError(where + " needs " + std::to_string(regions) + " size weights");
        double total = 0.0;
        for (double w : seg.size_weights) {
            if (!(w >= 0.0))
                throw ConfigError(where + " has a negative size weight");
            total += w;
        }
        if (seg.objects > 0 && !(total > 0.0))
            throw ConfigError(where + " size weights sum to zero");
        if (!(seg.velocity >= 0.0) || !std::isfinite(seg.velocity))
            throw ConfigError(where + " velocity must be finite and non-negative");
    }
    for (const auto &d : detectors) {
        if (d.recall.size() != regions)
            throw ConfigError("detector '" + d.name + "' needs " + std::to_string(regions) + " recall values");
        for (double r : d.recall)
            require_probability(r, "recall of detector '" + d.name + "'");
        require_probability(d.confidence_low, "confidence of detector '" + d.name + "'");
        require_probability(d.confidence_high, "confidence of detector '" + d.name + "'");
        if (d.confidence_low > d.confidence_high)
            throw ConfigError("confidence range of detector '" + d.name + "' is reversed");
        if (!(d.latency >= 0.0) || !std::isfinite(d.latency))
            throw ConfigError("latency of detector '" + d.name + "' must be finite and non-negative");
    }
}

SyntheticScenario generate_synthetic_scenario(const ScenarioSpec &spec, std::uint64_t seed) {
    spec.validate();
    const auto meta = spec.meta();
    const auto scaled = spec.boundaries.scaled_to(spec.width, spec.height);
    const double frame_ratio = (spec.width * spec.height) /
                               (spec.boundaries.reference_width * spec.boundaries.reference_height);

    Stream scene(seed, 0);
    std::vector<std::vector<ObjectPath>> paths(spec.segments.size());
    for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        const auto &seg = spec.segments[s];
        for (std::size_t o = 0; o < seg.objects; ++o) {
            ObjectPath p;
            p.region = pick_region(seg.size_weights, scene.uniform());
            const auto [lo, hi] = area_range(p.region, scaled, frame_ratio);
            // keep clear of the region edges
            const double area = scene.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo));
            p.width = std::sqrt(area * spec.aspect);
            p.height = area / p.width;
            p.x0 = scene.uniform(0.0, spec.width);
            p.y0 = scene.uniform(0.0, spec.height);
            const double angle = scene.uniform(0.0, 2.0 * std::numbers::pi);
            p.vx = seg.velocity * std::cos(angle);
            p.vy = seg.velocity * std::sin(angle);
            paths[s].push_back(p);
        }
    }

    SyntheticScenario out;
    out.meta = meta;
    out.ground_truth.frames.resize(meta.frame_count);
    {
        std::size_t frame = 0;
        for (std::size_t s = 0; s < spec.segments.size(); ++s) {
            for (std::size_t k = 0; k < spec.segments[s].frames; ++k, ++frame) {
                auto &boxes = out.ground_truth.frames[frame];
                for (const auto &p : paths[s]) {
                    const double t = static_cast<double>(k);
                    boxes.push_back({wrap(p.x0 + p.vx * t, spec.width), wrap(p.y0 + p.vy * t, spec.height), p.width,
                                     p.height, 1.0});
                }
            }
        }
    }

    for (std::size_t d = 0; d < spec.detectors.size(); ++d) {
        const auto &det = spec.detectors[d];
        Stream rng(seed, d + 1);
        std::vector<BoxList> frames(meta.frame_count);
        std::size_t frame = 0;
        for (std::size_t s = 0; s < spec.segments.size(); ++s) {
            std::vector<char> seen(paths[s].size(), 0);
            for (std::size_t k = 0; k < spec.segments[s].frames; ++k, ++frame) {
                const auto &truth = out.ground_truth.frames[frame];
                for (std::size_t o = 0; o < paths[s].size(); ++o) {
                    // fixed number of draws per object and frame
                    const double u_redraw = rng.uniform();
                    const double u_keep = rng.uniform();
                    const double u_dx = rng.uniform();
                    const double u_dy = rng.uniform();
                    const double u_conf = rng.uniform();
                    if (k == 0 || u_redraw >= spec.persistence)
                        seen[o] = u_keep < det.recall[paths[s][o].region];
                    if (!seen[o])
                        continue;
                    BoundingBox b = truth[o];
                    b.left += spec.jitter * (2.0 * u_dx - 1.0);
                    b.top += spec.jitter * (2.0 * u_dy - 1.0);
                    b.confidence = det.confidence_low + (det.confidence_high - det.confidence_low) * u_conf;
                    frames[frame].push_back(b);
                }
            }
        }
        out.traces.emplace_back(det.name, std::move(frames), LatencyProfile(det.latency));
    }
    return out;
}

ScenarioSpec scenario_from_json(const nlohmann::json &j) {
    try {
        if (j.value("format", std::string("roma-scenario")) != "roma-scenario")
            throw ConfigError("not a scenario file");
        const int version = j.value("version", 0);
        if (version != kScenarioVersion)
            throw ConfigError("unsupported scenario version " + std::to_string(version));
        ScenarioSpec s;
        s.width = j.value("width", s.width);
        s.height = j.value("height", s.height);
        s.fps = j.value("fps", s.fps);
        if (j.contains("boundaries")) {
            const auto &b = j.at("boundaries");
            s.boundaries.thresholds = b.at("thresholds").get<std::vector<double>>();
            if (b.contains("reference")) {
                auto ref = b.at("reference").get<std::vector<double>>();
                if (ref.size() != 2)
                    throw ConfigError("boundaries.reference must be [width, height]");
                s.boundaries.reference_width = ref[0];
                s.boundaries.reference_height = ref[1];
            }
        }
        s.jitter = j.value("jitter", s.jitter);
        s.aspect = j.value("aspect", s.aspect);
        s.persistence = j.value("persistence", s.persistence);
        for (const auto &seg : j.at("segments")) {
            SegmentSpec g;
            g.frames = seg.at("frames").get<std::size_t>();
            g.objects = seg.at("objects").get<std::size_t>();
            g.size_weights = seg.at("size_weights").get<std::vector<double>>();
            g.velocity = seg.value("velocity", 0.0);
            s.segments.push_back(std::move(g));
        }
        for (const auto &det : j.at("detectors")) {
            DetectorSpec d;
            d.name = det.at("name").get<std::string>();
            d.latency = det.at("latency").get<double>();
            d.recall = det.at("recall").get<std::vector<double>>();
            if (det.contains("confidence")) {
                auto c = det.at("confidence").get<std::vector<double>>();
                if (c.size() != 2)
                    throw ConfigError("detector confidence must be [low, high]");
                d.confidence_low = c[0];
                d.confidence_high = c[1];
            }
            s.detectors.push_back(std::move(d));
        }
        s.validate();
        return s;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

nlohmann::ordered_json scenario_to_json(const ScenarioSpec &spec) {
    nlohmann::ordered_json j;
    j["format"] = "roma-scenario";
    j["version"] = kScenarioVersion;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["fps"] = spec.fps;
    j["boundaries"] = {{"thresholds", spec.boundaries.thresholds},
                       {"reference", {spec.boundaries.reference_width, spec.boundaries.reference_height}}};
    j["jitter"] = spec.jitter;
    j["aspect"] = spec.aspect;
    j["persistence"] = spec.persistence;
    j["segments"] = nlohmann::ordered_json::array();
    for (const auto &g : spec.segments)
        j["segments"].push_back({{"frames", g.frames},
                                 {"objects", g.objects},
                                 {"size_weights", g.size_weights},
                                 {"velocity", g.velocity}});
    j["detectors"] = nlohmann::ordered_json::array();
    for (const auto &d : spec.detectors)
        j["detectors"].push_back({{"name", d.name},
                                  {"latency", d.latency},
                                  {"recall", d.recall},
                                  {"confidence", {d.confidence_low, d.confidence_high}}});
    return j;
}

ScenarioSpec load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open scenario '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace roma
