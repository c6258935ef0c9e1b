#include "roma/experiment.hpp"

#include "roma/mot_io.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>

namespace roma {
namespace fs = std::filesystem;
using nlohmann::json;

std::vector<CaseSpec> default_cases() {
    return {{"a", WorkloadSchedule(1.0)},
            {"b", WorkloadSchedule(1.4)},
            {"c", WorkloadSchedule(1.8)},
            {"d", WorkloadSchedule(2.6)}};
}

namespace {

PolicyKind parse_kind(const std::string &type) {
    if (type == "roma")
        return PolicyKind::roma;
    if (type == "static")
        return PolicyKind::static_detector;
    if (type == "tod")
        return PolicyKind::tod;
    if (type == "lad")
        return PolicyKind::lad;
    throw ConfigError("unknown policy type '" + type + "'");
}

CaseSpec parse_case(const json &j) {
    CaseSpec c;
    c.name = j.at("name").get<std::string>();
    if (j.contains("schedule")) {
        std::vector<std::pair<std::size_t, double>> segs;
        for (const auto &seg : j.at("schedule")) {
            if (!seg.is_array() || seg.size() != 2)
                throw ConfigError("case '" + c.name + "': schedule entries are [start_frame, multiplier]");
            segs.emplace_back(seg[0].get<std::size_t>(), seg[1].get<double>());
        }
        c.schedule = WorkloadSchedule(std::move(segs));
    } else {
        c.schedule = WorkloadSchedule(j.value("multiplier", 1.0));
    }
    return c;
}

RegionBoundaries parse_boundaries(const json &b) {
    RegionBoundaries r;
    r.thresholds = b.at("thresholds").get<std::vector<double>>();
    if (b.contains("reference")) {
        auto ref = b.at("reference").get<std::vector<double>>();
        if (ref.size() != 2)
            throw ConfigError("boundaries.reference must be [width, height]");
        r.reference_width = ref[0];
        r.reference_height = ref[1];
    }
    r.validate();
    return r;
}

std::string dir_name(const std::string &label) {
    std::string s = label;
    for (auto &ch : s) {
        if (ch == '/' || ch == '\\' || ch == ' ')
            ch = '_';
    }
    return s;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json(const json &j, const fs::path &base_dir) {
    try {
        if (j.value("format", std::string("roma-experiment")) != "roma-experiment")
            throw ConfigError("not an experiment config");
        const int version = j.value("version", 0);
        if (version != kExperimentVersion)
            throw ConfigError("unsupported experiment config version " + std::to_string(version));

        ExperimentConfig c;
        c.raw = j;
        c.base_dir = base_dir;
        c.name = j.value("name", c.name);
        c.seed = j.value("seed", c.seed);
        if (j.contains("fps"))
            c.fps = j.at("fps").get<double>();
        if (j.contains("thresholds")) {
            const auto &t = j.at("thresholds");
            c.thresholds.confidence = t.value("confidence", c.thresholds.confidence);
            c.thresholds.survival_iou = t.value("survival_iou", c.thresholds.survival_iou);
            c.thresholds.eval_iou = t.value("eval_iou", c.thresholds.eval_iou);
        }
        c.min_update_block = j.value("b_th", c.min_update_block);
        c.max_block = j.value("b_max", c.max_block);
        c.video = j.at("video");
        c.detectors = j.value("detectors", json::array());
        c.prior = j.value("prior", json::object());
        if (j.contains("boundaries"))
            c.boundaries = parse_boundaries(j.at("boundaries"));
        if (j.contains("cases")) {
            for (const auto &cs : j.at("cases"))
                c.cases.push_back(parse_case(cs));
        } else {
            c.cases = default_cases();
        }
        const json policies = j.value("policies", json::array({{{"type", "static_all"}},
                                                              {{"type", "tod"}},
                                                              {{"type", "lad"}},
                                                              {{"type", "roma"}}}));
        for (const auto &p : policies) {
            const auto type = p.at("type").get<std::string>();
            if (type == "static_all") {
                PolicySpec s;
                s.kind = PolicyKind::static_detector;
                s.detector = "*";
                c.policies.push_back(s);
                continue;
            }
            PolicySpec s;
            s.kind = parse_kind(type);
            s.detector = p.value("detector", std::string());
            s.overhead_kappa = p.value("kappa", 0.0);
            s.region_map = p.value("region_map", std::vector<std::string>{});
            s.upgrade_fraction = p.value("upgrade_fraction", 0.3);
            switch (s.kind) {
            case PolicyKind::roma: s.label = "ROMA"; break;
            case PolicyKind::tod: s.label = "TOD"; break;
            case PolicyKind::lad: s.label = "LAD"; break;
            case PolicyKind::static_detector: s.label = s.detector; break;
            }
            s.label = p.value("label", s.label);
            c.policies.push_back(s);
        }
        c.output_dir = j.value("output_dir", std::string("out"));
        c.validate();
        return c;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("experiment config: ") + e.what());
    }
}

ExperimentConfig ExperimentConfig::load(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open config '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

void ExperimentConfig::validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_unit(thresholds.confidence) || !in_unit(thresholds.survival_iou) || !in_unit(thresholds.eval_iou))
        throw ConfigError("thresholds must be in (0, 1]");
    if (policies.empty())
        throw ConfigError("at least one policy is required");
    if (cases.empty())
        throw ConfigError("at least one workload case is required");
    if (fps && !(*fps > 0.0))
        throw ConfigError("fps must be positive");
    if (max_block < 1)
        throw ConfigError("b_max must be at least 1");
    for (const auto &p : policies) {
        if (p.kind == PolicyKind::static_detector && p.detector.empty())
            throw ConfigError("static policy needs a detector name");
    }
}

fs::path ExperimentConfig::resolve(const std::string &p) const {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

std::vector<std::string> ExperimentData::detector_names() const {
    std::vector<std::string> names;
    for (const auto &t : traces)
        names.push_back(t.name());
    return names;
}

std::size_t ExperimentData::detector_index(const std::string &name) const {
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (traces[i].name() == name)
            return i;
    }
    throw ConfigError("unknown detector '" + name + "'");
}

namespace {

ScenarioSpec scenario_from(const ExperimentConfig &config, const json &ref) {
    if (ref.is_string())
        return load_scenario(config.resolve(ref.get<std::string>()).string());
    return scenario_from_json(ref);
}

std::size_t max_frame(const FrameBoxMap &m) { return m.empty() ? 0 : m.rbegin()->first + 1; }

} // namespace

PriorModel load_or_build_prior(const ExperimentConfig &config, const VideoMeta &eval_meta,
                               const std::vector<DetectionTrace> &pool) {
    const auto &p = config.prior;
    PriorModel prior;
    if (p.contains("file")) {
        prior = load_prior(config.resolve(p.at("file").get<std::string>()).string());
    } else if (p.contains("matrix")) {
        prior.matrix = p.at("matrix").get<std::vector<std::vector<double>>>();
        prior.boundaries = config.boundaries;
        if (p.contains("order")) {
            prior.detector_order = p.at("order").get<std::vector<std::size_t>>();
        } else {
            prior.detector_order.resize(pool.size());
            for (std::size_t i = 0; i < pool.size(); ++i)
                prior.detector_order[i] = i;
            std::stable_sort(prior.detector_order.begin(), prior.detector_order.end(), [&](auto a, auto b) {
                return pool[a].latency_profile().nominal() < pool[b].latency_profile().nominal();
            });
        }
        prior.validate();
    } else if (p.contains("traces")) {
        const auto paths = p.at("traces").get<std::vector<std::string>>();
        if (paths.size() != pool.size())
            throw ConfigError("prior needs one offline trace per detector");
        std::vector<FrameBoxMap> maps;
        std::size_t frames = p.value("frame_count", std::size_t{0});
        for (const auto &path : paths) {
            maps.push_back(read_mot_file(config.resolve(path).string(), MotKind::detections).frames);
            frames = std::max(frames, max_frame(maps.back()));
        }
        if (frames == 0)
            throw DataError("offline traces are empty");
        VideoMeta offline{frames, eval_meta.fps, p.value("width", 640.0), p.value("height", 480.0)};
        std::vector<DetectionTrace> traces;
        for (std::size_t i = 0; i < maps.size(); ++i)
            traces.push_back(DetectionTrace::from_map(pool[i].name(), maps[i], frames, pool[i].latency_profile()));
        prior = build_prior(traces, config.boundaries, offline, config.thresholds.confidence);
    } else {
        // offline synthetic video: explicit scenario, or the evaluation scenario with another seed
        json ref;
        if (p.contains("scenario"))
            ref = p.at("scenario");
        else if (config.video.contains("scenario"))
            ref = config.video.at("scenario");
        else
            throw ConfigError("no prior source configured");
        auto spec = scenario_from(config, ref);
        const auto seed = p.value("seed", config.seed + 1);
        auto offline = generate_synthetic_scenario(spec, seed);
        if (offline.traces.size() != pool.size())
            throw ConfigError("offline scenario must have one detector per pool detector");
        prior = build_prior(offline.traces, spec.boundaries, offline.meta, config.thresholds.confidence);
        // ordering follows the evaluation pool's latencies
        for (std::size_t i = 0; i < pool.size(); ++i)
            prior.detector_order[i] = i;
        std::stable_sort(prior.detector_order.begin(), prior.detector_order.end(), [&](auto a, auto b) {
            return pool[a].latency_profile().nominal() < pool[b].latency_profile().nominal();
        });
    }
    if (prior.detectors() != pool.size())
        throw ConfigError("prior has " + std::to_string(prior.detectors()) + " rows for a pool of " +
                          std::to_string(pool.size()) + " detectors");
    return prior;
}

ExperimentData load_experiment_data(const ExperimentConfig &config) {
    ExperimentData data;
    ExperimentConfig effective = config;
    if (config.video.contains("scenario")) {
        auto spec = scenario_from(config, config.video.at("scenario"));
        if (!config.raw.contains("boundaries"))
            effective.boundaries = spec.boundaries;
        auto scenario = generate_synthetic_scenario(spec, config.video.value("seed", config.seed));
        data.meta = scenario.meta;
        data.ground_truth = std::move(scenario.ground_truth);
        data.traces = std::move(scenario.traces);
    } else {
        const auto &v = config.video;
        auto gt_map = read_mot_file(config.resolve(v.at("ground_truth").get<std::string>()).string(),
                                    MotKind::ground_truth)
                          .frames;
        std::vector<std::pair<std::string, FrameBoxMap>> det_maps;
        std::size_t frames = v.value("frame_count", std::size_t{0});
        frames = std::max(frames, max_frame(gt_map));
        if (config.detectors.empty())
            throw ConfigError("file-based experiments need a detector list");
        for (const auto &d : config.detectors) {
            auto m = read_mot_file(config.resolve(d.at("trace").get<std::string>()).string(), MotKind::detections)
                         .frames;
            frames = std::max(frames, max_frame(m));
            det_maps.emplace_back(d.at("name").get<std::string>(), std::move(m));
        }
        data.meta = VideoMeta{frames, v.value("fps", 30.0), v.value("width", 640.0), v.value("height", 480.0)};
        data.meta.validate();
        data.ground_truth = GroundTruth::from_map(gt_map, frames);
        for (std::size_t i = 0; i < det_maps.size(); ++i) {
            const auto &d = config.detectors[i];
            LatencyProfile latency = d.contains("latency_file")
                                         ? read_latency_sidecar(config.resolve(d.at("latency_file").get<std::string>()).string(), frames)
                                         : LatencyProfile(d.at("latency").get<double>());
            data.traces.push_back(DetectionTrace::from_map(det_maps[i].first, det_maps[i].second, frames, latency));
        }
    }
    if (config.fps)
        data.meta.fps = *config.fps;
    data.meta.validate();
    data.prior = load_or_build_prior(effective, data.meta, data.traces);
    return data;
}

std::unique_ptr<Policy> make_policy(const PolicySpec &spec, const ExperimentConfig &config,
                                    const ExperimentData &data) {
    const auto &order = data.prior.detector_order;
    switch (spec.kind) {
    case PolicyKind::static_detector:
        return std::make_unique<StaticPolicy>(data.detector_index(spec.detector), data.traces.size());
    case PolicyKind::tod: {
        std::vector<std::size_t> map;
        for (const auto &name : spec.region_map)
            map.push_back(data.detector_index(name));
        return std::make_unique<TodPolicy>(data.prior.boundaries, order, map);
    }
    case PolicyKind::lad:
        return std::make_unique<LadPolicy>(order, spec.upgrade_fraction);
    case PolicyKind::roma: {
        std::vector<double> latencies;
        for (const auto &t : data.traces)
            latencies.push_back(std::max(t.latency_profile().nominal(), kMinMeasuredLatency));
        RomaPolicyConfig rc;
        rc.estimator.fps = data.meta.fps;
        rc.estimator.survival_iou = config.thresholds.survival_iou;
        rc.estimator.max_block = config.max_block;
        rc.estimator.min_update_block = config.min_update_block;
        rc.overhead_kappa = spec.overhead_kappa;
        return std::make_unique<RomaPolicy>(data.prior, latencies, data.meta, rc);
    }
    }
    throw ConfigError("unhandled policy kind");
}

const RunResult &ExperimentResult::at(std::size_t policy, std::size_t case_index) const {
    return runs.at(policy * cases.size() + case_index);
}

double ExperimentResult::policy_mean(std::size_t policy) const {
    double sum = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c)
        sum += at(policy, c).report.ap;
    return sum / static_cast<double>(cases.size());
}

namespace {

std::vector<PolicySpec> expand_policies(const ExperimentConfig &config, const ExperimentData &data) {
    std::vector<PolicySpec> out;
    for (const auto &p : config.policies) {
        if (p.kind == PolicyKind::static_detector && p.detector == "*") {
            for (const auto &name : data.detector_names()) {
                PolicySpec s = p;
                s.detector = name;
                s.label = name;
                out.push_back(s);
            }
        } else {
            out.push_back(p);
        }
    }
    return out;
}

RunResult run_one(const PolicySpec &spec, const CaseSpec &cs, const ExperimentConfig &config,
                  const ExperimentData &data) {
    auto policy = make_policy(spec, config, data);
    SimulationConfig sim;
    sim.confidence_threshold = config.thresholds.confidence;
    RunResult r;
    r.policy = spec.label;
    r.case_name = cs.name;
    r.run = run_simulation(data.traces, data.meta, cs.schedule, *policy, sim);
    r.report = realtime_ap(r.run, data.ground_truth, config.thresholds.eval_iou, config.thresholds.confidence);
    r.selection_frequency = r.run.selection_frequency(data.traces.size());
    return r;
}

ExperimentResult sweep(const ExperimentConfig &config, const ExperimentData &data, bool parallel) {
    ExperimentResult result;
    const auto policies = expand_policies(config, data);
    for (const auto &p : policies)
        result.policies.push_back(p.label);
    for (const auto &c : config.cases)
        result.cases.push_back(c.name);
    result.detectors = data.detector_names();

    const std::size_t jobs = policies.size() * config.cases.size();
    result.runs.resize(jobs);
    std::vector<std::exception_ptr> errors(jobs);
    const auto njobs = static_cast<std::ptrdiff_t>(jobs);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t k = 0; k < njobs; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            result.runs[idx] = run_one(policies[idx / config.cases.size()], config.cases[idx % config.cases.size()],
                                       config, data);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }
    for (auto &e : errors) {
        if (e)
            std::rethrow_exception(e);
    }
    return result;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig &config, const ExperimentData &data) {
    return sweep(config, data, true);
}

ExperimentResult run_experiment_serial(const ExperimentConfig &config, const ExperimentData &data) {
    return sweep(config, data, false);
}

void write_summary_csv(std::ostream &out, const std::vector<std::string> &policies,
                       const std::vector<std::string> &cases, const std::vector<std::vector<double>> &ap) {
    out << "policy";
    for (const auto &c : cases)
        out << ',' << c;
    out << ",average\n";
    std::vector<double> column(cases.size(), 0.0);
    for (std::size_t p = 0; p < policies.size(); ++p) {
        out << policies[p];
        double sum = 0.0;
        for (std::size_t c = 0; c < cases.size(); ++c) {
            out << ',' << format_double(ap[p][c]);
            sum += ap[p][c];
            column[c] += ap[p][c];
        }
        out << ',' << format_double(sum / static_cast<double>(cases.size())) << '\n';
    }
    out << "average";
    double total = 0.0;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const double mean = column[c] / static_cast<double>(policies.size());
        out << ',' << format_double(mean);
        total += mean;
    }
    out << ',' << format_double(total / static_cast<double>(cases.size())) << '\n';
}

void write_summary_csv(std::ostream &out, const ExperimentResult &result) {
    std::vector<std::vector<double>> ap(result.policies.size(), std::vector<double>(result.cases.size()));
    for (std::size_t p = 0; p < result.policies.size(); ++p)
        for (std::size_t c = 0; c < result.cases.size(); ++c)
            ap[p][c] = result.at(p, c).report.ap;
    write_summary_csv(out, result.policies, result.cases, ap);
}

void write_deployment_csv(std::ostream &out, const ExperimentResult &result) {
    out << "policy,case";
    for (const auto &d : result.detectors)
        out << ',' << d;
    out << '\n';
    for (std::size_t p = 0; p < result.policies.size(); ++p) {
        for (std::size_t c = 0; c < result.cases.size(); ++c) {
            out << result.policies[p] << ',' << result.cases[c];
            for (double f : result.at(p, c).selection_frequency)
                out << ',' << format_double(f);
            out << '\n';
        }
    }
}

fs::path write_experiment_outputs(const ExperimentConfig &config, const ExperimentResult &result) {
    const fs::path dir = config.output_dir / config.name;
    fs::create_directories(dir);
    write_text(dir / "config.json", config.raw.dump(2) + "\n");
    {
        json manifest = {{"policies", result.policies}, {"cases", result.cases}, {"detectors", result.detectors}};
        write_text(dir / "runs.json", manifest.dump(2) + "\n");
    }
    for (const auto &r : result.runs) {
        const fs::path run_dir = dir / dir_name(r.policy) / dir_name(r.case_name);
        fs::create_directories(run_dir);
        std::ostringstream mot, tel, ap;
        write_run_mot(mot, r.run);
        write_telemetry_csv(tel, r.run);
        write_ap_json(ap, r.report);
        write_text(run_dir / "detections.txt", mot.str());
        write_text(run_dir / "telemetry.csv", tel.str());
        write_text(run_dir / "ap.json", ap.str());
    }
    std::ostringstream summary, deployment;
    write_summary_csv(summary, result);
    write_deployment_csv(deployment, result);
    write_text(dir / "summary.csv", summary.str());
    write_text(dir / "deployment.csv", deployment.str());
    return dir;
}

void compare_experiment_dir(const fs::path &dir, std::ostream &out) {
    std::vector<std::string> policies, cases;
    const auto manifest_path = dir / "runs.json";
    if (fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        json m;
        in >> m;
        policies = m.at("policies").get<std::vector<std::string>>();
        cases = m.at("cases").get<std::vector<std::string>>();
    } else {
        std::vector<std::string> case_set;
        for (const auto &p : fs::directory_iterator(dir)) {
            if (!p.is_directory())
                continue;
            policies.push_back(p.path().filename().string());
            for (const auto &c : fs::directory_iterator(p.path())) {
                if (c.is_directory() && fs::exists(c.path() / "ap.json"))
                    case_set.push_back(c.path().filename().string());
            }
        }
        std::sort(policies.begin(), policies.end());
        std::sort(case_set.begin(), case_set.end());
        case_set.erase(std::unique(case_set.begin(), case_set.end()), case_set.end());
        cases = case_set;
    }
    if (policies.empty() || cases.empty())
        throw DataError("no runs found under '" + dir.string() + "'");
    std::vector<std::vector<double>> ap(policies.size(), std::vector<double>(cases.size()));
    for (std::size_t p = 0; p < policies.size(); ++p) {
        for (std::size_t c = 0; c < cases.size(); ++c) {
            const auto path = dir / dir_name(policies[p]) / dir_name(cases[c]) / "ap.json";
            std::ifstream in(path);
            if (!in)
                throw DataError("missing '" + path.string() + "'");
            json j;
            in >> j;
            ap[p][c] = j.at("ap").get<double>();
        }
    }
    write_summary_csv(out, policies, cases, ap);
}

void write_synthetic_files(const SyntheticScenario &scenario, const fs::path &dir) {
    fs::create_directories(dir);
    {
        std::ostringstream gt;
        write_mot(gt, scenario.ground_truth.frames);
        write_text(dir / "gt.txt", gt.str());
    }
    json meta = {{"frame_count", scenario.meta.frame_count},
                 {"fps", scenario.meta.fps},
                 {"width", scenario.meta.width},
                 {"height", scenario.meta.height},
                 {"detectors", json::array()}};
    for (const auto &t : scenario.traces) {
        std::ostringstream det, lat;
        write_mot(det, t.frames());
        write_latency_sidecar(lat, t.latency_profile(), t.frame_count());
        write_text(dir / ("det_" + dir_name(t.name()) + ".txt"), det.str());
        write_text(dir / ("latency_" + dir_name(t.name()) + ".csv"), lat.str());
        meta["detectors"].push_back({{"name", t.name()},
                                     {"trace", "det_" + dir_name(t.name()) + ".txt"},
                                     {"latency_file", "latency_" + dir_name(t.name()) + ".csv"}});
    }
    write_text(dir / "meta.json", meta.dump(2) + "\n");
}

} // namespace roma
