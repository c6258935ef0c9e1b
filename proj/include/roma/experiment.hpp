#pragma once

// Experiment configuration and the policy x workload-case sweep.
//
// Config files are JSON ("format": "roma-experiment", "version": 1); see
// configs/ for complete examples. Relative paths resolve against the config
// file's directory.

#include "roma/evaluation.hpp"
#include "roma/policies.hpp"
#include "roma/prior_model.hpp"
#include "roma/simulator.hpp"
#include "roma/synthetic.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace roma {

inline constexpr int kExperimentVersion = 1;

struct Thresholds {
    double confidence = 0.3;
    double survival_iou = 0.5;
    double eval_iou = 0.5;
};

enum class PolicyKind { roma, static_detector, tod, lad };

struct PolicySpec {
    PolicyKind kind = PolicyKind::roma;
    std::string label;
    /// static: detector name
    std::string detector;
    /// roma: decision overhead coefficient, seconds per object^2
    double overhead_kappa = 0.0;
    /// tod: detector name per size region (empty = default map)
    std::vector<std::string> region_map;
    /// lad: upgrade when latency < fraction / fps
    double upgrade_fraction = 0.3;
};

struct CaseSpec {
    std::string name;
    WorkloadSchedule schedule;
};

/// Default workload cases a-d as constant latency multipliers.
std::vector<CaseSpec> default_cases();

struct ExperimentConfig {
    std::string name = "experiment";
    std::uint64_t seed = 1;
    /// Overrides the video's native rate when set.
    std::optional<double> fps;
    Thresholds thresholds;
    std::size_t min_update_block = kMinUpdateBlock;
    std::size_t max_block = kMaxBlockSize;
    RegionBoundaries boundaries;
    nlohmann::json video;
    nlohmann::json detectors;
    nlohmann::json prior;
    std::vector<CaseSpec> cases;
    std::vector<PolicySpec> policies;
    std::filesystem::path output_dir = "out";
    std::filesystem::path base_dir = ".";
    /// Config as read, written next to the outputs.
    nlohmann::json raw;

    static ExperimentConfig from_json(const nlohmann::json &j, const std::filesystem::path &base_dir);
    static ExperimentConfig load(const std::filesystem::path &path);
    void validate() const;
    std::filesystem::path resolve(const std::string &p) const;
};

/// Everything a sweep needs, loaded once and shared read-only by all runs.
struct ExperimentData {
    VideoMeta meta;
    GroundTruth ground_truth;
    std::vector<DetectionTrace> traces;
    PriorModel prior;

    std::vector<std::string> detector_names() const;
    std::size_t detector_index(const std::string &name) const;
};

ExperimentData load_experiment_data(const ExperimentConfig &config);

/// Prior from the config's "prior" block: a prior file, an inline matrix,
/// an offline synthetic scenario, or offline MOT trace files.
PriorModel load_or_build_prior(const ExperimentConfig &config, const VideoMeta &eval_meta,
                               const std::vector<DetectionTrace> &pool);

std::unique_ptr<Policy> make_policy(const PolicySpec &spec, const ExperimentConfig &config,
                                    const ExperimentData &data);

struct RunResult {
    std::string policy;
    std::string case_name;
    ApReport report;
    SimulationRun run;
    std::vector<double> selection_frequency;
};

struct ExperimentResult {
    std::vector<std::string> policies;
    std::vector<std::string> cases;
    std::vector<std::string> detectors;
    /// policy-major: runs[p * cases.size() + c]
    std::vector<RunResult> runs;

    const RunResult &at(std::size_t policy, std::size_t case_index) const;
    /// Mean AP of a policy across cases.
    double policy_mean(std::size_t policy) const;
};

/// Runs every (policy, case) pair; pairs run concurrently under OpenMP.
ExperimentResult run_experiment(const ExperimentConfig &config, const ExperimentData &data);
/// Same sweep, one run at a time.
ExperimentResult run_experiment_serial(const ExperimentConfig &config, const ExperimentData &data);

/// Rows are policies, columns are cases and their average; a final row holds
/// the per-case mean over policies.
void write_summary_csv(std::ostream &out, const std::vector<std::string> &policies,
                       const std::vector<std::string> &cases, const std::vector<std::vector<double>> &ap);
void write_summary_csv(std::ostream &out, const ExperimentResult &result);
/// Fraction of analyzed frames run by each detector, per (policy, case).
void write_deployment_csv(std::ostream &out, const ExperimentResult &result);

/// Writes <output_dir>/<name>/{config.json, summary.csv, deployment.csv} and
/// <policy>/<case>/{detections.txt, telemetry.csv, ap.json}. Returns the
/// experiment directory.
std::filesystem::path write_experiment_outputs(const ExperimentConfig &config, const ExperimentResult &result);

/// Rebuilds summary.csv content from the ap.json files of an experiment directory.
void compare_experiment_dir(const std::filesystem::path &dir, std::ostream &out);

/// Writes ground truth, detector traces and latency sidecars of a scenario.
void write_synthetic_files(const SyntheticScenario &scenario, const std::filesystem::path &dir);

} // namespace roma
