// roma: experiment front-end.
//
//   roma build-prior   --config exp.json --output prior.txt
//   roma simulate      --config exp.json [--seed N] [--fps F] [--policy L]... [--case C]... [--output-dir D]
//   roma gen-synthetic --scenario scene.json --seed N --output-dir D
//   roma compare       <experiment dir>... [--output summary.csv]

#include "roma/experiment.hpp"
#include "roma/mot_io.hpp"
#include "roma/prior_model.hpp"
#include "roma/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> fps;
    std::vector<std::string> policies;
    std::vector<std::string> cases;
    std::string output_dir;
};

roma::ExperimentConfig load_with_overrides(const std::string &path, const Overrides &o) {
    auto config = roma::ExperimentConfig::load(path);
    if (o.seed) {
        config.seed = *o.seed;
        config.raw["seed"] = *o.seed;
    }
    if (o.fps) {
        config.fps = *o.fps;
        config.raw["fps"] = *o.fps;
    }
    if (!o.output_dir.empty()) {
        config.output_dir = o.output_dir;
        config.raw["output_dir"] = o.output_dir;
    }
    if (!o.cases.empty()) {
        std::erase_if(config.cases, [&](const roma::CaseSpec &c) {
            return std::find(o.cases.begin(), o.cases.end(), c.name) == o.cases.end();
        });
        config.raw["selected_cases"] = o.cases;
    }
    if (!o.policies.empty())
        config.raw["selected_policies"] = o.policies;
    config.validate();
    return config;
}

void keep_policies(roma::ExperimentResult &result, const std::vector<std::string> &keep) {
    if (keep.empty())
        return;
    roma::ExperimentResult filtered;
    filtered.cases = result.cases;
    filtered.detectors = result.detectors;
    for (std::size_t p = 0; p < result.policies.size(); ++p) {
        if (std::find(keep.begin(), keep.end(), result.policies[p]) == keep.end())
            continue;
        filtered.policies.push_back(result.policies[p]);
        for (std::size_t c = 0; c < result.cases.size(); ++c)
            filtered.runs.push_back(std::move(result.runs[p * result.cases.size() + c]));
    }
    if (filtered.policies.empty())
        throw roma::ConfigError("--policy matched no configured policy");
    result = std::move(filtered);
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Run-time detector selection experiments on detection traces"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    std::string prior_out = "prior.txt";

    auto *build = app.add_subcommand("build-prior", "Build the offline per-region detection histogram");
    build->add_option("--config", config_path, "Experiment config (uses its 'prior' block)")->required();
    build->add_option("--output", prior_out, "Prior file to write")->capture_default_str();
    build->add_option("--seed", overrides.seed, "Seed for synthetic data (default: config seed)");

    auto *simulate = app.add_subcommand("simulate", "Run every policy under every workload case");
    simulate->add_option("--config", config_path, "Experiment config")->required();
    simulate->add_option("--seed", overrides.seed, "Seed for synthetic data");
    simulate->add_option("--fps", overrides.fps, "Frame rate (default: video's native rate, else 30)");
    simulate->add_option("--policy", overrides.policies, "Only run policies with these labels");
    simulate->add_option("--case", overrides.cases, "Only run these workload cases");
    simulate->add_option("--output-dir", overrides.output_dir, "Output root (default: config output_dir)");

    std::string scenario_path;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "synthetic";
    auto *gen = app.add_subcommand("gen-synthetic", "Write a synthetic video's ground truth and traces");
    gen->add_option("--scenario", scenario_path, "Scenario file")->required();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--output-dir", gen_out, "Directory to write")->capture_default_str();

    std::vector<std::string> compare_dirs;
    std::string compare_out;
    auto *compare = app.add_subcommand("compare", "Tabulate AP of finished experiment directories");
    compare->add_option("dirs", compare_dirs, "Experiment directories")->required();
    compare->add_option("--output", compare_out, "Write the table here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*build) {
            auto config = load_with_overrides(config_path, overrides);
            auto data = roma::load_experiment_data(config);
            roma::save_prior(prior_out, data.prior);
            std::cout << "wrote " << prior_out << " (" << data.prior.detectors() << " x " << data.prior.regions()
                      << ")\n";
        } else if (*simulate) {
            auto config = load_with_overrides(config_path, overrides);
            auto data = roma::load_experiment_data(config);
            auto result = roma::run_experiment(config, data);
            keep_policies(result, overrides.policies);
            const auto dir = roma::write_experiment_outputs(config, result);
            roma::write_summary_csv(std::cout, result);
            std::cout << "results in " << dir.string() << "\n";
        } else if (*gen) {
            auto spec = roma::load_scenario(scenario_path);
            auto scenario = roma::generate_synthetic_scenario(spec, gen_seed);
            roma::write_synthetic_files(scenario, gen_out);
            std::cout << "wrote " << scenario.meta.frame_count << " frames, " << scenario.traces.size()
                      << " detector traces to " << gen_out << "\n";
        } else if (*compare) {
            std::ofstream file;
            if (!compare_out.empty()) {
                file.open(compare_out);
                if (!file)
                    throw roma::DataError("cannot write '" + compare_out + "'");
            }
            std::ostream &out = compare_out.empty() ? std::cout : file;
            for (std::size_t k = 0; k < compare_dirs.size(); ++k) {
                if (compare_dirs.size() > 1)
                    out << "# " << compare_dirs[k] << '\n';
                roma::compare_experiment_dir(compare_dirs[k], out);
            }
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
