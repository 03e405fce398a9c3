// dvnet command line: generate / preprocess / run / report.
//
// Exit status: 0 full success, 2 partial success (some methods or files
// errored; the rest completed), 1 usage or configuration error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "dvnet/experiments.hpp"
#include "dvnet/io_util.hpp"
#include "dvnet/version.hpp"

namespace {

dvnet::ExperimentConfig load_config(const std::string& config_path, std::uint64_t* seed_override,
                                    const std::string* experiment_override) {
    dvnet::ExperimentConfig config;
    if (!config_path.empty()) config = dvnet::ExperimentConfig::from_json_file(config_path);
    if (seed_override) {
        config.seed = *seed_override;
        config.train.seed = *seed_override;
    }
    if (experiment_override && !experiment_override->empty()) {
        config.experiment = *experiment_override;
    }
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dvnet: dual-view breast-ultrasound lesion classification toolkit"};
    app.set_version_flag("--version", dvnet::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string experiment;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool force = false;
    bool timings = false;
    std::string input_dir;
    std::vector<std::string> report_dirs;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
    };

    CLI::App* generate = app.add_subcommand("generate", "materialize a synthetic dataset");
    add_common(generate);
    generate->add_flag("--force", force, "overwrite an existing dataset");

    CLI::App* preprocess = app.add_subcommand("preprocess", "run the ROI enhancement chain");
    add_common(preprocess);
    preprocess->add_option("input", input_dir, "dataset directory (synthdata layout)")->required();
    preprocess->add_flag("--timings", timings, "include per-image stage timings in the report");

    CLI::App* run = app.add_subcommand("run", "run an experiment and emit its result table");
    add_common(run);
    run->add_option("--experiment", experiment, "features|classifiers|ratios|views");

    CLI::App* report = app.add_subcommand("report", "merge result tables into a summary");
    add_common(report);
    report->add_option("dirs", report_dirs, "result directories")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        dvnet::ExperimentConfig config =
            load_config(config_path, seed_set ? &seed : nullptr, &experiment);
        const std::string out = out_dir.empty() ? config.out_dir : out_dir;

        if (generate->parsed()) {
            dvnet::cmd_generate(config, out, force);
            std::printf("dataset written to %s (seed %llu)\n", out.c_str(),
                        static_cast<unsigned long long>(config.seed));
            return 0;
        }
        if (preprocess->parsed()) {
            const dvnet::PreprocessOutcome outcome =
                dvnet::cmd_preprocess(input_dir, out, config.pipeline, config, timings);
            std::printf("preprocessed %zu images, %zu errors; report at %s/preprocess_report.csv\n",
                        outcome.processed, outcome.errors.size(), out.c_str());
            for (const auto& [file, message] : outcome.errors) {
                std::fprintf(stderr, "error: %s: %s\n", file.c_str(), message.c_str());
            }
            return outcome.errors.empty() ? 0 : 2;
        }
        if (run->parsed()) {
            const dvnet::ResultTable table = dvnet::cmd_run(config, out);
            std::printf("%s", table.to_csv().c_str());
            return table.complete() ? 0 : 2;
        }
        if (report->parsed()) {
            const dvnet::ReportOutcome outcome = dvnet::cmd_report(report_dirs);
            const std::string summary_out = out.empty() ? "." : out;
            dvnet::write_file_atomic(summary_out + "/summary.csv", outcome.summary_csv);
            dvnet::write_file_atomic(summary_out + "/summary.txt", outcome.summary_text);
            std::printf("%s", outcome.summary_text.c_str());
            return 0;
        }
    } catch (const dvnet::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const dvnet::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
