#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvnet/classifiers.hpp"
#include "dvnet/fusion.hpp"
#include "dvnet/preprocess.hpp"
#include "dvnet/synthdata.hpp"

namespace dvnet {

struct DatasetConfig {
    std::size_t n_benign = 71;
    std::size_t n_malignant = 74;
    Difficulty difficulty = Difficulty::standard;
    std::string dir;  // when set, load from disk instead of generating
};

struct SplitConfig {
    double test_fraction = 0.3;
};

struct ClassifierConfig {
    std::string kind = "svm";  // svm | random_forest | knn
    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 = 1 / feature_dim
    std::size_t forest_trees = 100;
    std::size_t forest_depth = 8;
    std::size_t knn_k = 5;
};

/// One experiment run, fully resolved. config_hash() is the stable 64-bit
/// FNV-1a of the canonical serialization and is embedded in every emitted
/// file alongside the seed and artifact version.
struct ExperimentConfig {
    std::string experiment = "features";  // features | classifiers | ratios | views
    std::uint64_t seed = 42;
    std::string out_dir = "results";
    DatasetConfig dataset;
    SplitConfig split;
    PipelineParams pipeline;
    TrainConfig train;  // train.seed is derived from `seed`, not configured
    ClassifierConfig classifier;

    void validate() const;
    std::string canonical_string() const;
    std::string config_hash() const;  // 16 hex digits

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json_text() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

struct ResultRow {
    std::string method;
    bool ok = true;
    std::string error;
    EvalReport report;
};

struct ResultTable {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string version;
    std::vector<ResultRow> rows;

    bool complete() const;
    std::string to_csv() const;  // RFC-4180
    std::string to_json() const;
    static ResultTable from_csv(const std::string& bytes);
};

/// Loads dataset.dir when set, otherwise generates per the config.
SynthDataset dataset_for(const ExperimentConfig& config);

TrainedClassifier make_classifier(const LabeledSet& train, const ClassifierConfig& config,
                                  std::uint64_t seed);

ResultTable run_features_experiment(const ExperimentConfig& config);
ResultTable run_classifiers_experiment(const ExperimentConfig& config);
ResultTable run_ratios_experiment(const ExperimentConfig& config);
ResultTable run_views_experiment(const ExperimentConfig& config);
ResultTable run_experiment(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Harness commands (the CLI is a thin wrapper over these)

/// Materializes the dataset under out_dir; refuses to overwrite an existing
/// manifest unless force.
void cmd_generate(const ExperimentConfig& config, const std::string& out_dir, bool force);

struct PreprocessOutcome {
    std::size_t processed = 0;
    std::vector<std::pair<std::string, std::string>> errors;  // (file, message)
};

/// Enhances every PGM under input_dir (synthdata layout), writing
/// *_enhanced.pgm and *_mask.pgm plus preprocess_report.csv under out_dir.
/// Per-file failures are recorded and the run continues. Stage timing
/// columns are emitted only when with_timings is set; they are wall-clock
/// and would break byte-level determinism of the report.
PreprocessOutcome cmd_preprocess(const std::string& input_dir, const std::string& out_dir,
                                 const PipelineParams& params, const ExperimentConfig& config,
                                 bool with_timings = false);

/// Runs the configured experiment and writes results.csv / results.json
/// under out_dir. Returns the table.
ResultTable cmd_run(const ExperimentConfig& config, const std::string& out_dir);

struct ReportOutcome {
    std::string summary_csv;
    std::string summary_text;
    std::vector<std::string> warnings;
};

/// Merges results.csv tables from the given directories into one summary
/// (CSV + text with AUC bars), flagging provenance mismatches.
ReportOutcome cmd_report(const std::vector<std::string>& result_dirs);

}  // namespace dvnet
