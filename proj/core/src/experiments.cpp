#include "dvnet/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "dvnet/io_util.hpp"
#include "dvnet/parallel.hpp"
#include "dvnet/rng.hpp"
#include "dvnet/version.hpp"

namespace dvnet {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// minimal RFC-4180 reader
std::vector<std::vector<std::string>> parse_csv(const std::string& bytes) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        const char c = bytes[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < bytes.size() && bytes[i + 1] == '\n') ++i;
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* kExperiments[] = {"features", "classifiers", "ratios", "views"};

}  // namespace

void ExperimentConfig::validate() const {
    if (std::find(std::begin(kExperiments), std::end(kExperiments), experiment) ==
        std::end(kExperiments)) {
        throw UsageError("unknown experiment '" + experiment +
                         "' (expected features|classifiers|ratios|views)");
    }
    if (split.test_fraction <= 0.0 || split.test_fraction >= 1.0) {
        throw UsageError("split.test_fraction must be in (0,1)");
    }
    if (classifier.kind != "svm" && classifier.kind != "random_forest" &&
        classifier.kind != "knn") {
        throw UsageError("classifier.kind must be svm|random_forest|knn");
    }
    train.validate();
}

namespace {

ordered_json config_to_json(const ExperimentConfig& c) {
    ordered_json j;
    j["experiment"] = c.experiment;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["dataset"] = {{"n_benign", c.dataset.n_benign},
                    {"n_malignant", c.dataset.n_malignant},
                    {"difficulty", difficulty_name(c.dataset.difficulty)},
                    {"dir", c.dataset.dir}};
    j["split"] = {{"test_fraction", c.split.test_fraction}};
    j["pipeline"] = {{"median_radius", c.pipeline.median_radius},
                     {"butterworth_d0_frac", c.pipeline.butterworth_d0_frac},
                     {"butterworth_order", c.pipeline.butterworth_order},
                     {"disk_radius", c.pipeline.disk_radius}};
    j["train"] = {{"learning_rate", c.train.learning_rate},
                  {"batch_size", c.train.batch_size},
                  {"epochs", c.train.epochs},
                  {"l2_weight", c.train.l2_weight}};
    j["classifier"] = {{"kind", c.classifier.kind},
                       {"svm_c", c.classifier.svm_c},
                       {"svm_gamma", c.classifier.svm_gamma},
                       {"forest_trees", c.classifier.forest_trees},
                       {"forest_depth", c.classifier.forest_depth},
                       {"knn_k", c.classifier.knn_k}};
    return j;
}

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        static const char* kTop[] = {"experiment", "seed", "out_dir", "dataset",
                                     "split", "pipeline", "train", "classifier"};
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (std::find_if(std::begin(kTop), std::end(kTop), [&](const char* k) {
                    return it.key() == k;
                }) == std::end(kTop)) {
                throw UsageError("config: unknown key '" + it.key() + "'");
            }
        }
        read_key(j, "experiment", c.experiment);
        read_key(j, "seed", c.seed);
        read_key(j, "out_dir", c.out_dir);
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            read_key(d, "n_benign", c.dataset.n_benign);
            read_key(d, "n_malignant", c.dataset.n_malignant);
            if (d.contains("difficulty")) {
                c.dataset.difficulty = difficulty_from_name(d.at("difficulty").get<std::string>());
            }
            read_key(d, "dir", c.dataset.dir);
        }
        if (j.contains("split")) read_key(j.at("split"), "test_fraction", c.split.test_fraction);
        if (j.contains("pipeline")) {
            const auto& p = j.at("pipeline");
            read_key(p, "median_radius", c.pipeline.median_radius);
            read_key(p, "butterworth_d0_frac", c.pipeline.butterworth_d0_frac);
            read_key(p, "butterworth_order", c.pipeline.butterworth_order);
            read_key(p, "disk_radius", c.pipeline.disk_radius);
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            read_key(t, "learning_rate", c.train.learning_rate);
            read_key(t, "batch_size", c.train.batch_size);
            read_key(t, "epochs", c.train.epochs);
            read_key(t, "l2_weight", c.train.l2_weight);
        }
        if (j.contains("classifier")) {
            const auto& k = j.at("classifier");
            read_key(k, "kind", c.classifier.kind);
            read_key(k, "svm_c", c.classifier.svm_c);
            read_key(k, "svm_gamma", c.classifier.svm_gamma);
            read_key(k, "forest_trees", c.classifier.forest_trees);
            read_key(k, "forest_depth", c.classifier.forest_depth);
            read_key(k, "knn_k", c.classifier.knn_k);
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    c.train.seed = c.seed;
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    return from_json_text(read_file(path));
}

std::string ExperimentConfig::to_json_text() const {
    return config_to_json(*this).dump(2) + "\n";
}

std::string ExperimentConfig::canonical_string() const {
    // out_dir is a sink, not an input: it never affects computed results,
    // so it stays out of the provenance hash
    ordered_json j = config_to_json(*this);
    j.erase("out_dir");
    return j.dump();
}

std::string ExperimentConfig::config_hash() const {
    return hex16(fnv1a64(canonical_string()));
}

bool ResultTable::complete() const {
    for (const ResultRow& row : rows) {
        if (!row.ok) return false;
    }
    return true;
}

std::string ResultTable::to_csv() const {
    std::ostringstream os;
    os << "experiment,method,status,auc,accuracy,tp,fp,tn,fn,seed,config_hash,version\r\n";
    for (const ResultRow& row : rows) {
        os << csv_quote(experiment) << ',' << csv_quote(row.method) << ',';
        if (row.ok) {
            os << "ok," << format_metric(row.report.auc) << ',' << format_metric(row.report.accuracy)
               << ',' << row.report.tp << ',' << row.report.fp << ',' << row.report.tn << ','
               << row.report.fn;
        } else {
            os << csv_quote("error: " + row.error) << ",,,,,,";
        }
        os << ',' << seed << ',' << config_hash << ',' << version << "\r\n";
    }
    return os.str();
}

std::string ResultTable::to_json() const {
    ordered_json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["rows"] = ordered_json::array();
    for (const ResultRow& row : rows) {
        ordered_json r;
        r["method"] = row.method;
        r["status"] = row.ok ? "ok" : "error: " + row.error;
        if (row.ok) {
            r["auc"] = row.report.auc;
            r["accuracy"] = row.report.accuracy;
            r["tp"] = row.report.tp;
            r["fp"] = row.report.fp;
            r["tn"] = row.report.tn;
            r["fn"] = row.report.fn;
            r["seed"] = row.report.seed;
            r["config_hash"] = row.report.config_hash;
            if (row.report.convergence_warning) r["convergence_warning"] = true;
        }
        j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
}

ResultTable ResultTable::from_csv(const std::string& bytes) {
    const auto rows = parse_csv(bytes);
    if (rows.empty() || rows.front().size() != 12) {
        throw ParseError("result table: bad header", 0);
    }
    ResultTable table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() == 1 && r[0].empty()) continue;
        if (r.size() != 12) throw ParseError("result table: bad row width", i);
        ResultRow row;
        try {
            table.experiment = r[0];
            row.method = r[1];
            row.ok = r[2] == "ok";
            if (row.ok) {
                row.report.auc = std::stod(r[3]);
                row.report.accuracy = std::stod(r[4]);
                row.report.tp = std::stoul(r[5]);
                row.report.fp = std::stoul(r[6]);
                row.report.tn = std::stoul(r[7]);
                row.report.fn = std::stoul(r[8]);
            } else {
                row.error = r[2].rfind("error: ", 0) == 0 ? r[2].substr(7) : r[2];
            }
            row.report.seed = std::stoull(r[9]);
            row.report.config_hash = r[10];
            table.seed = std::stoull(r[9]);
            table.config_hash = r[10];
            table.version = r[11];
        } catch (const std::logic_error&) {
            throw ParseError("result table: malformed numeric field", i);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

SynthDataset dataset_for(const ExperimentConfig& config) {
    if (!config.dataset.dir.empty()) return load_dataset(config.dataset.dir);
    return generate_dataset(config.dataset.n_benign, config.dataset.n_malignant,
                            config.dataset.difficulty, config.seed);
}

TrainedClassifier make_classifier(const LabeledSet& train, const ClassifierConfig& config,
                                  std::uint64_t seed) {
    if (config.kind == "svm") {
        SvmParams params;
        params.c = config.svm_c;
        params.gamma = config.svm_gamma;
        return train_svm(train, params);
    }
    if (config.kind == "random_forest") {
        ForestParams params;
        params.n_trees = config.forest_trees;
        params.max_depth = config.forest_depth;
        params.seed = seed;
        return train_random_forest(train, params);
    }
    return train_knn(train, config.knn_k);
}

namespace {

struct FeatureMatrix {
    LabeledSet train;
    LabeledSet test;
};

// Classical descriptors run on the raw coronal ROI (the preprocessing chain
// is a separate deliverable producing shape masks).
FeatureMatrix classical_features(const SynthDataset& train, const SynthDataset& test,
                                 DescriptorId id, std::uint64_t seed) {
    auto extract = [&](const GrayImage& img) -> std::vector<double> {
        switch (id) {
            case DescriptorId::HGD: return hgd_descriptor(img).values;
            case DescriptorId::HOG: return hog_descriptor(img).values;
            case DescriptorId::GLCM: return glcm_features(img).values;
            default: throw ParamError("classical_features: not a classical descriptor");
        }
    };
    FeatureMatrix m;
    m.train.seed = m.test.seed = seed;
    auto fill = [&](const SynthDataset& ds, LabeledSet& out) {
        out.features.resize(ds.samples.size());
        out.labels.resize(ds.samples.size());
        parallel_for(ds.samples.size(), [&](std::size_t i) {
            out.features[i] = extract(ds.samples[i].coronal);
            out.labels[i] = ds.samples[i].label;
        });
    };
    fill(train, m.train);
    fill(test, m.test);
    return m;
}

FeatureMatrix penultimate_features(const Network& net, const SynthDataset& train,
                                   const SynthDataset& test, std::uint64_t seed) {
    FeatureMatrix m;
    m.train.seed = m.test.seed = seed;
    auto fill = [&](const SynthDataset& ds, LabeledSet& out) {
        out.features.resize(ds.samples.size());
        out.labels.resize(ds.samples.size());
        parallel_for(ds.samples.size(), [&](std::size_t i) {
            out.features[i] =
                net.infer_penultimate({net_input(ds.samples[i].coronal, net.arch())}).values();
            out.labels[i] = ds.samples[i].label;
        });
    };
    fill(train, m.train);
    fill(test, m.test);
    return m;
}

FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b) {
    FeatureMatrix m;
    m.train.seed = a.train.seed;
    m.test.seed = a.test.seed;
    auto join = [](const LabeledSet& x, const LabeledSet& y, LabeledSet& out) {
        out.labels = x.labels;
        out.features.resize(x.features.size());
        for (std::size_t i = 0; i < x.features.size(); ++i) {
            out.features[i] = x.features[i];
            out.features[i].insert(out.features[i].end(), y.features[i].begin(),
                                   y.features[i].end());
        }
    };
    join(a.train, b.train, m.train);
    join(a.test, b.test, m.test);
    return m;
}

struct TrainedFeatureNets {
    Network cnn1;
    Network cnn2;
};

TrainedFeatureNets train_feature_networks(const SynthDataset& train, const ExperimentConfig& config) {
    TrainedFeatureNets nets{Network(cnn1_spec(), derive_seed(config.seed, 0xC1)),
                            Network(cnn2_spec(), derive_seed(config.seed, 0xC2))};
    auto samples_for = [&](const ArchitectureSpec& arch) {
        std::vector<TrainSample> out;
        out.reserve(train.samples.size());
        for (const DualViewSample& s : train.samples) {
            out.push_back({{net_input(s.coronal, arch)}, s.label});
        }
        return out;
    };
    TrainConfig cfg1 = config.train;
    cfg1.seed = derive_seed(config.seed, 0x7E1);
    train_network(nets.cnn1, samples_for(nets.cnn1.arch()), cfg1);
    TrainConfig cfg2 = config.train;
    cfg2.seed = derive_seed(config.seed, 0x7E2);
    train_network(nets.cnn2, samples_for(nets.cnn2.arch()), cfg2);
    return nets;
}

ResultRow run_row(const std::string& method, const ExperimentConfig& config,
                  const std::function<EvalReport()>& body) {
    ResultRow row;
    row.method = method;
    try {
        row.report = body();
        row.report.seed = config.seed;
        row.report.config_hash = config.config_hash();
    } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

ResultTable make_table(const ExperimentConfig& config) {
    ResultTable table;
    table.experiment = config.experiment;
    table.seed = config.seed;
    table.config_hash = config.config_hash();
    table.version = kVersion;
    return table;
}

EvalReport classify_and_evaluate(const FeatureMatrix& m, const ExperimentConfig& config) {
    const TrainedClassifier clf =
        make_classifier(m.train, config.classifier, derive_seed(config.seed, 0xF0));
    return evaluate(clf, m.test);
}

}  // namespace

ResultTable run_features_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultTable table = make_table(config);
    const SynthDataset ds = dataset_for(config);
    const SplitResult split =
        stratified_split(ds, config.split.test_fraction, derive_seed(config.seed, 0x59717));

    for (DescriptorId id : {DescriptorId::HGD, DescriptorId::HOG, DescriptorId::GLCM}) {
        table.rows.push_back(run_row(descriptor_name(id), config, [&] {
            return classify_and_evaluate(
                classical_features(split.train, split.test, id, config.seed), config);
        }));
    }

    // CNN1 / CNN2 / fusion rows share the two pretrained networks: the
    // protocol fuses features of those same networks.
    try {
        const TrainedFeatureNets nets = train_feature_networks(split.train, config);
        const FeatureMatrix f1 = penultimate_features(nets.cnn1, split.train, split.test, config.seed);
        const FeatureMatrix f2 = penultimate_features(nets.cnn2, split.train, split.test, config.seed);
        table.rows.push_back(
            run_row("CNN1", config, [&] { return classify_and_evaluate(f1, config); }));
        table.rows.push_back(
            run_row("CNN2", config, [&] { return classify_and_evaluate(f2, config); }));
        table.rows.push_back(run_row("Feature Fusion CNN", config, [&] {
            return classify_and_evaluate(concat_features(f1, f2), config);
        }));
    } catch (const Error& e) {
        for (const char* name : {"CNN1", "CNN2", "Feature Fusion CNN"}) {
            ResultRow row;
            row.method = name;
            row.ok = false;
            row.error = e.what();
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

ResultTable run_classifiers_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultTable table = make_table(config);
    const SynthDataset ds = dataset_for(config);
    const SplitResult split =
        stratified_split(ds, config.split.test_fraction, derive_seed(config.seed, 0x59717));

    struct NamedKind {
        const char* method;
        const char* kind;
    };
    static constexpr NamedKind kKinds[] = {{"Random forest", "random_forest"},
                                           {"K neighbors", "knn"},
                                           {"Support Vector Machines", "svm"}};
    try {
        const TrainedFeatureNets nets = train_feature_networks(split.train, config);
        const FeatureMatrix fused = concat_features(
            penultimate_features(nets.cnn1, split.train, split.test, config.seed),
            penultimate_features(nets.cnn2, split.train, split.test, config.seed));
        for (const NamedKind& k : kKinds) {
            table.rows.push_back(run_row(k.method, config, [&] {
                ClassifierConfig cc = config.classifier;
                cc.kind = k.kind;
                const TrainedClassifier clf =
                    make_classifier(fused.train, cc, derive_seed(config.seed, 0xF0));
                return evaluate(clf, fused.test);
            }));
        }
    } catch (const Error& e) {
        for (const NamedKind& k : kKinds) {
            ResultRow row;
            row.method = k.method;
            row.ok = false;
            row.error = e.what();
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

ResultTable run_ratios_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultTable table = make_table(config);
    const SynthDataset ds = dataset_for(config);

    struct RatioRow {
        const char* method;
        double ratio;
    };
    static constexpr RatioRow kRatios[] = {{"2:1", 2.0}, {"1.3:1", 1.3}, {"1:1", 1.0}};
    for (const RatioRow& r : kRatios) {
        table.rows.push_back(run_row(r.method, config, [&] {
            // the split seed is shared across rows, so the test set is
            // element-wise identical and only the training mix varies
            const SplitResult split = split_with_ratio(ds, config.split.test_fraction, r.ratio,
                                                       derive_seed(config.seed, 0x59717));
            TrainConfig tc = config.train;
            tc.seed = config.seed;
            const FusionModel model = train_fusion_pipeline(split.train.samples, tc);
            std::vector<double> scores;
            std::vector<int> labels;
            scores.resize(split.test.samples.size());
            labels.resize(split.test.samples.size());
            parallel_for(split.test.samples.size(), [&](std::size_t i) {
                scores[i] = fusion_predict(model, split.test.samples[i].coronal);
                labels[i] = split.test.samples[i].label;
            });
            return evaluate_scores(scores, labels);
        }));
    }
    return table;
}

ResultTable run_views_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultTable table = make_table(config);
    const SynthDataset ds = dataset_for(config);
    const SplitResult split =
        stratified_split(ds, config.split.test_fraction, derive_seed(config.seed, 0x59717));
    TrainConfig tc = config.train;
    tc.seed = config.seed;
    const ViewComparisonResult result = run_view_comparison(split.train, split.test, tc);
    for (const NamedReport& named : result.reports) {
        ResultRow row;
        row.method = named.name;
        row.ok = named.ok;
        row.error = named.error;
        row.report = named.report;
        row.report.seed = config.seed;
        row.report.config_hash = config.config_hash();
        table.rows.push_back(std::move(row));
    }
    return table;
}

ResultTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.experiment == "features") return run_features_experiment(config);
    if (config.experiment == "classifiers") return run_classifiers_experiment(config);
    if (config.experiment == "ratios") return run_ratios_experiment(config);
    return run_views_experiment(config);
}

// ---------------------------------------------------------------------------
// Harness commands

void cmd_generate(const ExperimentConfig& config, const std::string& out_dir, bool force) {
    const fs::path manifest = fs::path(out_dir) / "manifest.json";
    if (fs::exists(manifest) && !force) {
        throw UsageError("output '" + out_dir + "' already holds a dataset (use --force)");
    }
    const SynthDataset ds = generate_dataset(config.dataset.n_benign, config.dataset.n_malignant,
                                             config.dataset.difficulty, config.seed);
    export_dataset(ds, out_dir);
}

PreprocessOutcome cmd_preprocess(const std::string& input_dir, const std::string& out_dir,
                                 const PipelineParams& params, const ExperimentConfig& config,
                                 bool with_timings) {
    if (!fs::is_directory(input_dir)) {
        throw UsageError("preprocess: input '" + input_dir + "' is not a directory");
    }
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::recursive_directory_iterator(input_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            inputs.push_back(entry.path());
        }
    }
    std::sort(inputs.begin(), inputs.end());

    struct Row {
        std::string rel;
        bool ok = false;
        std::string error;
        std::size_t width = 0, height = 0, mask_area = 0;
        double ms = 0.0;
    };
    std::vector<Row> results(inputs.size());
    parallel_for(inputs.size(), [&](std::size_t i) {
        Row& row = results[i];
        row.rel = fs::relative(inputs[i], input_dir).string();
        try {
            const GrayImage img = read_pgm(inputs[i].string());
            const auto t0 = std::chrono::steady_clock::now();
            const PipelineResult out = roi_pipeline(img, params);
            const auto t1 = std::chrono::steady_clock::now();
            row.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            const fs::path base = fs::path(out_dir) / fs::path(row.rel).parent_path() /
                                  fs::path(row.rel).stem();
            fs::create_directories(base.parent_path());
            write_pgm(out.enhanced, base.string() + "_enhanced.pgm");
            write_mask_pgm(out.shape, base.string() + "_mask.pgm");
            row.width = img.width;
            row.height = img.height;
            row.mask_area = out.shape.foreground_count();
            row.ok = true;
        } catch (const Error& e) {
            row.error = e.what();
        }
    });

    PreprocessOutcome outcome;
    std::ostringstream csv;
    csv << "file,status,width,height,mask_area";
    if (with_timings) csv << ",pipeline_ms";
    csv << ",seed,config_hash,version\r\n";
    for (const Row& row : results) {
        csv << csv_quote(row.rel) << ',';
        if (row.ok) {
            ++outcome.processed;
            csv << "ok," << row.width << ',' << row.height << ',' << row.mask_area;
            if (with_timings) csv << ',' << format_metric(row.ms);
        } else {
            outcome.errors.emplace_back(row.rel, row.error);
            csv << csv_quote("error: " + row.error) << ",,,";
            if (with_timings) csv << ',';
        }
        csv << ',' << config.seed << ',' << config.config_hash() << ',' << kVersion << "\r\n";
    }
    write_file_atomic((fs::path(out_dir) / "preprocess_report.csv").string(), csv.str());
    return outcome;
}

ResultTable cmd_run(const ExperimentConfig& config, const std::string& out_dir) {
    const ResultTable table = run_experiment(config);
    write_file_atomic((fs::path(out_dir) / "results.csv").string(), table.to_csv());
    write_file_atomic((fs::path(out_dir) / "results.json").string(), table.to_json());
    write_file_atomic((fs::path(out_dir) / "config.json").string(), config.to_json_text());
    return table;
}

ReportOutcome cmd_report(const std::vector<std::string>& result_dirs) {
    std::vector<ResultTable> tables;
    for (const std::string& dir : result_dirs) {
        const fs::path csv = fs::path(dir) / "results.csv";
        if (!fs::exists(csv)) continue;
        tables.push_back(ResultTable::from_csv(read_file(csv.string())));
    }
    if (tables.empty()) throw UsageError("report: no results.csv found in the given directories");

    ReportOutcome out;
    std::ostringstream csv, text;
    csv << "experiment,method,status,auc,accuracy,seed,config_hash,version\r\n";
    text << "dvnet summary (version " << kVersion << ")\n";
    for (const ResultTable& table : tables) {
        text << "\n[" << table.experiment << "] seed=" << table.seed
             << " config=" << table.config_hash << "\n";
        if (table.version != kVersion) {
            out.warnings.push_back("table '" + table.experiment + "' written by version " +
                                   table.version + ", this artifact is " + kVersion);
        }
        for (const ResultRow& row : table.rows) {
            if (row.report.config_hash != table.config_hash ||
                row.report.seed != table.seed) {
                out.warnings.push_back("row '" + row.method + "' in '" + table.experiment +
                                       "' has mismatched provenance");
            }
            csv << csv_quote(table.experiment) << ',' << csv_quote(row.method) << ','
                << (row.ok ? "ok" : csv_quote("error: " + row.error)) << ',';
            if (row.ok) {
                csv << format_metric(row.report.auc) << ',' << format_metric(row.report.accuracy);
            } else {
                csv << ',';
            }
            csv << ',' << table.seed << ',' << table.config_hash << ',' << table.version << "\r\n";

            char label[64];
            std::snprintf(label, sizeof(label), "  %-26s", row.method.c_str());
            text << label;
            if (row.ok) {
                const int bar = static_cast<int>(std::lround(row.report.auc * 40.0));
                text << format_metric(row.report.auc) << " |";
                for (int i = 0; i < bar; ++i) text << '#';
            } else {
                text << "error: " << row.error;
            }
            text << '\n';
        }
    }
    for (const std::string& warning : out.warnings) text << "\nWARNING: " << warning << '\n';
    out.summary_csv = csv.str();
    out.summary_text = text.str();
    return out;
}

}  // namespace dvnet
