#include "hpnn/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hpnn/error.hpp"
#include "hpnn/image.hpp"
#include "hpnn/serialize.hpp"

namespace hpnn {

using ordered_json = nlohmann::ordered_json;

namespace {

Activation activation_from_json(const ordered_json& j, const char* context) {
    if (!j.is_string()) {
        throw ParseError(std::string("config: ") + context +
                         " activation must be a string");
    }
    return activation_from_name(j.get<std::string>());
}

} // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }

    try {
        ExperimentConfig cfg;
        const auto& input = doc.at("input");
        cfg.input_height = input.at("height").get<int>();
        cfg.input_width = input.at("width").get<int>();

        for (const auto& layer : doc.at("pyramidal")) {
            PyramidalLayerConfig lc;
            lc.sublayers = layer.at("sublayers").get<int>();
            lc.field = layer.at("field").get<int>();
            lc.overlap = layer.at("overlap").get<int>();
            if (layer.contains("activation")) {
                lc.activation = activation_from_json(layer["activation"], "layer");
            }
            cfg.pyramidal.push_back(lc);
        }

        cfg.hidden_dense = doc.at("dense").get<std::vector<int>>();
        cfg.classes = doc.at("classes").get<int>();
        if (doc.contains("bias")) {
            const std::string mode = doc["bias"].get<std::string>();
            if (mode == "per-neuron") {
                cfg.bias_mode = BiasMode::PerNeuron;
            } else if (mode == "per-sublayer") {
                cfg.bias_mode = BiasMode::PerSubLayer;
            } else {
                throw ParseError("config: bias must be 'per-neuron' or "
                                 "'per-sublayer', got '" + mode + "'");
            }
        }

        if (doc.contains("train")) {
            const auto& t = doc["train"];
            if (t.contains("learning_rate"))
                cfg.train.learning_rate = t["learning_rate"].get<double>();
            if (t.contains("momentum"))
                cfg.train.momentum = t["momentum"].get<double>();
            if (t.contains("batch_size"))
                cfg.train.batch_size = t["batch_size"].get<int>();
            if (t.contains("max_epochs"))
                cfg.train.max_epochs = t["max_epochs"].get<int>();
            if (t.contains("patience"))
                cfg.train.patience = t["patience"].get<int>();
            if (t.contains("seed"))
                cfg.train.seed = t["seed"].get<std::uint64_t>();
            if (t.contains("activation"))
                cfg.train.activation = activation_from_json(t["activation"], "train");
        }
        if (doc.contains("index")) {
            cfg.index_path = doc["index"].get<std::string>();
        }
        if (doc.contains("out")) {
            cfg.out_dir = doc["out"].get<std::string>();
        }
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config: " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
    ordered_json doc;
    doc["input"] = {{"height", cfg.input_height}, {"width", cfg.input_width}};
    doc["pyramidal"] = ordered_json::array();
    for (const PyramidalLayerConfig& lc : cfg.pyramidal) {
        ordered_json layer = {{"sublayers", lc.sublayers},
                              {"field", lc.field},
                              {"overlap", lc.overlap}};
        if (lc.activation) {
            layer["activation"] = activation_name(*lc.activation);
        }
        doc["pyramidal"].push_back(layer);
    }
    doc["dense"] = cfg.hidden_dense;
    doc["classes"] = cfg.classes;
    doc["bias"] =
        cfg.bias_mode == BiasMode::PerNeuron ? "per-neuron" : "per-sublayer";
    doc["train"] = {{"learning_rate", cfg.train.learning_rate},
                    {"momentum", cfg.train.momentum},
                    {"batch_size", cfg.train.batch_size},
                    {"max_epochs", cfg.train.max_epochs},
                    {"patience", cfg.train.patience},
                    {"seed", cfg.train.seed},
                    {"activation", activation_name(cfg.train.activation)}};
    if (cfg.index_path) doc["index"] = *cfg.index_path;
    if (cfg.out_dir) doc["out"] = *cfg.out_dir;
    return doc.dump(2) + "\n";
}

NetworkSpec build_network_spec(const ExperimentConfig& cfg) {
    NetworkSpec spec;
    spec.input_height = cfg.input_height;
    spec.input_width = cfg.input_width;
    for (const PyramidalLayerConfig& lc : cfg.pyramidal) {
        PyramidalLayerSpec layer;
        layer.sublayers_out = lc.sublayers;
        layer.field_size = lc.field;
        layer.overlap = lc.overlap;
        layer.activation = lc.activation.value_or(cfg.train.activation);
        layer.bias_mode = cfg.bias_mode;
        spec.pyramidal.push_back(layer);
    }
    for (int units : cfg.hidden_dense) {
        spec.dense.push_back(DenseLayerSpec{units, cfg.train.activation});
    }
    spec.dense.push_back(DenseLayerSpec{cfg.classes, Activation::Identity});
    spec.n_classes = cfg.classes;
    resolve_network(spec); // validate before anything trains
    return spec;
}

SampleSet load_samples(const DatasetIndex& index, const FoldPlan* plan,
                       const std::vector<int>& folds, int height, int width,
                       int blur_size) {
    const std::set<int> wanted(folds.begin(), folds.end());
    SampleSet samples;
    for (const SampleRecord& record : index.records) {
        if (plan && !wanted.empty() &&
            wanted.count(plan->fold_of(record.subject_id)) == 0) {
            continue;
        }
        GrayImage img = load_pgm(record.image_path);
        img = resize_bilinear(img, height, width);
        if (blur_size > 1) {
            // box_blur rather than mean_filter: the sweep protocol includes
            // even sizes, which have no centered window
            img = box_blur(img, blur_size);
        }
        samples.push_back(LabeledSample{normalize(img), record.label});
    }
    return samples;
}

double sample_stddev(const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::string format_full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

CvResult run_cross_validation(const ExperimentConfig& cfg,
                              const DatasetIndex& index,
                              const std::string& out_dir, bool half_subjects) {
    if (index.n_classes() != cfg.classes) {
        throw Error("index declares " + std::to_string(index.n_classes()) +
                    " classes but config expects " + std::to_string(cfg.classes));
    }
    const NetworkSpec spec = build_network_spec(cfg);
    std::filesystem::create_directories(out_dir);

    CvResult result;
    result.plan = subject_folds(index, 10);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "foldplan.csv");
        if (!out) throw IoError("cannot write foldplan.csv in " + out_dir);
        write_fold_plan(result.plan, out);
    }

    std::vector<double> accuracies;
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint64_t trial_seed = cfg.train.seed + trial;
        std::vector<int> train_folds = result.plan.training_folds(trial);
        if (half_subjects) {
            train_folds = reduce_training_folds(train_folds, trial_seed);
        }

        const SampleSet train_set =
            load_samples(index, &result.plan, train_folds, cfg.input_height,
                         cfg.input_width);
        const SampleSet val_set =
            load_samples(index, &result.plan, {result.plan.validation_fold(trial)},
                         cfg.input_height, cfg.input_width);
        const SampleSet test_set = load_samples(
            index, &result.plan, {trial}, cfg.input_height, cfg.input_width);

        TrainConfig trial_cfg = cfg.train;
        trial_cfg.seed = trial_seed;
        auto [net, history] = train(spec, train_set, val_set, trial_cfg);

        CvTrialResult tr;
        tr.trial = trial;
        tr.test_accuracy = evaluate(net, test_set).accuracy;
        tr.model_path = (std::filesystem::path(out_dir) /
                         ("trial" + std::to_string(trial) + ".hpnn"))
                            .string();
        save_network(net, tr.model_path);
        {
            std::ofstream out(std::filesystem::path(out_dir) /
                              ("trial" + std::to_string(trial) + "_history.csv"));
            if (!out) throw IoError("cannot write history CSV in " + out_dir);
            write_history_csv(history, out);
        }
        accuracies.push_back(tr.test_accuracy);
        result.trials.push_back(std::move(tr));
    }

    for (double a : accuracies) result.mean_accuracy += a;
    result.mean_accuracy /= static_cast<double>(accuracies.size());
    result.stddev_accuracy = sample_stddev(accuracies);

    std::ofstream out(std::filesystem::path(out_dir) / "summary.csv");
    if (!out) throw IoError("cannot write summary.csv in " + out_dir);
    out << "trial,test_acc\n";
    for (const CvTrialResult& tr : result.trials) {
        out << tr.trial << ',' << format_full(tr.test_accuracy) << '\n';
    }
    return result;
}

std::vector<BlurPoint> run_blur_sweep(const std::vector<std::string>& model_paths,
                                      const DatasetIndex& index,
                                      const FoldPlan* plan,
                                      const std::vector<int>& eval_folds,
                                      const std::vector<int>& sizes) {
    if (model_paths.empty()) {
        throw Error("blur sweep needs at least one model");
    }
    if (plan && eval_folds.size() != model_paths.size()) {
        throw Error("blur sweep: one evaluation fold per model is required");
    }

    std::vector<Network> nets;
    for (const std::string& path : model_paths) {
        nets.push_back(load_network(path));
    }

    std::vector<BlurPoint> points;
    for (int size : sizes) {
        std::vector<double> accs;
        for (std::size_t m = 0; m < nets.size(); ++m) {
            const std::vector<int> folds =
                plan ? std::vector<int>{eval_folds[m]} : std::vector<int>{};
            const SampleSet set =
                load_samples(index, plan, folds, nets[m].spec.input_height,
                             nets[m].spec.input_width, size);
            accs.push_back(evaluate(nets[m], set).accuracy);
        }
        BlurPoint point;
        point.filter_size = size;
        for (double a : accs) point.mean_accuracy += a;
        point.mean_accuracy /= static_cast<double>(accs.size());
        point.stddev_accuracy = sample_stddev(accs);
        points.push_back(point);
    }
    return points;
}

} // namespace hpnn
