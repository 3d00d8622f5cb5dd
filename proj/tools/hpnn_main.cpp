// hpnn_main.cpp -- experiment command line: train, eval, cv, blur-sweep,
// params, gradcheck, synth.
//
// Exit codes: 0 success, 1 usage error, 2 data/geometry error (and a
// gradcheck result above threshold).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpnn/dataset.hpp"
#include "hpnn/error.hpp"
#include "hpnn/experiment.hpp"
#include "hpnn/image.hpp"
#include "hpnn/rng.hpp"
#include "hpnn/serialize.hpp"
#include "hpnn/synthetic.hpp"
#include "hpnn/trainer.hpp"

namespace {

using namespace hpnn;

// Flag-combination problems: exit code 1, as opposed to data/geometry
// errors which exit 2.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            values.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("--sizes: '" + item + "' is not an integer");
        }
    }
    if (values.empty()) {
        throw UsageError("--sizes: expected a comma-separated integer list, got '" +
                         text + "'");
    }
    return values;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
    return buf;
}

void print_eval_report(const EvalReport& report,
                       const std::vector<std::string>& class_names) {
    std::cout << "samples: " << report.total << "\n";
    std::cout << "accuracy: " << percent(report.accuracy) << "% ("
              << format_full(report.accuracy) << ")\n";
    std::cout << "confusion matrix (rows = true, cols = predicted):\n";
    const int C = static_cast<int>(class_names.size());
    for (int c = 0; c < C; ++c) {
        std::cout << "  " << class_names[c] << ":";
        for (int p = 0; p < C; ++p) {
            std::cout << ' ' << report.confusion[static_cast<std::size_t>(c) * C + p];
        }
        std::cout << "  recall " << percent(report.per_class_recall[c]) << "%\n";
    }
}

void write_eval_csv(const EvalReport& report,
                    const std::vector<std::string>& class_names,
                    const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "accuracy," << format_full(report.accuracy) << '\n';
    out << "class,recall,support\n";
    const int C = static_cast<int>(class_names.size());
    for (int c = 0; c < C; ++c) {
        std::size_t support = 0;
        for (int p = 0; p < C; ++p) {
            support += report.confusion[static_cast<std::size_t>(c) * C + p];
        }
        out << class_names[c] << ',' << format_full(report.per_class_recall[c])
            << ',' << support << '\n';
    }
}

struct CommonArgs {
    std::string config_path;
    std::string index_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
    ExperimentConfig cfg = load_experiment_config(args.config_path);
    if (!args.index_path.empty()) cfg.index_path = args.index_path;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    if (args.seed_override) cfg.train.seed = *args.seed_override;
    return cfg;
}

DatasetIndex index_for(const ExperimentConfig& cfg) {
    if (!cfg.index_path) {
        throw UsageError("no dataset index given (--index or config \"index\")");
    }
    return load_index(*cfg.index_path);
}

int cmd_train(const CommonArgs& args) {
    const ExperimentConfig cfg = resolve_config(args);
    const DatasetIndex index = index_for(cfg);
    if (index.n_classes() != cfg.classes) {
        throw Error("index declares " + std::to_string(index.n_classes()) +
                    " classes but config expects " + std::to_string(cfg.classes));
    }
    std::cout << "seed: " << cfg.train.seed << "\n";

    const NetworkSpec spec = build_network_spec(cfg);
    const FoldPlan plan = subject_folds(index, 10);
    // Standalone training holds out fold 0 as the validation split and
    // fits on the other nine.
    std::vector<int> train_folds;
    for (int f = 1; f < plan.n_folds; ++f) train_folds.push_back(f);
    const SampleSet train_set = load_samples(index, &plan, train_folds,
                                             cfg.input_height, cfg.input_width);
    const SampleSet val_set =
        load_samples(index, &plan, {0}, cfg.input_height, cfg.input_width);

    auto [net, history] = train(spec, train_set, val_set, cfg.train);

    const std::string out_dir = cfg.out_dir.value_or(".");
    std::filesystem::create_directories(out_dir);
    const std::string model_path =
        (std::filesystem::path(out_dir) / "model.hpnn").string();
    save_network(net, model_path);
    {
        std::ofstream out(std::filesystem::path(out_dir) / "history.csv");
        if (!out) throw IoError("cannot write history.csv in " + out_dir);
        write_history_csv(history, out);
    }
    std::cout << "best epoch: " << history.best_epoch << " (val acc "
              << percent(history.best_val_acc) << "%)\n";
    std::cout << "model: " << model_path << "\n";
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& index_path,
             const std::string& plan_path, int fold, const std::string& csv_path) {
    if (plan_path.empty() && fold >= 0) {
        throw UsageError("--fold requires --fold-plan");
    }

    const Network net = load_network(model_path);
    const DatasetIndex index = load_index(index_path);
    if (index.n_classes() != net.spec.n_classes) {
        throw Error("index declares " + std::to_string(index.n_classes()) +
                    " classes but the model has " +
                    std::to_string(net.spec.n_classes));
    }

    FoldPlan plan;
    const FoldPlan* plan_ptr = nullptr;
    std::vector<int> folds;
    if (!plan_path.empty()) {
        plan = load_fold_plan(plan_path);
        plan_ptr = &plan;
        if (fold >= 0) folds.push_back(fold);
    }

    const SampleSet set = load_samples(index, plan_ptr, folds,
                                       net.spec.input_height,
                                       net.spec.input_width);
    const EvalReport report = evaluate(net, set);
    print_eval_report(report, index.class_names);
    if (!csv_path.empty()) {
        write_eval_csv(report, index.class_names, csv_path);
    }
    return 0;
}

int cmd_cv(const CommonArgs& args, bool half_subjects) {
    const ExperimentConfig cfg = resolve_config(args);
    const DatasetIndex index = index_for(cfg);
    std::cout << "seed: " << cfg.train.seed << "\n";

    const std::string out_dir = cfg.out_dir.value_or("cv_out");
    const CvResult result =
        run_cross_validation(cfg, index, out_dir, half_subjects);
    for (const CvTrialResult& tr : result.trials) {
        std::cout << "trial " << tr.trial << ": test acc "
                  << percent(tr.test_accuracy) << "%\n";
    }
    std::cout << "mean recognition rate: " << percent(result.mean_accuracy)
              << " (" << percent(result.stddev_accuracy) << ")\n";
    std::cout << "artifacts: " << out_dir << "\n";
    return 0;
}

int cmd_blur_sweep(const std::string& model_path, const std::string& models_dir,
                   const std::string& index_path, const std::string& plan_path,
                   int fold, const std::string& sizes_text,
                   const std::string& out_path) {
    const std::vector<int> sizes = parse_int_list(sizes_text);
    if (models_dir.empty()) {
        if (!plan_path.empty() && fold < 0) {
            throw UsageError("--fold-plan requires --fold for a single model");
        }
        if (plan_path.empty() && fold >= 0) {
            throw UsageError("--fold requires --fold-plan");
        }
    }
    const DatasetIndex index = load_index(index_path);

    std::vector<std::string> model_paths;
    std::vector<int> eval_folds;
    FoldPlan plan;
    const FoldPlan* plan_ptr = nullptr;

    if (!models_dir.empty()) {
        // A cv output directory: trial models evaluated on their test folds.
        plan = load_fold_plan(
            (std::filesystem::path(models_dir) / "foldplan.csv").string());
        plan_ptr = &plan;
        for (int t = 0;; ++t) {
            const std::string path =
                (std::filesystem::path(models_dir) /
                 ("trial" + std::to_string(t) + ".hpnn"))
                    .string();
            if (!std::filesystem::exists(path)) break;
            model_paths.push_back(path);
            eval_folds.push_back(t);
        }
        if (model_paths.empty()) {
            throw Error("no trial models found in " + models_dir);
        }
    } else {
        model_paths.push_back(model_path);
        if (!plan_path.empty()) {
            plan = load_fold_plan(plan_path);
            plan_ptr = &plan;
            eval_folds.push_back(fold);
        }
    }

    const std::vector<BlurPoint> points =
        run_blur_sweep(model_paths, index, plan_ptr, eval_folds, sizes);

    std::ostringstream csv;
    csv << "filter_size,mean_acc,std_acc\n";
    for (const BlurPoint& p : points) {
        csv << p.filter_size << ',' << format_full(p.mean_accuracy) << ','
            << format_full(p.stddev_accuracy) << '\n';
    }
    std::cout << csv.str();
    for (const BlurPoint& p : points) {
        std::cout << "size " << p.filter_size << ": "
                  << percent(p.mean_accuracy) << " ("
                  << percent(p.stddev_accuracy) << ")\n";
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << csv.str();
    }
    return 0;
}

int cmd_params(const std::string& config_path) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const NetworkSpec spec = build_network_spec(cfg);
    const ParamCountReport report = count_params(spec);
    std::cout << "layer,weights,biases,total\n";
    std::size_t weights = 0;
    std::size_t biases = 0;
    for (const LayerParamCount& c : report.layers) {
        std::cout << c.layer << ',' << c.weights << ',' << c.biases << ','
                  << c.total() << '\n';
        weights += c.weights;
        biases += c.biases;
    }
    std::cout << "total," << weights << ',' << biases << ',' << report.total
              << '\n';
    return 0;
}

int cmd_gradcheck(const std::string& config_path,
                  std::optional<std::uint64_t> seed_override, double step) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (seed_override) cfg.train.seed = *seed_override;
    std::cout << "seed: " << cfg.train.seed << "\n";

    const NetworkSpec spec = build_network_spec(cfg);
    Network net = init_params(spec, cfg.train.seed);

    SplitMix64 rng(cfg.train.seed ^ 0xA02BDBF7BB3C0A7ULL);
    LabeledSample sample;
    sample.input = FeatureMap(1, spec.input_height, spec.input_width);
    for (double& v : sample.input.data()) v = rng.uniform(-1.0, 1.0);
    sample.label = static_cast<int>(rng.below(spec.n_classes));

    const double max_error = gradient_check(net, sample, step);
    std::cout << "max relative error: " << format_full(max_error) << "\n";
    if (max_error > 1e-5) {
        std::cout << "FAIL: above 1e-5\n";
        return 2;
    }
    std::cout << "OK\n";
    return 0;
}

int cmd_synth(int classes, int subjects, int per_subject, int size,
              const std::string& out_dir, std::uint64_t seed) {
    std::cout << "seed: " << seed << "\n";
    SyntheticConfig cfg;
    cfg.classes = classes;
    cfg.subjects = subjects;
    cfg.per_subject = per_subject;
    cfg.size = size;
    cfg.seed = seed;
    const DatasetIndex index = generate_synthetic(cfg, out_dir);
    std::cout << "wrote " << index.records.size() << " images and index.csv to "
              << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sub-layered pyramidal network trainer and experiment harness"};
    app.require_subcommand(1);

    CommonArgs common;
    std::uint64_t seed_flag = 0;

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a model on an index");
    train_cmd->add_option("--config", common.config_path, "experiment config JSON")
        ->required();
    train_cmd->add_option("--index", common.index_path, "dataset index CSV");
    train_cmd->add_option("--out", common.out_dir, "output directory");
    auto* train_seed = train_cmd->add_option("--seed", seed_flag, "seed override");

    // eval
    std::string model_path, plan_path, csv_path;
    int fold = -1;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model on an index");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--index", common.index_path, "dataset index CSV")
        ->required();
    eval_cmd->add_option("--fold-plan", plan_path, "fold plan CSV");
    eval_cmd->add_option("--fold", fold, "restrict to one fold");
    eval_cmd->add_option("--csv", csv_path, "write report CSV here");

    // cv
    bool half_subjects = false;
    auto* cv_cmd = app.add_subcommand(
        "cv", "Subject-independent 10-fold cross-validation");
    cv_cmd->add_option("--config", common.config_path, "experiment config JSON")
        ->required();
    cv_cmd->add_option("--index", common.index_path, "dataset index CSV");
    cv_cmd->add_option("--out", common.out_dir, "output directory");
    cv_cmd->add_flag("--half-subjects", half_subjects,
                     "keep only 4 of the 8 training folds per trial");
    auto* cv_seed = cv_cmd->add_option("--seed", seed_flag, "seed override");

    // blur-sweep
    std::string models_dir, sizes_text = "3,6,9,12,15", out_path;
    auto* blur_cmd = app.add_subcommand(
        "blur-sweep", "Accuracy under mean-filter degradation");
    auto* blur_model = blur_cmd->add_option("--model", model_path, "model file");
    auto* blur_models =
        blur_cmd->add_option("--models", models_dir, "cv output directory");
    blur_model->excludes(blur_models);
    blur_cmd->add_option("--index", common.index_path, "dataset index CSV")
        ->required();
    blur_cmd->add_option("--fold-plan", plan_path, "fold plan CSV");
    blur_cmd->add_option("--fold", fold, "restrict to one fold");
    blur_cmd->add_option("--sizes", sizes_text, "comma list of odd filter sizes");
    blur_cmd->add_option("--out", out_path, "write sweep CSV here");

    // params
    auto* params_cmd =
        app.add_subcommand("params", "Trainable parameter counts");
    params_cmd->add_option("--config", common.config_path, "experiment config JSON")
        ->required();

    // gradcheck
    double step = 1e-5;
    auto* grad_cmd = app.add_subcommand(
        "gradcheck", "Finite-difference check of the analytic gradients");
    grad_cmd->add_option("--config", common.config_path, "experiment config JSON")
        ->required();
    auto* grad_seed = grad_cmd->add_option("--seed", seed_flag, "seed override");
    grad_cmd->add_option("--step", step, "finite-difference step (default 1e-5)");

    // synth
    int classes = 4, subjects = 20, per_subject = 5, size = 32;
    std::uint64_t synth_seed = 0;
    auto* synth_cmd =
        app.add_subcommand("synth", "Generate a synthetic PGM corpus");
    synth_cmd->add_option("--classes", classes, "class count")->required();
    synth_cmd->add_option("--subjects", subjects, "subject count")->required();
    synth_cmd->add_option("--per-subject", per_subject,
                          "images per subject per class")
        ->required();
    synth_cmd->add_option("--size", size, "square image extent")->required();
    synth_cmd->add_option("--out", common.out_dir, "output directory")->required();
    synth_cmd->add_option("--seed", synth_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*train_cmd) {
            if (*train_seed) common.seed_override = seed_flag;
            return cmd_train(common);
        }
        if (*eval_cmd) {
            return cmd_eval(model_path, common.index_path, plan_path, fold,
                            csv_path);
        }
        if (*cv_cmd) {
            if (*cv_seed) common.seed_override = seed_flag;
            return cmd_cv(common, half_subjects);
        }
        if (*blur_cmd) {
            if (model_path.empty() && models_dir.empty()) {
                std::cerr << "usage error: blur-sweep needs --model or --models\n";
                return 1;
            }
            return cmd_blur_sweep(model_path, models_dir, common.index_path,
                                  plan_path, fold, sizes_text, out_path);
        }
        if (*params_cmd) {
            return cmd_params(common.config_path);
        }
        if (*grad_cmd) {
            std::optional<std::uint64_t> seed;
            if (*grad_seed) seed = seed_flag;
            return cmd_gradcheck(common.config_path, seed, step);
        }
        if (*synth_cmd) {
            return cmd_synth(classes, subjects, per_subject, size,
                             common.out_dir, synth_seed);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
