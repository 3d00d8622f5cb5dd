// experiment.hpp -- experiment configuration (JSON document) and the
// runners behind the CLI subcommands, kept in the library so tests can
// drive them directly.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hpnn/dataset.hpp"
#include "hpnn/network.hpp"
#include "hpnn/trainer.hpp"

namespace hpnn {

struct PyramidalLayerConfig {
    int sublayers = 1;
    int field = 2;
    int overlap = 0;
    std::optional<Activation> activation; // default: train.activation
};

// The on-disk JSON document. hidden_dense lists the dense layers before
// the final logits layer, which is materialized from `classes` with
// Identity activation.
struct ExperimentConfig {
    int input_height = 96;
    int input_width = 96;
    std::vector<PyramidalLayerConfig> pyramidal;
    std::vector<int> hidden_dense;
    int classes = 8;
    BiasMode bias_mode = BiasMode::PerNeuron;
    TrainConfig train;
    std::optional<std::string> index_path;
    std::optional<std::string> out_dir;
};

ExperimentConfig load_experiment_config(const std::string& path);
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_json(const ExperimentConfig& cfg);

// Materializes and validates the network architecture.
NetworkSpec build_network_spec(const ExperimentConfig& cfg);

// Loads every index record whose subject falls in `folds` (or all records
// when folds is empty): decode PGM -> resize to the configured input ->
// optional mean filter -> normalize.
SampleSet load_samples(const DatasetIndex& index, const FoldPlan* plan,
                       const std::vector<int>& folds, int height, int width,
                       int blur_size = 1);

struct CvTrialResult {
    int trial = 0;
    double test_accuracy = 0.0;
    std::string model_path;
};

struct CvResult {
    std::vector<CvTrialResult> trials;
    double mean_accuracy = 0.0; // over trials, in [0,1]
    double stddev_accuracy = 0.0; // sample stddev (n-1)
    FoldPlan plan;
};

// The 10-trial subject-independent cross-validation protocol: per trial t,
// test fold t, validation fold (t+1) mod 10, remaining 8 train (reduced to
// 4 when half_subjects). Per-trial seed is cfg.train.seed + trial. Writes
// trial models, per-trial history CSVs, foldplan.csv and summary.csv into
// out_dir.
CvResult run_cross_validation(const ExperimentConfig& cfg,
                              const DatasetIndex& index,
                              const std::string& out_dir, bool half_subjects);

struct BlurPoint {
    int filter_size = 1;
    double mean_accuracy = 0.0;
    double stddev_accuracy = 0.0;
};

// Evaluates one model per cv trial (or a single model) on its test fold
// with mean-filtered inputs, per filter size.
std::vector<BlurPoint> run_blur_sweep(const std::vector<std::string>& model_paths,
                                      const DatasetIndex& index,
                                      const FoldPlan* plan,
                                      const std::vector<int>& eval_folds,
                                      const std::vector<int>& sizes);

double sample_stddev(const std::vector<double>& values);

// Full-precision formatting used for every CSV artifact so identical runs
// produce identical bytes.
std::string format_full(double value);

} // namespace hpnn
