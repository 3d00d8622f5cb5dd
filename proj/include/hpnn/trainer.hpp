// trainer.hpp -- mini-batch SGD with classical momentum, early stopping on
// validation accuracy, evaluation metrics, and the finite-difference
// gradient checker.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hpnn/network.hpp"

namespace hpnn {

struct LabeledSample {
    FeatureMap input;
    int label = 0;
};

using SampleSet = std::vector<LabeledSample>;

struct TrainConfig {
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 16;
    int max_epochs = 300;
    int patience = 30; // epochs without validation-accuracy improvement
    std::uint64_t seed = 0;
    // Network-wide default activation; consumed when a NetworkSpec is built
    // from an experiment config, not re-applied by train() itself.
    Activation activation = Activation::Tanh;
};

struct EpochRecord {
    int epoch = 0; // 1-based
    double train_loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;        // 1-based, earliest epoch with max val_acc
    double best_val_acc = 0.0;
};

// One momentum step per scalar parameter:
//   v <- momentum * v - lr * g;  theta <- theta + v
// All three sets must be shape-congruent.
void sgd_step(ParamSet& params, const GradientSet& grads, GradientSet& velocity,
              double learning_rate, double momentum);

// Trains a freshly initialized network. Shuffles the training order each
// epoch (Fisher-Yates, seeded), averages gradients over each mini-batch,
// stops at max_epochs or when patience runs out, and returns the snapshot
// with the best validation accuracy. Identical inputs produce bitwise
// identical results; the seed discipline is part of the contract: a
// SplitMix64 seeded with cfg.seed yields the init_params seed as its first
// draw and then drives the epoch shuffles.
std::pair<Network, TrainHistory> train(const NetworkSpec& spec,
                                       const SampleSet& train_set,
                                       const SampleSet& val_set,
                                       const TrainConfig& cfg);

struct EvalReport {
    double accuracy = 0.0;              // recognition rate in [0,1]
    std::vector<std::size_t> confusion; // C x C row-major, [true][predicted]
    std::vector<double> per_class_recall;
    std::size_t total = 0;
    std::vector<int> predictions;       // per-sample argmax, in set order
};

// Prediction is the argmax of the class probabilities; ties break toward
// the lowest class index.
EvalReport evaluate(const Network& net, const SampleSet& set);

// Writes `epoch,train_loss,train_acc,val_acc` rows at full precision.
void write_history_csv(const TrainHistory& history, std::ostream& out);

// Central finite differences over every parameter:
//   numeric = (E(theta + h) - E(theta - h)) / (2h)
//   error   = |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// Returns the maximum error. Guarded to networks of at most 50,000
// parameters (TooManyParameters).
double gradient_check(Network& net, const LabeledSample& sample, double h);

} // namespace hpnn
