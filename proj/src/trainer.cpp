#include "hpnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "hpnn/error.hpp"
#include "hpnn/rng.hpp"

namespace hpnn {

namespace {

void check_labels(const SampleSet& set, int n_classes, const char* role) {
    if (set.empty()) {
        throw EmptyDataset(std::string(role) + " set is empty");
    }
    for (const LabeledSample& s : set) {
        if (s.label < 0 || s.label >= n_classes) {
            throw LabelOutOfRange("label " + std::to_string(s.label) +
                                  " in " + role + " set exceeds class count " +
                                  std::to_string(n_classes));
        }
    }
}

int argmax_lowest(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

void accumulate(GradientSet& into, const GradientSet& from) {
    auto dst = parameter_tensors(into);
    auto src = parameter_tensors(from);
    for (std::size_t t = 0; t < dst.size(); ++t) {
        for (std::size_t i = 0; i < dst[t]->size(); ++i) {
            (*dst[t])[i] += (*src[t])[i];
        }
    }
}

void scale(GradientSet& grads, double factor) {
    for (auto* tensor : parameter_tensors(grads)) {
        for (double& v : *tensor) v *= factor;
    }
}

} // namespace

void sgd_step(ParamSet& params, const GradientSet& grads, GradientSet& velocity,
              double learning_rate, double momentum) {
    auto p = parameter_tensors(params);
    auto g = parameter_tensors(grads);
    auto v = parameter_tensors(velocity);
    if (p.size() != g.size() || p.size() != v.size()) {
        throw ShapeMismatch("sgd_step: parameter structures disagree");
    }
    for (std::size_t t = 0; t < p.size(); ++t) {
        if (p[t]->size() != g[t]->size() || p[t]->size() != v[t]->size()) {
            throw ShapeMismatch("sgd_step: tensor sizes disagree");
        }
        for (std::size_t i = 0; i < p[t]->size(); ++i) {
            double& vel = (*v[t])[i];
            vel = momentum * vel - learning_rate * (*g[t])[i];
            (*p[t])[i] += vel;
        }
    }
}

std::pair<Network, TrainHistory> train(const NetworkSpec& spec,
                                       const SampleSet& train_set,
                                       const SampleSet& val_set,
                                       const TrainConfig& cfg) {
    check_labels(train_set, spec.n_classes, "training");
    check_labels(val_set, spec.n_classes, "validation");
    if (cfg.learning_rate <= 0.0 || cfg.momentum < 0.0 || cfg.momentum >= 1.0 ||
        cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1) {
        throw Error("invalid training configuration");
    }

    SplitMix64 rng(cfg.seed);
    Network net = init_params(spec, rng.next());
    GradientSet velocity = make_zero_gradients(spec);

    Network best = net;
    TrainHistory history;
    history.best_epoch = 0;
    history.best_val_acc = -1.0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t correct = 0;
        std::size_t cursor = 0;
        GradientSet batch_grads = make_zero_gradients(spec);
        while (cursor < order.size()) {
            const std::size_t batch_end =
                std::min(cursor + static_cast<std::size_t>(cfg.batch_size),
                         order.size());
            const std::size_t batch_n = batch_end - cursor;
            for (auto* tensor : parameter_tensors(batch_grads)) {
                std::fill(tensor->begin(), tensor->end(), 0.0);
            }
            for (; cursor < batch_end; ++cursor) {
                const LabeledSample& sample = train_set[order[cursor]];
                ForwardTrace trace = network_forward(net, sample.input);
                BackwardResult back = network_backward(net, trace, sample.label);
                loss_sum += back.loss;
                if (argmax_lowest(trace.probs) == sample.label) ++correct;
                accumulate(batch_grads, back.grads);
            }
            scale(batch_grads, 1.0 / static_cast<double>(batch_n));
            sgd_step(net.params, batch_grads, velocity, cfg.learning_rate,
                     cfg.momentum);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(train_set.size());
        record.train_acc =
            static_cast<double>(correct) / static_cast<double>(train_set.size());
        record.val_acc = evaluate(net, val_set).accuracy;
        history.epochs.push_back(record);

        if (record.val_acc > history.best_val_acc) {
            history.best_val_acc = record.val_acc;
            history.best_epoch = epoch;
            best = net;
        } else if (epoch - history.best_epoch >= cfg.patience) {
            break;
        }
    }

    return {std::move(best), std::move(history)};
}

EvalReport evaluate(const Network& net, const SampleSet& set) {
    if (set.empty()) {
        throw EmptyDataset("evaluate on empty set");
    }
    const int C = net.spec.n_classes;
    EvalReport report;
    report.confusion.assign(static_cast<std::size_t>(C) * C, 0);
    report.predictions.reserve(set.size());
    std::size_t correct = 0;
    for (const LabeledSample& sample : set) {
        if (sample.label < 0 || sample.label >= C) {
            throw LabelOutOfRange("label " + std::to_string(sample.label) +
                                  " exceeds class count " + std::to_string(C));
        }
        const ForwardTrace trace = network_forward(net, sample.input);
        const int pred = argmax_lowest(trace.probs);
        report.predictions.push_back(pred);
        report.confusion[static_cast<std::size_t>(sample.label) * C + pred]++;
        if (pred == sample.label) ++correct;
    }
    report.total = set.size();
    report.accuracy = static_cast<double>(correct) / static_cast<double>(set.size());
    report.per_class_recall.assign(C, 0.0);
    for (int c = 0; c < C; ++c) {
        std::size_t row_total = 0;
        for (int p = 0; p < C; ++p) {
            row_total += report.confusion[static_cast<std::size_t>(c) * C + p];
        }
        if (row_total > 0) {
            report.per_class_recall[c] =
                static_cast<double>(
                    report.confusion[static_cast<std::size_t>(c) * C + c]) /
                static_cast<double>(row_total);
        }
    }
    return report;
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
    out << "epoch,train_loss,train_acc,val_acc\n";
    char buf[160];
    for (const EpochRecord& r : history.epochs) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.epoch,
                      r.train_loss, r.train_acc, r.val_acc);
        out << buf;
    }
}

double gradient_check(Network& net, const LabeledSample& sample, double h) {
    if (h <= 0.0) {
        throw Error("gradient_check step must be positive");
    }
    if (parameter_count(net.params) > 50000) {
        throw TooManyParameters("gradient_check guard: network has " +
                                std::to_string(parameter_count(net.params)) +
                                " parameters (limit 50000)");
    }

    const ForwardTrace trace = network_forward(net, sample.input);
    const BackwardResult back = network_backward(net, trace, sample.label);

    auto params = parameter_tensors(net.params);
    auto grads = parameter_tensors(back.grads);

    double max_error = 0.0;
    for (std::size_t t = 0; t < params.size(); ++t) {
        for (std::size_t i = 0; i < params[t]->size(); ++i) {
            double& theta = (*params[t])[i];
            const double saved = theta;

            theta = saved + h;
            const double loss_plus =
                softmax_xent(network_forward(net, sample.input).logits,
                             sample.label)
                    .loss;
            theta = saved - h;
            const double loss_minus =
                softmax_xent(network_forward(net, sample.input).logits,
                             sample.label)
                    .loss;
            theta = saved;

            const double numeric = (loss_plus - loss_minus) / (2.0 * h);
            const double analytic = (*grads[t])[i];
            const double denom =
                std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
            max_error = std::max(max_error,
                                 std::fabs(analytic - numeric) / denom);
        }
    }
    return max_error;
}

} // namespace hpnn
