#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "longtail/feature_store.hpp"
#include "longtail/rng.hpp"

namespace longtail {

// Two-layer MLP head: linear, ReLU, dropout, linear. Weights are row-major:
// w1[i*hidden_size + j] connects input i to hidden j, w2[j*num_classes + k]
// connects hidden j to logit k.
struct MlpModel {
    std::size_t input_dim = 0;
    std::size_t hidden_size = 256;
    std::size_t num_classes = 0;
    double dropout_rate = 0.5;
    std::vector<double> w1, b1, w2, b2;
};

struct TrainConfig {
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
    bool shuffle_each_epoch = true;
    std::size_t hidden_size = 256;
    double dropout = 0.5;
};

// Throws ConfigError unless epochs >= 1, batch_size >= 1, learning_rate > 0,
// dropout in [0,1), hidden_size >= 1.
void validate(const TrainConfig& cfg);

struct Gradients {
    std::vector<double> w1, b1, w2, b2;
};

struct AdamState {
    Gradients m, v;
    std::uint64_t t = 0;
};

enum class Mode { train, eval };

// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases, seeded.
MlpModel init_model(std::size_t input_dim, std::size_t hidden_size,
                    std::size_t num_classes, double dropout_rate,
                    std::uint64_t seed);

AdamState init_adam(const MlpModel& model);

// logits = W2^T . drop(relu(W1^T x + b1)) + b2. Dropout is active only in
// train mode, with inverted scaling 1/(1-p); masks draw one uniform per hidden
// unit from rng (kept iff u >= p). Eval mode is deterministic and ignores rng.
std::vector<double> forward(const MlpModel& model, const FeatureVector& x,
                            Mode mode, SeededRng* rng = nullptr);

// -log softmax(logits)[label], max-subtracted for stability.
double cross_entropy(const std::vector<double>& logits, std::size_t label);

std::vector<double> softmax(const std::vector<double>& logits);

// Gradients of the mean cross-entropy over the batch. In train mode each
// sample's dropout mask is drawn once and reused on the backward path. If
// mean_loss is non-null it receives the batch loss.
Gradients backward(const MlpModel& model, const std::vector<Sample>& batch,
                   Mode mode, SeededRng* rng = nullptr,
                   double* mean_loss = nullptr);

// Bias-corrected Adam update, in place; increments state.t.
void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainResult {
    MlpModel model;
    std::vector<double> step_losses; // one mean batch loss per Adam step
};

// epochs x ceil(n/batch_size) Adam steps over seeded-shuffled mini-batches;
// the final incomplete batch is used. Deterministic given the two seeds.
TrainResult train(const FeatureDataset& dataset, std::uint64_t model_init_seed,
                  const TrainConfig& cfg);

// argmax of eval-mode logits, ties broken toward the lowest class index.
std::size_t predict(const MlpModel& model, const FeatureVector& x);

// Flat text checkpoint: shape header, class labels, then row-major parameter
// values at full round-trip precision.
void save_model(const MlpModel& model, const std::vector<std::string>& labels,
                const std::string& path);

struct LoadedModel {
    MlpModel model;
    std::vector<std::string> labels;
};

LoadedModel load_model(const std::string& path);

} // namespace longtail
