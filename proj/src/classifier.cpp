#include "longtail/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/text.hpp"

namespace longtail {

void validate(const TrainConfig& cfg) {
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (!(cfg.dropout >= 0.0 && cfg.dropout < 1.0)) {
        throw ConfigError("dropout must be in [0,1)");
    }
    if (cfg.hidden_size < 1) throw ConfigError("hidden_size must be >= 1");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
        throw ConfigError("adam betas must be in [0,1)");
    }
    if (!(cfg.epsilon > 0.0)) throw ConfigError("adam epsilon must be > 0");
}

MlpModel init_model(std::size_t input_dim, std::size_t hidden_size,
                    std::size_t num_classes, double dropout_rate,
                    std::uint64_t seed) {
    if (input_dim < 1 || hidden_size < 1 || num_classes < 1) {
        throw ConfigError("model dimensions must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
        throw ConfigError("dropout must be in [0,1)");
    }
    MlpModel m;
    m.input_dim = input_dim;
    m.hidden_size = hidden_size;
    m.num_classes = num_classes;
    m.dropout_rate = dropout_rate;
    m.w1.resize(input_dim * hidden_size);
    m.b1.assign(hidden_size, 0.0);
    m.w2.resize(hidden_size * num_classes);
    m.b2.assign(num_classes, 0.0);

    SeededRng rng(seed);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(input_dim + hidden_size));
    for (double& w : m.w1) w = (2.0 * rng.next_double() - 1.0) * limit1;
    const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden_size + num_classes));
    for (double& w : m.w2) w = (2.0 * rng.next_double() - 1.0) * limit2;
    return m;
}

AdamState init_adam(const MlpModel& model) {
    AdamState s;
    s.m.w1.assign(model.w1.size(), 0.0);
    s.m.b1.assign(model.b1.size(), 0.0);
    s.m.w2.assign(model.w2.size(), 0.0);
    s.m.b2.assign(model.b2.size(), 0.0);
    s.v = s.m;
    s.t = 0;
    return s;
}

namespace {

struct ForwardPass {
    std::vector<double> pre_hidden;  // W1^T x + b1
    std::vector<double> dropped;     // relu then mask/(1-p)
    std::vector<double> mask_scale;  // 0 or 1/(1-p) per hidden unit
    std::vector<double> logits;
};

ForwardPass run_forward(const MlpModel& model, const FeatureVector& x, Mode mode,
                        SeededRng* rng) {
    if (x.size() != model.input_dim) {
        throw DataError("forward: input length " + std::to_string(x.size()) +
                        " != model input_dim " + std::to_string(model.input_dim));
    }
    const std::size_t h = model.hidden_size;
    const std::size_t k = model.num_classes;
    const double p = model.dropout_rate;
    const bool use_dropout = mode == Mode::train && p > 0.0;
    if (use_dropout && rng == nullptr) {
        throw std::invalid_argument("forward: train mode with dropout needs an rng");
    }

    ForwardPass pass;
    pass.pre_hidden.assign(h, 0.0);
    for (std::size_t i = 0; i < model.input_dim; ++i) {
        const double xi = x[i];
        const double* row = &model.w1[i * h];
        for (std::size_t j = 0; j < h; ++j) pass.pre_hidden[j] += row[j] * xi;
    }
    for (std::size_t j = 0; j < h; ++j) pass.pre_hidden[j] += model.b1[j];

    pass.mask_scale.assign(h, 1.0);
    if (use_dropout) {
        const double keep_scale = 1.0 / (1.0 - p);
        for (std::size_t j = 0; j < h; ++j) {
            pass.mask_scale[j] = rng->next_double() >= p ? keep_scale : 0.0;
        }
    }
    pass.dropped.assign(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        const double r = pass.pre_hidden[j] > 0.0 ? pass.pre_hidden[j] : 0.0;
        pass.dropped[j] = r * pass.mask_scale[j];
    }

    pass.logits.assign(k, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        const double dj = pass.dropped[j];
        if (dj == 0.0) continue;
        const double* row = &model.w2[j * k];
        for (std::size_t c = 0; c < k; ++c) pass.logits[c] += row[c] * dj;
    }
    for (std::size_t c = 0; c < k; ++c) pass.logits[c] += model.b2[c];
    return pass;
}

} // namespace

std::vector<double> forward(const MlpModel& model, const FeatureVector& x, Mode mode,
                            SeededRng* rng) {
    return run_forward(model, x, mode, rng).logits;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double max_logit = logits.front();
    for (const double z : logits) max_logit = std::max(max_logit, z);
    std::vector<double> out(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max_logit);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double cross_entropy(const std::vector<double>& logits, std::size_t label) {
    if (label >= logits.size()) {
        throw DataError("cross_entropy: label " + std::to_string(label) +
                        " out of range for " + std::to_string(logits.size()) +
                        " classes");
    }
    double max_logit = logits.front();
    for (const double z : logits) max_logit = std::max(max_logit, z);
    double sum = 0.0;
    for (const double z : logits) sum += std::exp(z - max_logit);
    return std::log(sum) - (logits[label] - max_logit);
}

Gradients backward(const MlpModel& model, const std::vector<Sample>& batch, Mode mode,
                   SeededRng* rng, double* mean_loss) {
    if (batch.empty()) throw DataError("backward: empty batch");
    const std::size_t h = model.hidden_size;
    const std::size_t k = model.num_classes;

    Gradients g;
    g.w1.assign(model.w1.size(), 0.0);
    g.b1.assign(h, 0.0);
    g.w2.assign(model.w2.size(), 0.0);
    g.b2.assign(k, 0.0);

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    double loss_sum = 0.0;
    for (const Sample& sample : batch) {
        const ForwardPass pass = run_forward(model, sample.values, mode, rng);
        loss_sum += cross_entropy(pass.logits, sample.class_index);

        // d loss / d logits = softmax - onehot
        std::vector<double> dlogits = softmax(pass.logits);
        if (sample.class_index >= k) {
            throw DataError("backward: label out of range");
        }
        dlogits[sample.class_index] -= 1.0;

        for (std::size_t c = 0; c < k; ++c) g.b2[c] += dlogits[c];
        std::vector<double> dhidden(h, 0.0);
        for (std::size_t j = 0; j < h; ++j) {
            const double dj = pass.dropped[j];
            const double* row = &model.w2[j * k];
            double acc = 0.0;
            for (std::size_t c = 0; c < k; ++c) {
                g.w2[j * k + c] += dj * dlogits[c];
                acc += row[c] * dlogits[c];
            }
            // back through the stored dropout mask, then relu
            dhidden[j] = pass.pre_hidden[j] > 0.0 ? acc * pass.mask_scale[j] : 0.0;
        }
        for (std::size_t j = 0; j < h; ++j) g.b1[j] += dhidden[j];
        for (std::size_t i = 0; i < model.input_dim; ++i) {
            const double xi = sample.values[i];
            if (xi == 0.0) continue;
            double* row = &g.w1[i * h];
            for (std::size_t j = 0; j < h; ++j) row[j] += xi * dhidden[j];
        }
    }
    for (double& v : g.w1) v *= inv_batch;
    for (double& v : g.b1) v *= inv_batch;
    for (double& v : g.w2) v *= inv_batch;
    for (double& v : g.b2) v *= inv_batch;
    if (mean_loss != nullptr) *mean_loss = loss_sum * inv_batch;
    return g;
}

namespace {

void adam_update(std::vector<double>& param, const std::vector<double>& grad,
                 std::vector<double>& m, std::vector<double>& v,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = m[i] / bias1;
        const double v_hat = v[i] / bias2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

} // namespace

void adam_step(MlpModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& cfg) {
    if (grads.w1.size() != model.w1.size() || grads.w2.size() != model.w2.size() ||
        grads.b1.size() != model.b1.size() || grads.b2.size() != model.b2.size()) {
        throw DataError("adam_step: gradient shape mismatch");
    }
    state.t += 1;
    const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    adam_update(model.w1, grads.w1, state.m.w1, state.v.w1, cfg.learning_rate,
                cfg.beta1, cfg.beta2, cfg.epsilon, bias1, bias2);
    adam_update(model.b1, grads.b1, state.m.b1, state.v.b1, cfg.learning_rate,
                cfg.beta1, cfg.beta2, cfg.epsilon, bias1, bias2);
    adam_update(model.w2, grads.w2, state.m.w2, state.v.w2, cfg.learning_rate,
                cfg.beta1, cfg.beta2, cfg.epsilon, bias1, bias2);
    adam_update(model.b2, grads.b2, state.m.b2, state.v.b2, cfg.learning_rate,
                cfg.beta1, cfg.beta2, cfg.epsilon, bias1, bias2);
}

TrainResult train(const FeatureDataset& dataset, std::uint64_t model_init_seed,
                  const TrainConfig& cfg) {
    validate(cfg);
    if (dataset.samples.empty()) throw DataError("train: empty dataset");
    if (dataset.num_classes() < 2) throw DataError("train: need at least 2 classes");

    TrainResult result;
    result.model = init_model(dataset.dim, cfg.hidden_size, dataset.num_classes(),
                              cfg.dropout, model_init_seed);
    AdamState adam = init_adam(result.model);
    SeededRng rng(cfg.seed); // epoch shuffles and dropout masks share the stream

    const std::size_t n = dataset.samples.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<Sample> batch;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle_each_epoch) rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            batch.clear();
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(dataset.samples[order[i]]);
            }
            double loss = 0.0;
            const Gradients grads = backward(result.model, batch, Mode::train, &rng, &loss);
            adam_step(result.model, grads, adam, cfg);
            result.step_losses.push_back(loss);
        }
    }
    return result;
}

std::size_t predict(const MlpModel& model, const FeatureVector& x) {
    const std::vector<double> logits = forward(model, x, Mode::eval);
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c) {
        if (logits[c] > logits[best]) best = c;
    }
    return best;
}

void save_model(const MlpModel& model, const std::vector<std::string>& labels,
                const std::string& path) {
    if (labels.size() != model.num_classes) {
        throw DataError("save_model: " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(model.num_classes) + " classes");
    }
    std::string out = "longtail-mlp 1\n";
    out += "shape " + std::to_string(model.input_dim) + " " +
           std::to_string(model.hidden_size) + " " + std::to_string(model.num_classes) +
           "\n";
    out += "dropout " + format_double(model.dropout_rate) + "\n";
    out += "labels";
    for (const std::string& l : labels) {
        if (l.find(',') != std::string::npos || l.find(' ') != std::string::npos) {
            throw DataError("save_model: label cannot contain spaces or commas: '" + l +
                            "'");
        }
        out += ' ' + l;
    }
    out += '\n';
    const auto dump = [&out](const char* name, const std::vector<double>& values) {
        out += name;
        for (const double v : values) {
            out += ' ';
            out += format_double(v);
        }
        out += '\n';
    };
    dump("w1", model.w1);
    dump("b1", model.b1);
    dump("w2", model.w2);
    dump("b2", model.b2);
    write_file_atomic(path, out);
}

namespace {

std::vector<std::string> tokens_for(std::istream& in, const std::string& path,
                                    const char* expected) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": truncated checkpoint, expected '" +
                        std::string(expected) + "' line");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> toks;
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty() || toks[0] != expected) {
        throw DataError(path + ": expected '" + std::string(expected) + "' line");
    }
    return toks;
}

std::vector<double> parse_values(const std::vector<std::string>& toks, std::size_t n,
                                 const std::string& path) {
    if (toks.size() != n + 1) {
        throw DataError(path + ": '" + toks[0] + "' expects " + std::to_string(n) +
                        " values, got " + std::to_string(toks.size() - 1));
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = parse_double(toks[i + 1], path + ": " + toks[0]);
    }
    return out;
}

} // namespace

LoadedModel load_model(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty checkpoint");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "longtail-mlp 1") {
        throw DataError(path + ": unrecognized checkpoint header '" + line + "'");
    }
    const auto shape = tokens_for(in, path, "shape");
    if (shape.size() != 4) throw DataError(path + ": shape expects 3 integers");
    LoadedModel lm;
    MlpModel& m = lm.model;
    m.input_dim = static_cast<std::size_t>(std::stoull(shape[1]));
    m.hidden_size = static_cast<std::size_t>(std::stoull(shape[2]));
    m.num_classes = static_cast<std::size_t>(std::stoull(shape[3]));
    if (m.input_dim < 1 || m.hidden_size < 1 || m.num_classes < 1) {
        throw DataError(path + ": shape entries must be positive");
    }
    const auto dropout = tokens_for(in, path, "dropout");
    m.dropout_rate = parse_values(dropout, 1, path)[0];
    const auto labels = tokens_for(in, path, "labels");
    if (labels.size() != m.num_classes + 1) {
        throw DataError(path + ": expected " + std::to_string(m.num_classes) +
                        " labels, got " + std::to_string(labels.size() - 1));
    }
    lm.labels.assign(labels.begin() + 1, labels.end());
    m.w1 = parse_values(tokens_for(in, path, "w1"), m.input_dim * m.hidden_size, path);
    m.b1 = parse_values(tokens_for(in, path, "b1"), m.hidden_size, path);
    m.w2 = parse_values(tokens_for(in, path, "w2"), m.hidden_size * m.num_classes, path);
    m.b2 = parse_values(tokens_for(in, path, "b2"), m.num_classes, path);
    return lm;
}

} // namespace longtail
