#include "longtail/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "longtail/config.hpp"
#include "longtail/errors.hpp"
#include "longtail/rng.hpp"
#include "longtail/synthgen.hpp"
#include "longtail/text.hpp"

namespace longtail {

std::string to_string(Arm arm) {
    switch (arm) {
        case Arm::baseline: return "baseline";
        case Arm::m2m_orig: return "m2m_orig";
        case Arm::m2m_f: return "m2m_f";
        case Arm::m2m_u: return "m2m_u";
    }
    throw ConfigError("unknown arm");
}

Arm arm_from_string(const std::string& s) {
    if (s == "baseline") return Arm::baseline;
    if (s == "m2m_orig") return Arm::m2m_orig;
    if (s == "m2m_f") return Arm::m2m_f;
    if (s == "m2m_u") return Arm::m2m_u;
    throw ConfigError("unknown arm '" + s + "' (expected baseline|m2m_orig|m2m_f|m2m_u)");
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0)) {
        throw ConfigError("split_fraction must be in (0,1)");
    }
    if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (cfg.arms.empty()) throw ConfigError("arms must be nonempty");
    std::set<Arm> seen;
    for (const Arm a : cfg.arms) {
        if (!seen.insert(a).second) {
            throw ConfigError("duplicate arm '" + to_string(a) + "'");
        }
    }
    const int sources = (cfg.csv_path.empty() ? 0 : 1) +
                        (cfg.scenario_path.empty() ? 0 : 1) +
                        (cfg.use_default_scenario ? 1 : 0);
    if (sources != 1) {
        throw ConfigError("exactly one dataset source required (csv, scenario file, or "
                          "default scenario)");
    }
    validate(cfg.oversample);
    validate(cfg.train);
}

ExperimentConfig load_experiment_config(const std::string& path) {
    KeyValueFile kv = KeyValueFile::parse_file(path);
    ExperimentConfig cfg;
    cfg.csv_path = kv.get_string("dataset", "");
    cfg.scenario_seed = kv.get_u64("scenario_seed", cfg.scenario_seed);
    std::string scenario = kv.get_string("scenario", "");
    if (scenario == "default") {
        cfg.use_default_scenario = true;
        // the built-in scenario ships its own oversampling setup; explicit
        // keys below still override field by field
        cfg.oversample = default_imbalanced_scenario(cfg.scenario_seed).oversample;
    } else {
        cfg.scenario_path = scenario;
    }
    cfg.split_fraction = kv.get_double("split_fraction", cfg.split_fraction);
    cfg.split_seed = kv.get_u64("split_seed", cfg.split_seed);
    cfg.model_seed = kv.get_u64("model_seed", cfg.model_seed);
    cfg.repetitions = kv.get_size("repetitions", cfg.repetitions);
    if (kv.has("arms")) {
        cfg.arms.clear();
        for (const std::string& cell : split(kv.get_string("arms", ""), ',')) {
            cfg.arms.push_back(arm_from_string(trim(cell)));
        }
    }
    cfg.oversample.minority_value = kv.get_size("m_v", cfg.oversample.minority_value);
    cfg.oversample.lambda = kv.get_double("lambda", cfg.oversample.lambda);
    cfg.oversample.distance_threshold = kv.get_double("d_t", cfg.oversample.distance_threshold);
    cfg.oversample.similarity_threshold = kv.get_double("sim_t", cfg.oversample.similarity_threshold);
    cfg.oversample.seed = kv.get_u64("seed", cfg.oversample.seed);
    cfg.oversample.aggregation =
        aggregation_from_string(kv.get_string("aggregation", to_string(cfg.oversample.aggregation)));
    cfg.oversample.shuffle = kv.get_bool("shuffle", cfg.oversample.shuffle);
    cfg.train.epochs = kv.get_size("epochs", cfg.train.epochs);
    cfg.train.batch_size = kv.get_size("batch_size", cfg.train.batch_size);
    cfg.train.learning_rate = kv.get_double("learning_rate", cfg.train.learning_rate);
    cfg.train.hidden_size = kv.get_size("hidden_size", cfg.train.hidden_size);
    cfg.train.dropout = kv.get_double("dropout", cfg.train.dropout);
    cfg.train.seed = kv.get_u64("train_seed", cfg.train.seed);
    cfg.train.shuffle_each_epoch =
        kv.get_bool("shuffle_each_epoch", cfg.train.shuffle_each_epoch);
    cfg.out_dir = kv.get_string("out_dir", cfg.out_dir);
    kv.reject_unknown_keys();
    validate(cfg);
    return cfg;
}

SplitResult stratified_split(const FeatureDataset& dataset, double fraction,
                             std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw ConfigError("split fraction must be in (0,1)");
    }
    const ClassPartition partition = partition_by_class(dataset);
    SeededRng rng(seed);

    SplitResult out;
    out.train.dim = out.test.dim = dataset.dim;
    out.train.classes = out.test.classes = dataset.classes;

    for (std::size_t c = 0; c < partition.num_classes(); ++c) {
        std::vector<std::size_t> indices = partition.by_class[c];
        rng.shuffle(indices);
        std::size_t take = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(indices.size())));
        if (indices.size() == 1) {
            take = 1;
            out.warnings.push_back("class '" + dataset.classes[c] +
                                   "' has a single sample; test set lacks it");
        } else if (indices.size() >= 2 && take == 0) {
            take = 1;
        }
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const std::size_t src = indices[i];
            if (i < take) {
                out.train_indices.push_back(src);
                out.train.samples.push_back(dataset.samples[src]);
            } else {
                out.test_indices.push_back(src);
                out.test.samples.push_back(dataset.samples[src]);
            }
        }
    }
    return out;
}

ArmTrainSet build_arm_trainset(const FeatureDataset& train,
                               const std::vector<std::size_t>& train_origin,
                               Arm arm, const OversampleConfig& oversample_cfg) {
    if (train_origin.size() != train.size()) {
        throw DataError("build_arm_trainset: origin index count mismatch");
    }
    ArmTrainSet out;
    switch (arm) {
        case Arm::baseline: {
            out.data = train;
            out.origin_indices = train_origin;
            break;
        }
        case Arm::m2m_orig: {
            const std::vector<std::size_t> draws =
                balanced_resample(train, oversample_cfg.seed);
            out.data.dim = train.dim;
            out.data.classes = train.classes;
            out.data.samples.reserve(draws.size());
            for (const std::size_t i : draws) {
                out.data.samples.push_back(train.samples[i]);
                out.origin_indices.push_back(train_origin[i]);
            }
            break;
        }
        case Arm::m2m_f:
        case Arm::m2m_u: {
            const SyntheticSet synth = arm == Arm::m2m_f
                                           ? oversample_m2mf(train, oversample_cfg)
                                           : oversample_m2mu(train, oversample_cfg);
            out.data = merge(train, synth);
            out.origin_indices = train_origin;
            for (const auto& [c, list] : synth.per_class) {
                for (const SyntheticSample& s : list) {
                    out.origin_indices.push_back(train_origin.at(s.source_index));
                }
            }
            for (const std::string& w : synth.warnings) {
                out.warnings.push_back(to_string(arm) + ": " + w);
            }
            if (synth.per_class.empty()) {
                out.warnings.push_back(
                    to_string(arm) + ": no class falls below minority_value " +
                    std::to_string(oversample_cfg.minority_value) +
                    "; training set left unchanged");
            }
            break;
        }
    }
    return out;
}

ExperimentReport run_experiment(const FeatureDataset& dataset,
                                const ExperimentConfig& cfg) {
    validate(cfg.oversample);
    validate(cfg.train);
    if (!(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0)) {
        throw ConfigError("split_fraction must be in (0,1)");
    }
    if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (cfg.arms.empty()) throw ConfigError("arms must be nonempty");

    ExperimentReport report;
    report.labels = dataset.classes;

    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        SplitResult split;
        try {
            split = stratified_split(dataset, cfg.split_fraction, cfg.split_seed + rep);
        } catch (const std::exception& e) {
            throw DataError("rep " + std::to_string(rep) + ": split: " + e.what());
        }
        for (const std::string& w : split.warnings) {
            report.warnings.push_back("rep " + std::to_string(rep) + ": " + w);
        }

        OversampleConfig os_cfg = cfg.oversample;
        os_cfg.seed = cfg.oversample.seed + rep;
        TrainConfig tr_cfg = cfg.train;
        tr_cfg.seed = cfg.train.seed + rep;
        const std::uint64_t model_seed = cfg.model_seed + rep;

        for (const Arm arm : cfg.arms) {
            const auto started = std::chrono::steady_clock::now();
            RunScore score;
            score.arm = arm;
            score.rep = rep;
            try {
                const ArmTrainSet arm_set =
                    build_arm_trainset(split.train, split.train_indices, arm, os_cfg);
                for (const std::string& w : arm_set.warnings) {
                    report.warnings.push_back("rep " + std::to_string(rep) + ": " + w);
                }
                const TrainResult trained = train(arm_set.data, model_seed, tr_cfg);

                std::vector<std::size_t> y_true, y_pred;
                y_true.reserve(split.test.size());
                y_pred.reserve(split.test.size());
                for (const Sample& s : split.test.samples) {
                    y_true.push_back(s.class_index);
                    y_pred.push_back(predict(trained.model, s.values));
                }
                score.cm = confusion_matrix(y_true, y_pred, dataset.num_classes());
                score.macro_f1 = macro_f1(score.cm);
                for (const ClassScores& cs : per_class_prf(score.cm)) {
                    score.per_class_f1.push_back(100.0 * cs.f1);
                }
            } catch (const std::exception& e) {
                throw DataError("arm " + to_string(arm) + ", rep " + std::to_string(rep) +
                                ": " + e.what());
            }
            score.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                    .count();
            report.runs.push_back(std::move(score));
        }
    }

    // Per-arm mean and sample stddev, then deltas against the baseline arm.
    double baseline_mean = 0.0;
    for (const Arm arm : cfg.arms) {
        std::vector<double> scores;
        for (const RunScore& r : report.runs) {
            if (r.arm == arm) scores.push_back(r.macro_f1);
        }
        ArmSummary summary;
        summary.arm = arm;
        double sum = 0.0;
        for (const double s : scores) sum += s;
        summary.mean_macro_f1 = sum / static_cast<double>(scores.size());
        if (scores.size() > 1) {
            double sq = 0.0;
            for (const double s : scores) {
                const double d = s - summary.mean_macro_f1;
                sq += d * d;
            }
            summary.stddev_macro_f1 = std::sqrt(sq / static_cast<double>(scores.size() - 1));
        }
        if (arm == Arm::baseline) {
            report.has_baseline = true;
            baseline_mean = summary.mean_macro_f1;
        }
        report.summaries.push_back(summary);
    }
    if (report.has_baseline) {
        for (ArmSummary& s : report.summaries) {
            s.delta_vs_baseline = s.mean_macro_f1 - baseline_mean;
        }
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    FeatureDataset dataset;
    if (!cfg.csv_path.empty()) {
        dataset = load_features_csv(cfg.csv_path);
    } else if (!cfg.scenario_path.empty()) {
        ClusterSpec spec = load_scenario_spec(cfg.scenario_path);
        dataset = gen_clusters(spec);
    } else {
        dataset = gen_clusters(default_imbalanced_scenario(cfg.scenario_seed).spec);
    }
    return run_experiment(dataset, cfg);
}

namespace {

std::string fixed2(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
}

} // namespace

void emit_report(const ExperimentReport& report, const std::string& dir) {
    // results.csv: one row per arm x repetition, full precision.
    std::string results = "arm,rep,macro_f1";
    for (const std::string& l : report.labels) results += ",f1_" + l;
    results += '\n';
    for (const RunScore& r : report.runs) {
        results += to_string(r.arm) + ',' + std::to_string(r.rep) + ',' +
                   format_double(r.macro_f1);
        for (const double f1 : r.per_class_f1) results += ',' + format_double(f1);
        results += '\n';
    }
    write_file_atomic(dir + "/results.csv", results);

    // summary.txt: arms as columns, mirroring the score-table layout.
    std::ostringstream summary;
    summary << std::left << std::setw(18) << "metric";
    for (const ArmSummary& s : report.summaries) {
        summary << std::right << std::setw(12) << to_string(s.arm);
    }
    summary << '\n';
    summary << std::left << std::setw(18) << "macro_f1_mean";
    for (const ArmSummary& s : report.summaries) {
        summary << std::right << std::setw(12) << fixed2(s.mean_macro_f1);
    }
    summary << '\n';
    summary << std::left << std::setw(18) << "macro_f1_stddev";
    for (const ArmSummary& s : report.summaries) {
        summary << std::right << std::setw(12) << fixed2(s.stddev_macro_f1);
    }
    summary << '\n';
    if (report.has_baseline) {
        summary << std::left << std::setw(18) << "delta_vs_baseline";
        for (const ArmSummary& s : report.summaries) {
            summary << std::right << std::setw(12) << fixed2(s.delta_vs_baseline);
        }
        summary << '\n';
    }
    if (!report.warnings.empty()) {
        summary << '\n';
        for (const std::string& w : report.warnings) summary << "warning: " << w << '\n';
    }
    write_file_atomic(dir + "/summary.txt", summary.str());

    for (const RunScore& r : report.runs) {
        std::string cm = "label";
        for (const std::string& l : report.labels) cm += ',' + l;
        cm += '\n';
        for (std::size_t t = 0; t < r.cm.k; ++t) {
            cm += report.labels[t];
            for (std::size_t p = 0; p < r.cm.k; ++p) {
                cm += ',' + std::to_string(r.cm.at(t, p));
            }
            cm += '\n';
        }
        write_file_atomic(dir + "/confusion_" + to_string(r.arm) + "_" +
                              std::to_string(r.rep) + ".csv",
                          cm);
    }
}

} // namespace longtail
