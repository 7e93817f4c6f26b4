#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "longtail/classifier.hpp"
#include "longtail/feature_store.hpp"
#include "longtail/metrics.hpp"
#include "longtail/oversampling.hpp"

namespace longtail {

enum class Arm { baseline, m2m_orig, m2m_f, m2m_u };

std::string to_string(Arm arm);
Arm arm_from_string(const std::string& s);

struct ExperimentConfig {
    // Dataset source: exactly one of csv_path / scenario_path / default scenario.
    std::string csv_path;
    std::string scenario_path;
    bool use_default_scenario = false;
    std::uint64_t scenario_seed = 7;

    double split_fraction = 0.8;
    std::uint64_t split_seed = 11;
    std::uint64_t model_seed = 101;
    std::size_t repetitions = 5;
    std::vector<Arm> arms{Arm::baseline, Arm::m2m_orig, Arm::m2m_f, Arm::m2m_u};
    OversampleConfig oversample;
    TrainConfig train;
    std::string out_dir = "results";
};

void validate(const ExperimentConfig& cfg);

// Parses a key=value config file. Selecting the built-in scenario (key
// `scenario = default`) adopts that scenario's oversampling setup as the
// starting point; explicit keys still override field by field.
ExperimentConfig load_experiment_config(const std::string& path);

struct SplitResult {
    FeatureDataset train;
    FeatureDataset test;
    std::vector<std::size_t> train_indices; // into the source dataset
    std::vector<std::size_t> test_indices;
    std::vector<std::string> warnings;
};

// Stratified per-class split: floor(fraction * count) samples to train (at
// least 1 when count >= 2); a single-sample class goes to train with a
// warning. Class order within train/test follows the source dataset order of
// the per-class seeded shuffles.
SplitResult stratified_split(const FeatureDataset& dataset, double fraction,
                             std::uint64_t seed);

struct ArmTrainSet {
    FeatureDataset data;
    // For every row, the source dataset index it descends from (resampled rows
    // map through their draw; synthetic rows map to their source feature).
    std::vector<std::size_t> origin_indices;
    std::vector<std::string> warnings;
};

// Builds one arm's training set from a split's train half. train_origin maps
// train rows to source dataset indices.
ArmTrainSet build_arm_trainset(const FeatureDataset& train,
                               const std::vector<std::size_t>& train_origin,
                               Arm arm, const OversampleConfig& oversample_cfg);

struct RunScore {
    Arm arm = Arm::baseline;
    std::size_t rep = 0;
    double macro_f1 = 0.0;                // percent
    std::vector<double> per_class_f1;     // percent
    double wall_seconds = 0.0;
    ConfusionMatrix cm;
};

struct ArmSummary {
    Arm arm = Arm::baseline;
    double mean_macro_f1 = 0.0;
    double stddev_macro_f1 = 0.0; // sample stddev over repetitions
    double delta_vs_baseline = 0.0;
};

struct ExperimentReport {
    std::vector<std::string> labels;
    std::vector<RunScore> runs;           // arm-major within each repetition
    std::vector<ArmSummary> summaries;    // in cfg.arms order
    bool has_baseline = false;
    std::vector<std::string> warnings;
};

// Per repetition r: one stratified split (seed split_seed+r) shared by every
// arm, one model init seed (model_seed+r), one trainer seed (train.seed+r) and
// one oversampler seed (oversample.seed+r). Oversampling and resampling touch
// the train half only; all arms are scored on the same held-out test half.
ExperimentReport run_experiment(const FeatureDataset& dataset,
                                const ExperimentConfig& cfg);

// Resolves the dataset source (CSV, scenario file or built-in default).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Writes results.csv, summary.txt and confusion_<arm>_<rep>.csv into dir,
// write-temp-then-rename. All bytes are deterministic functions of the config.
void emit_report(const ExperimentReport& report, const std::string& dir);

} // namespace longtail
