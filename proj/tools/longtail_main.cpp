#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "longtail/classifier.hpp"
#include "longtail/errors.hpp"
#include "longtail/experiment.hpp"
#include "longtail/feature_store.hpp"
#include "longtail/metrics.hpp"
#include "longtail/oversampling.hpp"
#include "longtail/synthgen.hpp"
#include "longtail/text.hpp"

using namespace longtail;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
}

void print_class_counts(const FeatureDataset& dataset) {
    const std::vector<std::size_t> counts = dataset.class_counts();
    for (std::size_t c = 0; c < dataset.num_classes(); ++c) {
        std::cout << "  " << dataset.classes[c] << ": " << counts[c] << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"longtail: feature-space oversampling workbench for long-tailed "
                 "classification"};
    app.require_subcommand(1);

    // ----- gen: scenario spec -> feature CSV -----
    auto* gen = app.add_subcommand("gen", "Sample a Gaussian-cluster scenario to a feature CSV");
    std::string gen_scenario;
    std::uint64_t gen_seed = 0;
    std::string gen_out, gen_spec_out;
    gen->add_option("--scenario", gen_scenario, "Scenario spec file, or 'default' for the built-in imbalanced setup")
        ->required();
    auto* gen_seed_opt = gen->add_option("--seed", gen_seed, "Override the scenario seed");
    gen->add_option("--out", gen_out, "Feature CSV to write")->required();
    gen->add_option("--spec-out", gen_spec_out, "Also write the resolved scenario spec here");
    gen->callback([&] {
        ClusterSpec spec;
        if (gen_scenario == "default") {
            spec = default_imbalanced_scenario(gen_seed_opt->count() ? gen_seed : 7).spec;
        } else {
            if (!std::filesystem::exists(gen_scenario)) {
                throw ConfigError("scenario file not found: " + gen_scenario);
            }
            spec = load_scenario_spec(gen_scenario);
            if (gen_seed_opt->count()) spec.seed = gen_seed;
        }
        const FeatureDataset dataset = gen_clusters(spec);
        save_features_csv(dataset, gen_out);
        if (!gen_spec_out.empty()) save_scenario_spec(spec, gen_spec_out);
        std::cout << "wrote " << dataset.size() << " samples (dim " << dataset.dim
                  << ", " << dataset.num_classes() << " classes) to " << gen_out << '\n';
        print_class_counts(dataset);
    });

    // ----- oversample: feature CSV -> synthetic CSV -----
    auto* os = app.add_subcommand("oversample", "Generate synthetic minority features from a CSV");
    std::string os_in, os_method, os_out, os_merged_out;
    OversampleConfig os_cfg;
    std::string os_agg = to_string(os_cfg.aggregation);
    os->add_option("--in", os_in, "Feature CSV")->required()->check(CLI::ExistingFile);
    os->add_option("--method", os_method, "m2m_f (distance-filtered) or m2m_u (similarity-filtered)")
        ->required()
        ->check(CLI::IsMember({"m2m_f", "m2m_u"}));
    os->add_option("--m-v", os_cfg.minority_value, "Minority threshold: classes below this count are topped up to it")
        ->required();
    os->add_option("--lambda", os_cfg.lambda, "Translation strength toward the class centroid");
    os->add_option("--d-t", os_cfg.distance_threshold, "Minimum spacing between retained features (m2m_f)");
    os->add_option("--sim-t", os_cfg.similarity_threshold, "Minimum class cosine similarity (m2m_u)");
    os->add_option("--seed", os_cfg.seed, "Majority-pool shuffle seed");
    os->add_option("--aggregation", os_agg, "Class-similarity aggregation (m2m_u)")
        ->check(CLI::IsMember({"mean", "max"}));
    os->add_flag("--shuffle,!--no-shuffle", os_cfg.shuffle, "Shuffle the majority pool");
    os->add_option("--out", os_out, "Synthetic-feature CSV to write")->required();
    os->add_option("--merged-out", os_merged_out, "Also write originals + synthetic as one CSV");
    os->callback([&] {
        os_cfg.aggregation = aggregation_from_string(os_agg);
        validate(os_cfg);
        const FeatureDataset dataset = load_features_csv(os_in);
        const SyntheticSet synth = os_method == "m2m_f" ? oversample_m2mf(dataset, os_cfg)
                                                        : oversample_m2mu(dataset, os_cfg);
        print_warnings(synth.warnings);
        save_synthetic_csv(synth, dataset.classes, os_out);
        if (!os_merged_out.empty()) save_features_csv(merge(dataset, synth), os_merged_out);
        for (const auto& [c, list] : synth.per_class) {
            std::cout << "  " << dataset.classes[c] << ": " << list.size()
                      << " synthetic vectors\n";
        }
        std::cout << "wrote " << synth.total() << " synthetic vectors to " << os_out << '\n';
    });

    // ----- train: feature CSV -> model checkpoint -----
    auto* tr = app.add_subcommand("train", "Train the two-layer classifier head on a feature CSV");
    std::string tr_in, tr_model_out;
    TrainConfig tr_cfg;
    std::uint64_t tr_model_seed = 101;
    tr->add_option("--in", tr_in, "Training feature CSV")->required()->check(CLI::ExistingFile);
    tr->add_option("--epochs", tr_cfg.epochs, "Training epochs");
    tr->add_option("--batch-size", tr_cfg.batch_size, "Mini-batch size");
    tr->add_option("--learning-rate", tr_cfg.learning_rate, "Adam learning rate");
    tr->add_option("--hidden-size", tr_cfg.hidden_size, "Hidden layer width");
    tr->add_option("--dropout", tr_cfg.dropout, "Dropout rate in [0,1)");
    tr->add_option("--train-seed", tr_cfg.seed, "Shuffle/dropout seed");
    tr->add_option("--model-seed", tr_model_seed, "Weight initialization seed");
    tr->add_flag("--shuffle-each-epoch,!--no-shuffle-each-epoch", tr_cfg.shuffle_each_epoch,
                 "Reshuffle samples every epoch");
    tr->add_option("--model-out", tr_model_out, "Checkpoint file to write")->required();
    tr->callback([&] {
        validate(tr_cfg);
        const FeatureDataset dataset = load_features_csv(tr_in);
        const TrainResult result = train(dataset, tr_model_seed, tr_cfg);
        save_model(result.model, dataset.classes, tr_model_out);
        std::cout << "trained on " << dataset.size() << " samples, "
                  << result.step_losses.size() << " steps, final batch loss "
                  << format_double(result.step_losses.back()) << '\n'
                  << "saved model to " << tr_model_out << '\n';
    });

    // ----- eval: model + feature CSV -> metrics report -----
    auto* ev = app.add_subcommand("eval", "Score a trained model against a labeled feature CSV");
    std::string ev_in, ev_model, ev_csv_out;
    bool ev_weighted = false;
    ev->add_option("--in", ev_in, "Evaluation feature CSV")->required()->check(CLI::ExistingFile);
    ev->add_option("--model", ev_model, "Model checkpoint")->required()->check(CLI::ExistingFile);
    ev->add_option("--report-out", ev_csv_out, "Also write the per-class table as CSV");
    ev->add_flag("--weighted", ev_weighted, "Include the support-weighted F1 row");
    ev->callback([&] {
        const LoadedModel loaded = load_model(ev_model);
        const FeatureDataset dataset = load_features_csv(ev_in);
        if (dataset.dim != loaded.model.input_dim) {
            throw DataError("eval: dataset dim " + std::to_string(dataset.dim) +
                            " does not match model input dim " +
                            std::to_string(loaded.model.input_dim));
        }
        // The eval CSV may cover a subset of the trained classes, so map its
        // label indices into the model's label space before tallying.
        std::vector<std::size_t> remap(dataset.num_classes());
        for (std::size_t c = 0; c < dataset.num_classes(); ++c) {
            const auto it = std::find(loaded.labels.begin(), loaded.labels.end(),
                                      dataset.classes[c]);
            if (it == loaded.labels.end()) {
                throw DataError("eval: class '" + dataset.classes[c] +
                                "' unknown to the model");
            }
            remap[c] = static_cast<std::size_t>(it - loaded.labels.begin());
        }
        std::vector<std::size_t> y_true, y_pred;
        y_true.reserve(dataset.size());
        y_pred.reserve(dataset.size());
        for (const Sample& s : dataset.samples) {
            y_true.push_back(remap[s.class_index]);
            y_pred.push_back(predict(loaded.model, s.values));
        }
        const ConfusionMatrix cm = confusion_matrix(y_true, y_pred, loaded.labels.size());
        const EvalReport report = make_report(cm);
        std::cout << format_report_text(report, loaded.labels, ev_weighted);
        if (!ev_csv_out.empty()) write_report_csv(report, loaded.labels, ev_csv_out);
    });

    // ----- experiment: full multi-arm pipeline -----
    auto* ex = app.add_subcommand(
        "experiment", "Run the split/oversample/train/eval pipeline across arms and repetitions");
    std::string ex_config, ex_dataset, ex_scenario, ex_arms, ex_agg, ex_out_dir;
    ExperimentConfig ex_cfg; // defaults; file and flags layer on top
    auto* ex_config_opt = ex->add_option("--config", ex_config, "key=value experiment config file")
                              ->check(CLI::ExistingFile);
    auto* ex_dataset_opt =
        ex->add_option("--dataset", ex_dataset, "Feature CSV source")->check(CLI::ExistingFile);
    auto* ex_scenario_opt = ex->add_option(
        "--scenario", ex_scenario, "Scenario spec source (a file, or 'default' for the built-in)");
    ex_scenario_opt->excludes(ex_dataset_opt);
    auto* ex_scenario_seed_opt =
        ex->add_option("--scenario-seed", ex_cfg.scenario_seed, "Seed for the built-in scenario");
    auto* ex_split_fraction_opt =
        ex->add_option("--split-fraction", ex_cfg.split_fraction, "Train fraction per class");
    auto* ex_split_seed_opt = ex->add_option("--split-seed", ex_cfg.split_seed, "Split seed base");
    auto* ex_model_seed_opt =
        ex->add_option("--model-seed", ex_cfg.model_seed, "Weight init seed base");
    auto* ex_reps_opt = ex->add_option("--repetitions", ex_cfg.repetitions, "Repetition count");
    auto* ex_arms_opt = ex->add_option(
        "--arms", ex_arms, "Comma list from baseline,m2m_orig,m2m_f,m2m_u");
    auto* ex_mv_opt = ex->add_option("--m-v", ex_cfg.oversample.minority_value,
                                     "Minority threshold / synthetic target count");
    auto* ex_lambda_opt =
        ex->add_option("--lambda", ex_cfg.oversample.lambda, "Translation strength");
    auto* ex_dt_opt = ex->add_option("--d-t", ex_cfg.oversample.distance_threshold,
                                     "Spacing threshold (m2m_f)");
    auto* ex_simt_opt = ex->add_option("--sim-t", ex_cfg.oversample.similarity_threshold,
                                       "Similarity threshold (m2m_u)");
    auto* ex_seed_opt = ex->add_option("--seed", ex_cfg.oversample.seed, "Oversampler seed base");
    auto* ex_agg_opt = ex->add_option("--aggregation", ex_agg, "Class-similarity aggregation")
                           ->check(CLI::IsMember({"mean", "max"}));
    auto* ex_shuffle_opt = ex->add_flag("--shuffle,!--no-shuffle", ex_cfg.oversample.shuffle,
                                        "Shuffle the majority pool");
    auto* ex_epochs_opt = ex->add_option("--epochs", ex_cfg.train.epochs, "Training epochs");
    auto* ex_batch_opt = ex->add_option("--batch-size", ex_cfg.train.batch_size, "Mini-batch size");
    auto* ex_lr_opt =
        ex->add_option("--learning-rate", ex_cfg.train.learning_rate, "Adam learning rate");
    auto* ex_hidden_opt =
        ex->add_option("--hidden-size", ex_cfg.train.hidden_size, "Hidden layer width");
    auto* ex_dropout_opt = ex->add_option("--dropout", ex_cfg.train.dropout, "Dropout rate");
    auto* ex_train_seed_opt =
        ex->add_option("--train-seed", ex_cfg.train.seed, "Shuffle/dropout seed base");
    auto* ex_out_dir_opt = ex->add_option(
        "--out-dir", ex_out_dir, "Report directory (also via LONGTAIL_OUT_DIR; flag wins)");
    ex->callback([&] {
        ExperimentConfig cfg;
        if (ex_config_opt->count()) cfg = load_experiment_config(ex_config);
        if (ex_dataset_opt->count()) {
            cfg.csv_path = ex_dataset;
            cfg.scenario_path.clear();
            cfg.use_default_scenario = false;
        }
        if (ex_scenario_opt->count()) {
            cfg.csv_path.clear();
            cfg.scenario_path.clear();
            cfg.use_default_scenario = false;
            if (ex_scenario == "default") {
                cfg.use_default_scenario = true;
                // the built-in scenario ships its own oversampling setup;
                // explicit flags below still override field by field
                cfg.oversample = default_imbalanced_scenario(cfg.scenario_seed).oversample;
            } else {
                if (!std::filesystem::exists(ex_scenario)) {
                    throw ConfigError("scenario file not found: " + ex_scenario);
                }
                cfg.scenario_path = ex_scenario;
            }
        }
        auto layer = [](const CLI::Option* opt, auto& dst, const auto& src) {
            if (opt->count()) dst = src;
        };
        layer(ex_scenario_seed_opt, cfg.scenario_seed, ex_cfg.scenario_seed);
        layer(ex_split_fraction_opt, cfg.split_fraction, ex_cfg.split_fraction);
        layer(ex_split_seed_opt, cfg.split_seed, ex_cfg.split_seed);
        layer(ex_model_seed_opt, cfg.model_seed, ex_cfg.model_seed);
        layer(ex_reps_opt, cfg.repetitions, ex_cfg.repetitions);
        if (ex_arms_opt->count()) {
            cfg.arms.clear();
            for (const std::string& cell : split(ex_arms, ',')) {
                cfg.arms.push_back(arm_from_string(trim(cell)));
            }
        }
        layer(ex_mv_opt, cfg.oversample.minority_value, ex_cfg.oversample.minority_value);
        layer(ex_lambda_opt, cfg.oversample.lambda, ex_cfg.oversample.lambda);
        layer(ex_dt_opt, cfg.oversample.distance_threshold, ex_cfg.oversample.distance_threshold);
        layer(ex_simt_opt, cfg.oversample.similarity_threshold,
              ex_cfg.oversample.similarity_threshold);
        layer(ex_seed_opt, cfg.oversample.seed, ex_cfg.oversample.seed);
        if (ex_agg_opt->count()) cfg.oversample.aggregation = aggregation_from_string(ex_agg);
        layer(ex_shuffle_opt, cfg.oversample.shuffle, ex_cfg.oversample.shuffle);
        layer(ex_epochs_opt, cfg.train.epochs, ex_cfg.train.epochs);
        layer(ex_batch_opt, cfg.train.batch_size, ex_cfg.train.batch_size);
        layer(ex_lr_opt, cfg.train.learning_rate, ex_cfg.train.learning_rate);
        layer(ex_hidden_opt, cfg.train.hidden_size, ex_cfg.train.hidden_size);
        layer(ex_dropout_opt, cfg.train.dropout, ex_cfg.train.dropout);
        layer(ex_train_seed_opt, cfg.train.seed, ex_cfg.train.seed);
        if (const char* env = std::getenv("LONGTAIL_OUT_DIR"); env && *env) cfg.out_dir = env;
        layer(ex_out_dir_opt, cfg.out_dir, ex_out_dir);
        validate(cfg);

        const auto started = std::chrono::steady_clock::now();
        const ExperimentReport report = run_experiment(cfg);
        emit_report(report, cfg.out_dir);
        print_warnings(report.warnings);
        std::cout << read_file(cfg.out_dir + "/summary.txt");
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::cout << "\nwall time: " << format_double(wall) << " s\n"
                  << "reports in " << cfg.out_dir << '\n';
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
