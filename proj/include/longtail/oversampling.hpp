#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "longtail/feature_store.hpp"

namespace longtail {

enum class Aggregation { mean, max };

Aggregation aggregation_from_string(const std::string& s);
std::string to_string(Aggregation agg);

struct OversampleConfig {
    std::size_t minority_value = 1;    // M_v: classes with fewer samples are minorities
    double lambda = 0.1;               // translation strength toward the class centroid
    double distance_threshold = 0.5;   // d_t: minimum spacing between retained features
    double similarity_threshold = 0.8; // sim_t: minimum class-level cosine similarity
    std::uint64_t seed = 0;
    Aggregation aggregation = Aggregation::mean;
    bool shuffle = true;               // seeded shuffle of the majority pool
};

// Throws ConfigError unless lambda in [0,1], d_t >= 0, sim_t in [-1,1], M_v >= 1.
void validate(const OversampleConfig& cfg);

struct SyntheticSample {
    std::size_t source_index = 0; // majority sample the vector was translated from
    FeatureVector values;
};

// Generated feature vectors per minority class. Keys are exactly the classes
// detected as minorities, including classes that ended up with no retained
// vectors. |per_class[c]| <= M_v always.
struct SyntheticSet {
    std::size_t dim = 0;
    std::map<std::size_t, std::vector<SyntheticSample>> per_class;
    std::vector<std::string> warnings;

    std::size_t total() const;
};

// Classes with strictly fewer than minority_value samples, ascending.
std::vector<std::size_t> detect_minority(const ClassPartition& partition,
                                         std::size_t minority_value);

// Componentwise arithmetic mean. Throws DataError on an empty list.
FeatureVector compute_centroid(const std::vector<FeatureVector>& vectors);

// s_i = f_i + lambda * (ctr_i - f_i)
FeatureVector translate_feature(const FeatureVector& f, const FeatureVector& ctr,
                                double lambda);

// Euclidean distance to the nearest member; +infinity for an empty set, so the
// first candidate always passes the distance test.
double min_dist_to_set(const FeatureVector& s, const std::vector<FeatureVector>& set);

// dot(a,b) / (|a||b|), clamped to [-1,1]. Throws DataError on zero-norm input.
double cosine_similarity(const FeatureVector& a, const FeatureVector& b);

// Aggregated cosine similarity between s and a class's vectors (mean by
// default, max as the config switch). Zero-norm class vectors are skipped and
// counted in *skipped_zero_norm; all-zero classes are an error.
double class_similarity(const FeatureVector& s,
                        const std::vector<FeatureVector>& class_vectors,
                        Aggregation agg = Aggregation::mean,
                        std::size_t* skipped_zero_norm = nullptr);

// Iteration order over the majority pool: all sample indices outside the
// minority classes in dataset order, Fisher-Yates shuffled under cfg.seed when
// cfg.shuffle is set. Exposed so reference checks can replay the same order.
std::vector<std::size_t> majority_pool_order(const ClassPartition& partition,
                                             const std::vector<std::size_t>& minority,
                                             const OversampleConfig& cfg);

// Translate majority features toward each minority centroid; retain a
// candidate iff its distance to the features already retained for that class
// exceeds d_t; stop a class at M_v retained. Deterministic given (dataset, cfg).
SyntheticSet oversample_m2mf(const FeatureDataset& dataset, const OversampleConfig& cfg);

// Same pipeline with the retention test replaced: a candidate is kept iff its
// aggregated cosine similarity to the class's original vectors exceeds sim_t.
SyntheticSet oversample_m2mu(const FeatureDataset& dataset, const OversampleConfig& cfg);

// Index multiset drawn with replacement, each sample weighted by the inverse
// of its class count. draws == 0 means |dataset|. Deterministic given seed.
std::vector<std::size_t> balanced_resample(const FeatureDataset& dataset,
                                           std::uint64_t seed,
                                           std::size_t draws = 0);

// Feature CSV schema plus a trailing `source_index` column.
void save_synthetic_csv(const SyntheticSet& synth,
                        const std::vector<std::string>& classes,
                        const std::string& path);
SyntheticSet load_synthetic_csv(const std::string& path,
                                const std::vector<std::string>& classes);

} // namespace longtail
