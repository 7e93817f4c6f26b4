#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace longtail {

using FeatureVector = std::vector<double>;

struct Sample {
    std::size_t class_index = 0;
    FeatureVector values;
};

// Labeled collection of fixed-dimension feature vectors. Class indices refer
// into `classes`; every vector has length `dim`. Treated as immutable once
// built: all operations return new datasets.
struct FeatureDataset {
    std::size_t dim = 0;
    std::vector<std::string> classes;
    std::vector<Sample> samples;

    std::size_t num_classes() const { return classes.size(); }
    std::size_t size() const { return samples.size(); }
    std::vector<std::size_t> class_counts() const;
};

// Per-class sample index lists; exhaustive and disjoint over [0, size).
struct ClassPartition {
    std::vector<std::vector<std::size_t>> by_class;

    std::size_t num_classes() const { return by_class.size(); }
    std::size_t count(std::size_t c) const { return by_class[c].size(); }
};

struct SyntheticSet; // oversampling.hpp

// CSV schema: header `label,f0,...,f{d-1}`, one row per sample, `,` separator,
// `.` decimal point, labels unquoted (and so must not contain commas).
// Values are written in shortest round-trip form, so save/load is exact.
FeatureDataset load_features_csv(const std::string& path);
void save_features_csv(const FeatureDataset& dataset, const std::string& path);

ClassPartition partition_by_class(const FeatureDataset& dataset);

// New dataset with the original samples first and the synthetic vectors
// appended in ascending class order, generation order within a class.
FeatureDataset merge(const FeatureDataset& dataset, const SyntheticSet& synth);

} // namespace longtail
