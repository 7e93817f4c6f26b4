#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "longtail/feature_store.hpp"
#include "longtail/oversampling.hpp"

namespace longtail {

struct ClusterClass {
    std::size_t count = 0;
    FeatureVector mean;
    double sigma = 1.0; // isotropic standard deviation
};

struct ClusterSpec {
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<ClusterClass> classes;
};

// Throws ConfigError unless dim >= 1 and every class has count >= 1,
// sigma > 0 and a mean of length dim.
void validate(const ClusterSpec& spec);

// Per class c, count_c draws from N(mean_c, sigma_c^2 I) using the seeded
// Box-Muller stream (class order, then sample order, then component order).
// Labels are "c0".."c{K-1}" in spec order.
FeatureDataset gen_clusters(const ClusterSpec& spec);

struct Scenario {
    ClusterSpec spec;
    OversampleConfig oversample;
};

// Desk-scale imbalanced setup: 3 classes with counts 1000/100/50, dim 32,
// sigma 1.5, class means at pairwise distance 4 on a shared positive offset
// (feature-activation-like geometry, so cosine similarities are meaningful).
// Oversampling defaults: M_v=200, lambda=0.1, d_t=0.5, sim_t=0.8.
Scenario default_imbalanced_scenario(std::uint64_t seed);

// key=value text: dim, seed, classes, then class<i>.count / class<i>.sigma /
// class<i>.mean (comma-separated d values).
ClusterSpec load_scenario_spec(const std::string& path);
void save_scenario_spec(const ClusterSpec& spec, const std::string& path);

} // namespace longtail
