#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "longtail/errors.hpp"
#include "longtail/feature_store.hpp"
#include "longtail/metrics.hpp"
#include "longtail/oversampling.hpp"
#include "longtail/synthgen.hpp"
#include "longtail/text.hpp"
#include "oracles.hpp"

using namespace longtail;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "lt_synthgen";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

ClusterSpec two_blob_spec(std::size_t n_per_class, double sigma, std::uint64_t seed) {
    ClusterSpec spec;
    spec.dim = 3;
    spec.seed = seed;
    ClusterClass a;
    a.count = n_per_class;
    a.sigma = sigma;
    a.mean = {1.0, -2.0, 0.5};
    ClusterClass b = a;
    b.mean = {-1.0, 2.0, -0.5};
    spec.classes = {a, b};
    return spec;
}

} // namespace

TEST_CASE("cluster spec validation rejects bad fields") {
    ClusterSpec spec = two_blob_spec(10, 1.0, 1);
    CHECK_NOTHROW(validate(spec));

    spec.dim = 0;
    CHECK_THROWS_AS(validate(spec), ConfigError);

    spec = two_blob_spec(10, 1.0, 1);
    spec.classes.clear();
    CHECK_THROWS_AS(validate(spec), ConfigError);

    spec = two_blob_spec(10, 1.0, 1);
    spec.classes[0].count = 0;
    CHECK_THROWS_AS(validate(spec), ConfigError);

    spec = two_blob_spec(10, 1.0, 1);
    spec.classes[1].sigma = 0.0;
    CHECK_THROWS_AS(validate(spec), ConfigError);

    spec = two_blob_spec(10, 1.0, 1);
    spec.classes[0].mean.pop_back();
    CHECK_THROWS_AS(validate(spec), ConfigError);

    spec = two_blob_spec(10, 1.0, 1);
    spec.classes[0].mean[0] = std::nan("");
    CHECK_THROWS_AS(validate(spec), ConfigError);
}

TEST_CASE("near-zero sigma collapses samples onto the class mean") {
    ClusterSpec spec = two_blob_spec(20, 1e-12, 5);
    const FeatureDataset ds = gen_clusters(spec);
    REQUIRE(ds.size() == 40);
    for (const Sample& s : ds.samples) {
        const FeatureVector& mean = spec.classes[s.class_index].mean;
        for (std::size_t d = 0; d < spec.dim; ++d) {
            CHECK(std::fabs(s.values[d] - mean[d]) < 1e-9);
        }
    }
}

TEST_CASE("generated counts, labels, and order match the spec") {
    ClusterSpec spec;
    spec.dim = 2;
    spec.seed = 3;
    for (const std::size_t n : {1000UL, 100UL, 50UL}) {
        ClusterClass c;
        c.count = n;
        c.sigma = 1.0;
        c.mean = {0.0, 0.0};
        spec.classes.push_back(c);
    }
    const FeatureDataset ds = gen_clusters(spec);
    CHECK(ds.size() == 1150);
    CHECK(ds.classes == std::vector<std::string>{"c0", "c1", "c2"});
    CHECK(ds.class_counts() == std::vector<std::size_t>{1000, 100, 50});
    // class blocks are contiguous in spec order
    CHECK(ds.samples.front().class_index == 0);
    CHECK(ds.samples[999].class_index == 0);
    CHECK(ds.samples[1000].class_index == 1);
    CHECK(ds.samples.back().class_index == 2);
}

TEST_CASE("sample mean concentrates on the spec mean") {
    ClusterSpec spec;
    spec.dim = 4;
    spec.seed = 17;
    ClusterClass c;
    c.count = 10000;
    c.sigma = 2.0;
    c.mean = {3.0, -1.0, 0.0, 10.0};
    spec.classes = {c};
    const FeatureDataset ds = gen_clusters(spec);
    const double tol = 4.0 * c.sigma / std::sqrt(double(c.count)); // 4 sigma of the mean
    for (std::size_t d = 0; d < spec.dim; ++d) {
        double sum = 0.0;
        for (const Sample& s : ds.samples) sum += s.values[d];
        CHECK(std::fabs(sum / double(c.count) - c.mean[d]) < tol);
    }
}

TEST_CASE("sample scatter matches the isotropic variance") {
    ClusterSpec spec;
    spec.dim = 5;
    spec.seed = 23;
    ClusterClass c;
    c.count = 5000;
    c.sigma = 1.5;
    c.mean = {0.0, 0.0, 0.0, 0.0, 0.0};
    spec.classes = {c};
    const FeatureDataset ds = gen_clusters(spec);
    // trace of the sample covariance should be close to dim * sigma^2
    FeatureVector mean(spec.dim, 0.0);
    for (const Sample& s : ds.samples) {
        for (std::size_t d = 0; d < spec.dim; ++d) mean[d] += s.values[d];
    }
    for (double& v : mean) v /= double(c.count);
    double trace = 0.0;
    for (const Sample& s : ds.samples) {
        for (std::size_t d = 0; d < spec.dim; ++d) {
            const double diff = s.values[d] - mean[d];
            trace += diff * diff;
        }
    }
    trace /= double(c.count - 1);
    const double want = double(spec.dim) * c.sigma * c.sigma;
    CHECK(std::fabs(trace - want) / want < 0.10);
}

TEST_CASE("generation is deterministic per seed and differs across seeds") {
    const FeatureDataset a = gen_clusters(two_blob_spec(50, 1.0, 99));
    const FeatureDataset b = gen_clusters(two_blob_spec(50, 1.0, 99));
    const FeatureDataset c = gen_clusters(two_blob_spec(50, 1.0, 100));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].values == b.samples[i].values);
    }
    bool any_differ = false;
    for (std::size_t i = 0; i < a.size() && !any_differ; ++i) {
        any_differ = a.samples[i].values != c.samples[i].values;
    }
    CHECK(any_differ);
}

TEST_CASE("default scenario is imbalanced the way the pipeline expects") {
    const Scenario sc = default_imbalanced_scenario(7);
    CHECK(sc.spec.dim == 32);
    REQUIRE(sc.spec.classes.size() == 3);
    CHECK(sc.spec.classes[0].count == 1000);
    CHECK(sc.spec.classes[1].count == 100);
    CHECK(sc.spec.classes[2].count == 50);
    CHECK(sc.oversample.minority_value == 200);
    CHECK(sc.oversample.lambda == 0.1);
    CHECK(sc.oversample.distance_threshold == 0.5);
    CHECK(sc.oversample.similarity_threshold == 0.8);

    // pairwise mean distance 4 keeps overlap (and headroom) in play
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) {
            double sq = 0.0;
            for (std::size_t d = 0; d < sc.spec.dim; ++d) {
                const double diff =
                    sc.spec.classes[i].mean[d] - sc.spec.classes[j].mean[d];
                sq += diff * diff;
            }
            CHECK(std::sqrt(sq) == doctest::Approx(4.0).epsilon(1e-9));
        }
    }

    const FeatureDataset ds = gen_clusters(sc.spec);
    CHECK(detect_minority(partition_by_class(ds), sc.oversample.minority_value) ==
          std::vector<std::size_t>{1, 2});

    // a nearest-centroid rule should be decent but imperfect on this geometry
    std::vector<FeatureVector> centroids;
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<FeatureVector> vecs;
        for (const Sample& s : ds.samples) {
            if (s.class_index == c) vecs.push_back(s.values);
        }
        centroids.push_back(compute_centroid(vecs));
    }
    std::vector<std::size_t> y_true, y_pred;
    for (const Sample& s : ds.samples) {
        std::size_t best = 0;
        double best_d = oracle::ref_euclidean(s.values, centroids[0]);
        for (std::size_t c = 1; c < 3; ++c) {
            const double d = oracle::ref_euclidean(s.values, centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        y_true.push_back(s.class_index);
        y_pred.push_back(best);
    }
    const double f1 = macro_f1(confusion_matrix(y_true, y_pred, 3));
    CHECK(f1 > 50.0);
    CHECK(f1 < 95.0);
}

TEST_CASE("default scenario is reproducible for a fixed seed") {
    const Scenario a = default_imbalanced_scenario(42);
    const Scenario b = default_imbalanced_scenario(42);
    const FeatureDataset da = gen_clusters(a.spec);
    const FeatureDataset db = gen_clusters(b.spec);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
        CHECK(da.samples[i].values == db.samples[i].values);
    }
}

TEST_CASE("scenario spec file round-trips exactly") {
    ClusterSpec spec = two_blob_spec(25, 0.75, 1234);
    spec.classes[0].mean = {0.1, 1.0 / 3.0, -2.5e-8};
    const std::string path = temp_path("spec.txt");
    save_scenario_spec(spec, path);
    const ClusterSpec back = load_scenario_spec(path);
    CHECK(back.dim == spec.dim);
    CHECK(back.seed == spec.seed);
    REQUIRE(back.classes.size() == spec.classes.size());
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        CHECK(back.classes[c].count == spec.classes[c].count);
        CHECK(back.classes[c].sigma == spec.classes[c].sigma);
        CHECK(back.classes[c].mean == spec.classes[c].mean);
    }
}

TEST_CASE("scenario spec loader rejects malformed files") {
    const std::string missing_mean = temp_path("missing_mean.txt");
    write_file_atomic(missing_mean,
                      "dim = 2\nseed = 1\nclasses = 1\nclass0.count = 5\n"
                      "class0.sigma = 1.0\n");
    CHECK_THROWS_AS(load_scenario_spec(missing_mean), ConfigError);

    const std::string unknown_key = temp_path("unknown_key.txt");
    write_file_atomic(unknown_key,
                      "dim = 2\nseed = 1\nclasses = 1\nclass0.count = 5\n"
                      "class0.sigma = 1.0\nclass0.mean = 0,0\nwhat = 3\n");
    CHECK_THROWS_AS(load_scenario_spec(unknown_key), ConfigError);

    const std::string zero_classes = temp_path("zero_classes.txt");
    write_file_atomic(zero_classes, "dim = 2\nseed = 1\nclasses = 0\n");
    CHECK_THROWS_AS(load_scenario_spec(zero_classes), ConfigError);

    const std::string bad_mean = temp_path("bad_mean.txt");
    write_file_atomic(bad_mean,
                      "dim = 2\nseed = 1\nclasses = 1\nclass0.count = 5\n"
                      "class0.sigma = 1.0\nclass0.mean = 0,zebra\n");
    CHECK_THROWS_AS(load_scenario_spec(bad_mean), ConfigError);

    CHECK_THROWS_AS(load_scenario_spec(temp_path("does_not_exist.txt")), IoError);
}
