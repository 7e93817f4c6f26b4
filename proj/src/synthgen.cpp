#include "longtail/synthgen.hpp"

#include <cmath>

#include "longtail/config.hpp"
#include "longtail/errors.hpp"
#include "longtail/rng.hpp"
#include "longtail/text.hpp"

namespace longtail {

void validate(const ClusterSpec& spec) {
    if (spec.dim < 1) throw ConfigError("cluster spec: dim must be >= 1");
    if (spec.classes.empty()) throw ConfigError("cluster spec: need at least one class");
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const ClusterClass& cc = spec.classes[c];
        const std::string where = "cluster spec: class " + std::to_string(c);
        if (cc.count < 1) throw ConfigError(where + ": count must be >= 1");
        if (!(cc.sigma > 0.0)) throw ConfigError(where + ": sigma must be > 0");
        if (cc.mean.size() != spec.dim) {
            throw ConfigError(where + ": mean has length " +
                              std::to_string(cc.mean.size()) + ", expected " +
                              std::to_string(spec.dim));
        }
        for (const double v : cc.mean) {
            if (!std::isfinite(v)) throw ConfigError(where + ": non-finite mean entry");
        }
    }
}

FeatureDataset gen_clusters(const ClusterSpec& spec) {
    validate(spec);
    FeatureDataset ds;
    ds.dim = spec.dim;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        ds.classes.push_back("c" + std::to_string(c));
    }
    SeededRng rng(spec.seed);
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const ClusterClass& cc = spec.classes[c];
        for (std::size_t n = 0; n < cc.count; ++n) {
            Sample s;
            s.class_index = c;
            s.values.resize(spec.dim);
            for (std::size_t i = 0; i < spec.dim; ++i) {
                s.values[i] = cc.mean[i] + cc.sigma * rng.next_gaussian();
            }
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

Scenario default_imbalanced_scenario(std::uint64_t seed) {
    // Simplex construction: a shared positive offset plus 2*sqrt(2) on one axis
    // per class gives pairwise mean distance sqrt(8 + 8) = 4. The offset keeps
    // within-class cosine similarities high, like pooled activation features.
    const std::size_t dim = 32;
    const double offset = 4.0;
    const double spoke = 2.0 * std::sqrt(2.0);
    const std::size_t counts[3] = {1000, 100, 50};

    Scenario sc;
    sc.spec.dim = dim;
    sc.spec.seed = seed;
    for (std::size_t c = 0; c < 3; ++c) {
        ClusterClass cc;
        cc.count = counts[c];
        cc.sigma = 1.5;
        cc.mean.assign(dim, offset);
        cc.mean[c] += spoke;
        sc.spec.classes.push_back(std::move(cc));
    }
    sc.oversample.minority_value = 200;
    sc.oversample.lambda = 0.1;
    sc.oversample.distance_threshold = 0.5;
    sc.oversample.similarity_threshold = 0.8;
    sc.oversample.seed = seed;
    return sc;
}

ClusterSpec load_scenario_spec(const std::string& path) {
    KeyValueFile kv = KeyValueFile::parse_file(path);
    ClusterSpec spec;
    spec.dim = kv.get_size("dim", 0);
    spec.seed = kv.get_u64("seed", 0);
    const std::size_t num_classes = kv.get_size("classes", 0);
    if (num_classes == 0) {
        throw ConfigError(path + ": 'classes' must be a positive class count");
    }
    for (std::size_t c = 0; c < num_classes; ++c) {
        const std::string prefix = "class" + std::to_string(c) + ".";
        ClusterClass cc;
        cc.count = kv.get_size(prefix + "count", 0);
        cc.sigma = kv.get_double(prefix + "sigma", 0.0);
        const std::string mean_text = kv.get_string(prefix + "mean", "");
        if (mean_text.empty()) {
            throw ConfigError(path + ": missing " + prefix + "mean");
        }
        for (const std::string& cell : split(mean_text, ',')) {
            try {
                cc.mean.push_back(parse_double(trim(cell), path + ": " + prefix + "mean"));
            } catch (const DataError& e) {
                throw ConfigError(e.what());
            }
        }
        spec.classes.push_back(std::move(cc));
    }
    kv.reject_unknown_keys();
    validate(spec);
    return spec;
}

void save_scenario_spec(const ClusterSpec& spec, const std::string& path) {
    validate(spec);
    std::string out;
    out += "dim=" + std::to_string(spec.dim) + "\n";
    out += "seed=" + std::to_string(spec.seed) + "\n";
    out += "classes=" + std::to_string(spec.classes.size()) + "\n";
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const ClusterClass& cc = spec.classes[c];
        const std::string prefix = "class" + std::to_string(c) + ".";
        out += prefix + "count=" + std::to_string(cc.count) + "\n";
        out += prefix + "sigma=" + format_double(cc.sigma) + "\n";
        out += prefix + "mean=";
        for (std::size_t i = 0; i < cc.mean.size(); ++i) {
            if (i > 0) out += ',';
            out += format_double(cc.mean[i]);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace longtail
