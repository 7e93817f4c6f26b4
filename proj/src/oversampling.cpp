#include "longtail/oversampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/rng.hpp"
#include "longtail/text.hpp"

namespace longtail {

Aggregation aggregation_from_string(const std::string& s) {
    if (s == "mean") return Aggregation::mean;
    if (s == "max") return Aggregation::max;
    throw ConfigError("aggregation must be mean|max, got '" + s + "'");
}

std::string to_string(Aggregation agg) {
    return agg == Aggregation::mean ? "mean" : "max";
}

void validate(const OversampleConfig& cfg) {
    if (cfg.minority_value < 1) {
        throw ConfigError("m_v must be >= 1");
    }
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
        throw ConfigError("lambda must be in [0,1], got " + format_double(cfg.lambda));
    }
    if (!(cfg.distance_threshold >= 0.0)) {
        throw ConfigError("d_t must be >= 0, got " + format_double(cfg.distance_threshold));
    }
    if (!(cfg.similarity_threshold >= -1.0 && cfg.similarity_threshold <= 1.0)) {
        throw ConfigError("sim_t must be in [-1,1], got " +
                          format_double(cfg.similarity_threshold));
    }
}

std::size_t SyntheticSet::total() const {
    std::size_t n = 0;
    for (const auto& [c, list] : per_class) n += list.size();
    return n;
}

std::vector<std::size_t> detect_minority(const ClassPartition& partition,
                                         std::size_t minority_value) {
    std::vector<std::size_t> minority;
    for (std::size_t c = 0; c < partition.num_classes(); ++c) {
        if (partition.count(c) < minority_value) minority.push_back(c);
    }
    return minority;
}

static void check_same_dim(const FeatureVector& a, const FeatureVector& b,
                           const char* what) {
    if (a.size() != b.size()) {
        throw DataError(std::string(what) + ": dimension mismatch (" +
                        std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                        ")");
    }
}

FeatureVector compute_centroid(const std::vector<FeatureVector>& vectors) {
    if (vectors.empty()) {
        throw DataError("compute_centroid: empty class, centroid undefined");
    }
    const std::size_t dim = vectors.front().size();
    FeatureVector sum(dim, 0.0);
    for (const FeatureVector& v : vectors) {
        check_same_dim(v, sum, "compute_centroid");
        for (std::size_t i = 0; i < dim; ++i) sum[i] += v[i];
    }
    const double n = static_cast<double>(vectors.size());
    for (double& x : sum) x /= n;
    return sum;
}

FeatureVector translate_feature(const FeatureVector& f, const FeatureVector& ctr,
                                double lambda) {
    check_same_dim(f, ctr, "translate_feature");
    FeatureVector s(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        s[i] = f[i] + lambda * (ctr[i] - f[i]);
    }
    return s;
}

double min_dist_to_set(const FeatureVector& s, const std::vector<FeatureVector>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const FeatureVector& v : set) {
        check_same_dim(s, v, "min_dist_to_set");
        double sq = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double d = s[i] - v[i];
            sq += d * d;
        }
        best = std::min(best, std::sqrt(sq));
    }
    return best;
}

static double norm(const FeatureVector& v) {
    double sq = 0.0;
    for (const double x : v) sq += x * x;
    return std::sqrt(sq);
}

double cosine_similarity(const FeatureVector& a, const FeatureVector& b) {
    check_same_dim(a, b, "cosine_similarity");
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw DataError("cosine_similarity: zero-norm input, similarity undefined");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double class_similarity(const FeatureVector& s,
                        const std::vector<FeatureVector>& class_vectors,
                        Aggregation agg, std::size_t* skipped_zero_norm) {
    if (class_vectors.empty()) {
        throw DataError("class_similarity: empty class");
    }
    if (norm(s) == 0.0) {
        throw DataError("class_similarity: zero-norm candidate, similarity undefined");
    }
    double acc = agg == Aggregation::mean ? 0.0 : -1.0;
    std::size_t used = 0;
    std::size_t skipped = 0;
    for (const FeatureVector& v : class_vectors) {
        check_same_dim(s, v, "class_similarity");
        if (norm(v) == 0.0) {
            ++skipped;
            continue;
        }
        const double sim = cosine_similarity(s, v);
        if (agg == Aggregation::mean) {
            acc += sim;
        } else {
            acc = std::max(acc, sim);
        }
        ++used;
    }
    if (skipped_zero_norm != nullptr) *skipped_zero_norm = skipped;
    if (used == 0) {
        throw DataError("class_similarity: all class vectors have zero norm");
    }
    return agg == Aggregation::mean ? acc / static_cast<double>(used) : acc;
}

std::vector<std::size_t> majority_pool_order(const ClassPartition& partition,
                                             const std::vector<std::size_t>& minority,
                                             const OversampleConfig& cfg) {
    std::vector<bool> is_minority(partition.num_classes(), false);
    for (const std::size_t c : minority) is_minority.at(c) = true;
    std::size_t total = 0;
    for (std::size_t c = 0; c < partition.num_classes(); ++c) total += partition.count(c);

    // Dataset order, so the unshuffled pool is exactly D_M as given.
    std::vector<std::size_t> owner(total);
    for (std::size_t c = 0; c < partition.num_classes(); ++c) {
        for (const std::size_t i : partition.by_class[c]) owner.at(i) = c;
    }
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < total; ++i) {
        if (!is_minority[owner[i]]) pool.push_back(i);
    }
    if (cfg.shuffle) {
        SeededRng rng(cfg.seed);
        rng.shuffle(pool);
    }
    return pool;
}

namespace {

enum class RetentionRule { min_distance, similarity };

std::vector<FeatureVector> collect_class_vectors(const FeatureDataset& dataset,
                                                 const std::vector<std::size_t>& indices) {
    std::vector<FeatureVector> out;
    out.reserve(indices.size());
    for (const std::size_t i : indices) out.push_back(dataset.samples[i].values);
    return out;
}

SyntheticSet oversample_impl(const FeatureDataset& dataset, const OversampleConfig& cfg,
                             RetentionRule rule) {
    validate(cfg);
    const ClassPartition partition = partition_by_class(dataset);
    const std::vector<std::size_t> minority = detect_minority(partition, cfg.minority_value);

    SyntheticSet out;
    out.dim = dataset.dim;
    if (minority.empty()) return out;
    if (minority.size() == dataset.num_classes()) {
        throw DataError("oversample: no majority class (every class is below M_v)");
    }
    for (const std::size_t c : minority) {
        if (partition.count(c) == 0) {
            throw DataError("oversample: minority class '" + dataset.classes[c] +
                            "' is empty, centroid undefined");
        }
    }

    const std::vector<std::size_t> pool = majority_pool_order(partition, minority, cfg);

    for (const std::size_t c : minority) {
        const std::vector<FeatureVector> class_vecs =
            collect_class_vectors(dataset, partition.by_class[c]);
        std::size_t zero_norm_count = 0;
        if (rule == RetentionRule::similarity) {
            for (const FeatureVector& v : class_vecs) {
                if (norm(v) == 0.0) ++zero_norm_count;
            }
            if (zero_norm_count == class_vecs.size()) {
                throw DataError("oversample_m2mu: class '" + dataset.classes[c] +
                                "' has only zero-norm vectors");
            }
            if (zero_norm_count > 0) {
                out.warnings.push_back("class '" + dataset.classes[c] + "': skipped " +
                                       std::to_string(zero_norm_count) +
                                       " zero-norm vectors in similarity");
            }
        }
        const FeatureVector ctr = compute_centroid(class_vecs);

        std::vector<FeatureVector> retained;
        std::vector<std::size_t> sources;
        for (const std::size_t i : pool) {
            const FeatureVector s =
                translate_feature(dataset.samples[i].values, ctr, cfg.lambda);
            bool keep = false;
            if (rule == RetentionRule::min_distance) {
                keep = min_dist_to_set(s, retained) > cfg.distance_threshold;
            } else if (norm(s) != 0.0) {
                // A zero-norm candidate has no direction and cannot pass.
                keep = class_similarity(s, class_vecs, cfg.aggregation) >
                       cfg.similarity_threshold;
            }
            if (keep) {
                retained.push_back(s);
                sources.push_back(i);
                if (retained.size() == cfg.minority_value) break;
            }
        }
        if (retained.size() < cfg.minority_value) {
            out.warnings.push_back("class '" + dataset.classes[c] + "': retained " +
                                   std::to_string(retained.size()) + " of M_v=" +
                                   std::to_string(cfg.minority_value) +
                                   " synthetic features");
        }
        std::vector<SyntheticSample>& list = out.per_class[c];
        list.reserve(retained.size());
        for (std::size_t j = 0; j < retained.size(); ++j) {
            list.push_back(SyntheticSample{sources[j], std::move(retained[j])});
        }
    }
    return out;
}

} // namespace

SyntheticSet oversample_m2mf(const FeatureDataset& dataset, const OversampleConfig& cfg) {
    return oversample_impl(dataset, cfg, RetentionRule::min_distance);
}

SyntheticSet oversample_m2mu(const FeatureDataset& dataset, const OversampleConfig& cfg) {
    return oversample_impl(dataset, cfg, RetentionRule::similarity);
}

std::vector<std::size_t> balanced_resample(const FeatureDataset& dataset,
                                           std::uint64_t seed, std::size_t draws) {
    const std::vector<std::size_t> counts = dataset.class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) {
            throw DataError("balanced_resample: class '" + dataset.classes[c] +
                            "' is empty");
        }
    }
    if (draws == 0) draws = dataset.size();

    // Inverse-frequency weights; draws by inverse CDF over the cumulative sum.
    std::vector<double> cumulative(dataset.size());
    double total = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        total += 1.0 / static_cast<double>(counts[dataset.samples[i].class_index]);
        cumulative[i] = total;
    }
    SeededRng rng(seed);
    std::vector<std::size_t> out;
    out.reserve(draws);
    for (std::size_t k = 0; k < draws; ++k) {
        const double u = rng.next_double() * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx = it == cumulative.end()
                                    ? dataset.size() - 1
                                    : static_cast<std::size_t>(it - cumulative.begin());
        out.push_back(idx);
    }
    return out;
}

void save_synthetic_csv(const SyntheticSet& synth,
                        const std::vector<std::string>& classes,
                        const std::string& path) {
    std::string out = "label";
    for (std::size_t j = 0; j < synth.dim; ++j) out += ",f" + std::to_string(j);
    out += ",source_index\n";
    for (const auto& [c, list] : synth.per_class) {
        const std::string& label = classes.at(c);
        if (label.find(',') != std::string::npos) {
            throw DataError("label contains a comma and cannot be serialized: '" +
                            label + "'");
        }
        for (const SyntheticSample& s : list) {
            out += label;
            for (const double v : s.values) {
                out += ',';
                out += format_double(v);
            }
            out += ',' + std::to_string(s.source_index) + '\n';
        }
    }
    write_file_atomic(path, out);
}

SyntheticSet load_synthetic_csv(const std::string& path,
                                const std::vector<std::string>& classes) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    if (header.size() < 2 || header.front() != "label" || header.back() != "source_index") {
        throw DataError(path + ": row 1: expected header label,f0,...,source_index");
    }
    const std::size_t width = header.size();
    SyntheticSet out;
    out.dim = width - 2;

    std::map<std::string, std::size_t> index_of;
    for (std::size_t c = 0; c < classes.size(); ++c) index_of[classes[c]] = c;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto cells = split(line, ',');
        if (cells.size() != width) {
            throw DataError(path + ": row " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " columns, got " +
                            std::to_string(cells.size()));
        }
        const auto it = index_of.find(cells[0]);
        if (it == index_of.end()) {
            throw DataError(path + ": row " + std::to_string(line_no) +
                            ": unknown class label '" + cells[0] + "'");
        }
        SyntheticSample s;
        s.values.reserve(out.dim);
        for (std::size_t j = 1; j + 1 < width; ++j) {
            s.values.push_back(parse_double(
                cells[j], path + ": row " + std::to_string(line_no) + ": column f" +
                              std::to_string(j - 1)));
        }
        const double src = parse_double(cells.back(), path + ": row " +
                                                          std::to_string(line_no) +
                                                          ": column source_index");
        if (src < 0.0 || src != std::floor(src)) {
            throw DataError(path + ": row " + std::to_string(line_no) +
                            ": source_index must be a nonnegative integer");
        }
        s.source_index = static_cast<std::size_t>(src);
        out.per_class[it->second].push_back(std::move(s));
    }
    return out;
}

} // namespace longtail
