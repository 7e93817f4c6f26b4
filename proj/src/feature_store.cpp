#include "longtail/feature_store.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/oversampling.hpp"
#include "longtail/text.hpp"

namespace longtail {

std::vector<std::size_t> FeatureDataset::class_counts() const {
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const Sample& s : samples) {
        if (s.class_index >= counts.size()) {
            throw DataError("sample class index " + std::to_string(s.class_index) +
                            " out of range (" + std::to_string(classes.size()) +
                            " classes)");
        }
        ++counts[s.class_index];
    }
    return counts;
}

FeatureDataset load_features_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": empty file");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    if (header.empty() || header[0] != "label") {
        throw DataError(path + ": row 1: header must start with 'label'");
    }
    const std::size_t width = header.size();
    const std::size_t dim = width - 1;

    struct Row {
        std::string label;
        FeatureVector values;
    };
    std::vector<Row> rows;
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
        Row row;
        row.label = cells[0];
        row.values.reserve(dim);
        for (std::size_t j = 1; j < width; ++j) {
            row.values.push_back(parse_double(
                cells[j], path + ": row " + std::to_string(line_no) + ": column f" +
                              std::to_string(j - 1)));
        }
        rows.push_back(std::move(row));
    }

    FeatureDataset ds;
    ds.dim = dim;
    std::map<std::string, std::size_t> index_of; // sorted, so indices are lexicographic
    for (const Row& r : rows) index_of[r.label];
    std::size_t next = 0;
    for (auto& [label, idx] : index_of) {
        idx = next++;
        ds.classes.push_back(label);
    }
    ds.samples.reserve(rows.size());
    for (Row& r : rows) {
        ds.samples.push_back(Sample{index_of[r.label], std::move(r.values)});
    }
    return ds;
}

void save_features_csv(const FeatureDataset& dataset, const std::string& path) {
    std::string out = "label";
    for (std::size_t j = 0; j < dataset.dim; ++j) {
        out += ",f" + std::to_string(j);
    }
    out += '\n';
    for (const Sample& s : dataset.samples) {
        const std::string& label = dataset.classes.at(s.class_index);
        if (label.find(',') != std::string::npos) {
            throw DataError("label contains a comma and cannot be serialized: '" +
                            label + "'");
        }
        out += label;
        for (const double v : s.values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

ClassPartition partition_by_class(const FeatureDataset& dataset) {
    ClassPartition part;
    part.by_class.resize(dataset.num_classes());
    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const std::size_t c = dataset.samples[i].class_index;
        if (c >= part.by_class.size()) {
            throw DataError("sample " + std::to_string(i) + ": class index " +
                            std::to_string(c) + " out of range");
        }
        part.by_class[c].push_back(i);
    }
    return part;
}

FeatureDataset merge(const FeatureDataset& dataset, const SyntheticSet& synth) {
    if (synth.total() != 0 && synth.dim != dataset.dim) {
        throw DataError("merge: synthetic dim " + std::to_string(synth.dim) +
                        " != dataset dim " + std::to_string(dataset.dim));
    }
    FeatureDataset out;
    out.dim = dataset.dim;
    out.classes = dataset.classes;
    out.samples = dataset.samples;
    out.samples.reserve(dataset.samples.size() + synth.total());
    for (const auto& [c, list] : synth.per_class) {
        if (c >= dataset.num_classes()) {
            throw DataError("merge: synthetic class index " + std::to_string(c) +
                            " out of range");
        }
        for (const SyntheticSample& s : list) {
            out.samples.push_back(Sample{c, s.values});
        }
    }
    return out;
}

} // namespace longtail
