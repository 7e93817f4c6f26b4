#include "longtail/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "longtail/errors.hpp"
#include "longtail/text.hpp"

namespace longtail {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t n = 0;
    for (const std::int64_t c : counts) n += c;
    return n;
}

ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& y_true,
                                 const std::vector<std::size_t>& y_pred,
                                 std::size_t k) {
    if (y_true.size() != y_pred.size()) {
        throw DataError("confusion_matrix: length mismatch (" +
                        std::to_string(y_true.size()) + " vs " +
                        std::to_string(y_pred.size()) + ")");
    }
    ConfusionMatrix cm(k);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= k || y_pred[i] >= k) {
            throw DataError("confusion_matrix: index out of range at position " +
                            std::to_string(i));
        }
        ++cm.at(y_true[i], y_pred[i]);
    }
    return cm;
}

std::vector<ClassScores> per_class_prf(const ConfusionMatrix& cm) {
    std::vector<ClassScores> out(cm.k);
    for (std::size_t c = 0; c < cm.k; ++c) {
        std::int64_t tp = cm.at(c, c);
        std::int64_t fp = 0;
        std::int64_t fn = 0;
        for (std::size_t o = 0; o < cm.k; ++o) {
            if (o == c) continue;
            fp += cm.at(o, c);
            fn += cm.at(c, o);
        }
        const double precision =
            tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall =
            tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 = precision + recall == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        out[c] = ClassScores{precision, recall, f1};
    }
    return out;
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.k == 0) throw DataError("macro_f1: no classes");
    const auto scores = per_class_prf(cm);
    double sum = 0.0;
    for (const ClassScores& s : scores) sum += s.f1;
    return 100.0 * sum / static_cast<double>(cm.k);
}

double weighted_f1(const ConfusionMatrix& cm) {
    if (cm.k == 0) throw DataError("weighted_f1: no classes");
    const auto scores = per_class_prf(cm);
    const double total = static_cast<double>(cm.total());
    if (total == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t c = 0; c < cm.k; ++c) {
        std::int64_t support = 0;
        for (std::size_t o = 0; o < cm.k; ++o) support += cm.at(c, o);
        sum += scores[c].f1 * static_cast<double>(support);
    }
    return 100.0 * sum / total;
}

EvalReport make_report(const ConfusionMatrix& cm) {
    EvalReport report{cm, {}, 0.0};
    const auto scores = per_class_prf(cm);
    report.per_class_percent.reserve(scores.size());
    for (const ClassScores& s : scores) {
        report.per_class_percent.push_back(
            ClassScores{100.0 * s.precision, 100.0 * s.recall, 100.0 * s.f1});
    }
    report.macro_f1_percent = macro_f1(cm);
    return report;
}

namespace {

std::string fixed2(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
}

} // namespace

std::string format_report_text(const EvalReport& report,
                               const std::vector<std::string>& labels,
                               bool include_weighted) {
    if (labels.size() != report.cm.k) {
        throw DataError("format_report_text: label count mismatch");
    }
    std::size_t name_width = 5; // "macro"
    for (const std::string& l : labels) name_width = std::max(name_width, l.size());

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << "class"
        << std::right << std::setw(10) << "precision" << std::setw(10) << "recall"
        << std::setw(10) << "f1" << '\n';
    for (std::size_t c = 0; c < report.cm.k; ++c) {
        const ClassScores& s = report.per_class_percent[c];
        out << std::left << std::setw(static_cast<int>(name_width) + 2) << labels[c]
            << std::right << std::setw(10) << fixed2(s.precision) << std::setw(10)
            << fixed2(s.recall) << std::setw(10) << fixed2(s.f1) << '\n';
    }
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << "macro"
        << std::right << std::setw(10) << "" << std::setw(10) << "" << std::setw(10)
        << fixed2(report.macro_f1_percent) << '\n';
    if (include_weighted) {
        out << std::left << std::setw(static_cast<int>(name_width) + 2) << "weighted"
            << std::right << std::setw(10) << "" << std::setw(10) << "" << std::setw(10)
            << fixed2(weighted_f1(report.cm)) << '\n';
    }
    return out.str();
}

void write_report_csv(const EvalReport& report,
                      const std::vector<std::string>& labels,
                      const std::string& path) {
    if (labels.size() != report.cm.k) {
        throw DataError("write_report_csv: label count mismatch");
    }
    std::string out = "class,precision,recall,f1\n";
    for (std::size_t c = 0; c < report.cm.k; ++c) {
        const ClassScores& s = report.per_class_percent[c];
        out += labels[c] + ',' + fixed2(s.precision) + ',' + fixed2(s.recall) + ',' +
               fixed2(s.f1) + '\n';
    }
    out += "macro,,," + fixed2(report.macro_f1_percent) + '\n';
    write_file_atomic(path, out);
}

} // namespace longtail
