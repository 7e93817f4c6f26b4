#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace longtail {

// Row-major KxK counts; entry (true_class, predicted_class).
struct ConfusionMatrix {
    std::size_t k = 0;
    std::vector<std::int64_t> counts;

    explicit ConfusionMatrix(std::size_t num_classes = 0)
        : k(num_classes), counts(num_classes * num_classes, 0) {}

    std::int64_t& at(std::size_t t, std::size_t p) { return counts[t * k + p]; }
    std::int64_t at(std::size_t t, std::size_t p) const { return counts[t * k + p]; }
    std::int64_t total() const;
};

struct ClassScores {
    double precision = 0.0; // fractions in [0,1]
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    ConfusionMatrix cm;
    std::vector<ClassScores> per_class_percent; // scores scaled to [0,100]
    double macro_f1_percent = 0.0;
};

ConfusionMatrix confusion_matrix(const std::vector<std::size_t>& y_true,
                                 const std::vector<std::size_t>& y_pred,
                                 std::size_t k);

// precision = TP/(TP+FP), recall = TP/(TP+FN), F1 = 2PR/(P+R); 0/0 -> 0.
std::vector<ClassScores> per_class_prf(const ConfusionMatrix& cm);

// 100 x unweighted mean of per-class F1.
double macro_f1(const ConfusionMatrix& cm);

// 100 x support-weighted mean of per-class F1 (flag-gated alternative).
double weighted_f1(const ConfusionMatrix& cm);

EvalReport make_report(const ConfusionMatrix& cm);

// Aligned text table, percentages with two decimals.
std::string format_report_text(const EvalReport& report,
                               const std::vector<std::string>& labels,
                               bool include_weighted = false);

// CSV `class,precision,recall,f1` plus a final `macro` row.
void write_report_csv(const EvalReport& report,
                      const std::vector<std::string>& labels,
                      const std::string& path);

} // namespace longtail
