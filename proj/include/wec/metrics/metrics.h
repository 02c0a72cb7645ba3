#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace wec::metrics {

using MentionId = std::int64_t;

/// Disjoint, non-empty clusters of mention ids.
class Partition {
public:
    Partition() = default;
    /// Throws InputError on an empty cluster or a repeated mention id.
    explicit Partition(std::vector<std::vector<MentionId>> clusters);

    const std::vector<std::vector<MentionId>> &clusters() const { return clusters_; }
    std::size_t size() const { return clusters_.size(); }
    std::size_t mention_count() const;
    /// Sorted mention ids.
    std::vector<MentionId> universe() const;

private:
    std::vector<std::vector<MentionId>> clusters_;
};

struct MetricScore {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
    /// Set when a denominator was zero and the value was reported as 0.
    bool recall_undefined = false;
    bool precision_undefined = false;
};

/// F1 from recall and precision; 0 when both are 0.
double f1_score(double recall, double precision);

MetricScore muc(const Partition &key, const Partition &response);
MetricScore b_cubed(const Partition &key, const Partition &response);
MetricScore ceaf_e(const Partition &key, const Partition &response);

struct EvalReport {
    MetricScore muc;
    MetricScore b_cubed;
    MetricScore ceaf_e;
    double conll_f1 = 0.0;
};

/// Mean of the three F1 values.
EvalReport conll(const MetricScore &muc, const MetricScore &b_cubed, const MetricScore &ceaf_e);
double conll_f1(double muc_f1, double b_cubed_f1, double ceaf_e_f1);

/// Scores a response against a key over the same mention universe (the
/// gold-mention, single meta-document setting). Throws InputError when the
/// universes differ.
EvalReport evaluate(const Partition &key, const Partition &response);

/// A score in [0,1] as a percentage rounded to one decimal ("62.3").
std::string format_percent(double fraction);

/// Full-precision record form.
nlohmann::json to_json(const MetricScore &score);
nlohmann::json to_json(const EvalReport &report);

/// Rows MUC, B3, CEAF-e and CoNLL with R, P, F1 as one-decimal percentages.
std::string format_table(const EvalReport &report);

} // namespace wec::metrics
