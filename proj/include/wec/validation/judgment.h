#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace wec::validation {

using TaskId = std::int64_t;

enum class Verdict { valid, rejected };

enum class RejectReason { insufficient_context, boundary_not_trigger, event_time, event_location, subevent, other };

std::string to_string(Verdict verdict);
std::string to_string(RejectReason reason);
/// Throw InputError on unknown names.
Verdict parse_verdict(const std::string &name);
RejectReason parse_reject_reason(const std::string &name);

struct Judgment {
    TaskId task_id = -1;
    std::string annotator_id;
    Verdict verdict = Verdict::valid;
    std::optional<RejectReason> reject_reason;
    /// ISO-8601 UTC; filled by the store when the client sends none.
    std::string timestamp;
    std::string note;
    /// Client-chosen key that makes resubmitting the same judgment a no-op.
    std::optional<std::string> submission_key;
    /// Position in the store's log, assigned on acceptance.
    std::uint64_t seq = 0;
};

/// Throws InputError when the annotator is empty or the reason does not
/// match the verdict (present iff rejected).
void check_judgment(const Judgment &judgment);

nlohmann::json to_json(const Judgment &judgment);
/// Parses and checks a record; `seq` is optional on input.
Judgment judgment_from_json(const nlohmann::json &record);

struct AgreementReport {
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    std::size_t true_negative = 0;
    double precision = 0.0;
    double recall = 0.0;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
    double cohen_kappa = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;

    std::size_t total() const { return true_positive + false_positive + false_negative + true_negative; }
};

/// Scores an annotator's verdicts against consolidated ones, with "valid"
/// as the positive class. Both maps must cover the same non-empty task set
/// (InputError otherwise). Kappa is 1 when both sides use one label
/// throughout and agree.
AgreementReport agreement(const std::map<TaskId, Verdict> &annotator, const std::map<TaskId, Verdict> &consolidated);

/// Builds a report from confusion counts alone.
AgreementReport agreement_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

nlohmann::json to_json(const AgreementReport &report);

} // namespace wec::validation
