#include "wec/validation/judgment.h"

#include <array>
#include <utility>

#include "wec/util/error.h"

namespace wec::validation {

namespace {

constexpr std::array<std::pair<RejectReason, const char *>, 6> kReasons{{
    {RejectReason::insufficient_context, "insufficient_context"},
    {RejectReason::boundary_not_trigger, "boundary_not_trigger"},
    {RejectReason::event_time, "event_time"},
    {RejectReason::event_location, "event_location"},
    {RejectReason::subevent, "subevent"},
    {RejectReason::other, "other"},
}};

double ratio(std::size_t num, std::size_t den, bool &undefined) {
    undefined = den == 0;
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

std::string to_string(Verdict verdict) { return verdict == Verdict::valid ? "valid" : "rejected"; }

std::string to_string(RejectReason reason) {
    for (const auto &[r, name] : kReasons)
        if (r == reason)
            return name;
    throw ContractError("unknown reject reason");
}

Verdict parse_verdict(const std::string &name) {
    if (name == "valid")
        return Verdict::valid;
    if (name == "rejected")
        return Verdict::rejected;
    throw InputError("verdict must be 'valid' or 'rejected', got '" + name + "'");
}

RejectReason parse_reject_reason(const std::string &name) {
    for (const auto &[r, n] : kReasons)
        if (name == n)
            return r;
    throw InputError("unknown reject_reason '" + name + "'");
}

void check_judgment(const Judgment &j) {
    if (j.annotator_id.empty())
        throw InputError("annotator_id is empty");
    if (j.verdict == Verdict::rejected && !j.reject_reason)
        throw InputError("a rejected verdict needs a reject_reason");
    if (j.verdict == Verdict::valid && j.reject_reason)
        throw InputError("a valid verdict cannot carry a reject_reason");
}

nlohmann::json to_json(const Judgment &j) {
    nlohmann::json out{{"task_id", j.task_id},
                       {"annotator_id", j.annotator_id},
                       {"verdict", to_string(j.verdict)},
                       {"reject_reason", j.reject_reason ? nlohmann::json(to_string(*j.reject_reason)) : nullptr},
                       {"timestamp", j.timestamp},
                       {"note", j.note},
                       {"seq", j.seq}};
    if (j.submission_key)
        out["submission_key"] = *j.submission_key;
    return out;
}

Judgment judgment_from_json(const nlohmann::json &r) {
    if (!r.is_object())
        throw InputError("judgment must be a JSON object");
    Judgment j;
    try {
        j.task_id = r.at("task_id").get<TaskId>();
        j.annotator_id = r.at("annotator_id").get<std::string>();
        j.verdict = parse_verdict(r.at("verdict").get<std::string>());
        if (auto it = r.find("reject_reason"); it != r.end() && !it->is_null())
            j.reject_reason = parse_reject_reason(it->get<std::string>());
        if (auto it = r.find("timestamp"); it != r.end() && !it->is_null())
            j.timestamp = it->get<std::string>();
        if (auto it = r.find("note"); it != r.end() && !it->is_null())
            j.note = it->get<std::string>();
        if (auto it = r.find("submission_key"); it != r.end() && !it->is_null())
            j.submission_key = it->get<std::string>();
        if (auto it = r.find("seq"); it != r.end())
            j.seq = it->get<std::uint64_t>();
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("bad judgment record: ") + e.what());
    }
    check_judgment(j);
    return j;
}

AgreementReport agreement_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    AgreementReport r;
    r.true_positive = tp;
    r.false_positive = fp;
    r.false_negative = fn;
    r.true_negative = tn;
    const std::size_t n = r.total();
    if (n == 0)
        throw InputError("agreement needs at least one task judged by both sides");
    r.precision = ratio(tp, tp + fp, r.precision_undefined);
    r.recall = ratio(tp, tp + fn, r.recall_undefined);
    const double nn = static_cast<double>(n);
    r.observed_agreement = static_cast<double>(tp + tn) / nn;
    // Chance agreement from each side's marginal label rates.
    r.expected_agreement = (static_cast<double>(tp + fp) * static_cast<double>(tp + fn) +
                            static_cast<double>(fn + tn) * static_cast<double>(fp + tn)) /
                           (nn * nn);
    r.cohen_kappa = r.expected_agreement == 1.0
                        ? 1.0
                        : (r.observed_agreement - r.expected_agreement) / (1.0 - r.expected_agreement);
    return r;
}

AgreementReport agreement(const std::map<TaskId, Verdict> &annotator, const std::map<TaskId, Verdict> &consolidated) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const auto &[task, mine] : annotator) {
        auto gold = consolidated.find(task);
        if (gold == consolidated.end())
            throw InputError("task " + std::to_string(task) + " has no consolidated judgment");
        const bool a = mine == Verdict::valid, g = gold->second == Verdict::valid;
        (a ? (g ? tp : fp) : (g ? fn : tn))++;
    }
    if (consolidated.size() != annotator.size()) {
        for (const auto &[task, v] : consolidated)
            if (!annotator.count(task))
                throw InputError("task " + std::to_string(task) + " has no annotator judgment");
    }
    return agreement_from_counts(tp, fp, fn, tn);
}

nlohmann::json to_json(const AgreementReport &r) {
    return {{"precision", r.precision},
            {"recall", r.recall},
            {"cohen_kappa", r.cohen_kappa},
            {"observed_agreement", r.observed_agreement},
            {"expected_agreement", r.expected_agreement},
            {"precision_undefined", r.precision_undefined},
            {"recall_undefined", r.recall_undefined},
            {"confusion",
             {{"true_positive", r.true_positive},
              {"false_positive", r.false_positive},
              {"false_negative", r.false_negative},
              {"true_negative", r.true_negative}}}};
}

} // namespace wec::validation
