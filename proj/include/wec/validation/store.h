#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/pipeline/dataset_io.h"
#include "wec/util/error.h"
#include "wec/validation/judgment.h"

namespace wec::validation {

/// A submitted judgment names a task that does not exist.
class UnknownTaskError : public InputError {
public:
    using InputError::InputError;
};

/// Export was requested while tasks of the split are still unjudged.
class UnjudgedTasksError : public InputError {
public:
    UnjudgedTasksError(std::string message, std::vector<TaskId> tasks)
        : InputError(std::move(message)), tasks(std::move(tasks)) {}
    std::vector<TaskId> tasks;
};

enum class TaskStatus { pending, judged };

struct ValidationTask {
    TaskId task_id = -1;
    pipeline::Candidate candidate;
    /// Practice tasks are served first and never exported.
    bool practice = false;
};

struct TaskView {
    ValidationTask task;
    TaskStatus status = TaskStatus::pending;
};

nlohmann::json to_json(const TaskView &view);

struct StoreOptions {
    /// Annotator whose judgments override everyone else's.
    std::string consolidator = "consolidator";
    /// Mention ids of candidates used as practice tasks.
    std::set<std::int64_t> practice_mentions;
    /// Returns the current time as ISO-8601 UTC.
    std::function<std::string()> clock;
};

struct Ack {
    std::uint64_t seq = 0;
    /// An earlier judgment by the same annotator on the task was replaced.
    bool superseded = false;
    /// The submission key was already seen; nothing was written.
    bool duplicate = false;
};

nlohmann::json to_json(const Ack &ack);

struct ExportResult {
    pipeline::DatasetSplit split;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::vector<TaskId> unjudged;
    std::size_t practice_excluded = 0;
};

/// Agreement of one annotator with the consolidator over the tasks both
/// have judged.
struct AnnotatorAgreement {
    std::optional<AgreementReport> report;
    std::size_t compared = 0;
    std::size_t only_annotator = 0;
    std::size_t only_consolidator = 0;
};

nlohmann::json to_json(const AnnotatorAgreement &agreement);

/// Validation tasks over a candidate set plus a durable judgment log kept
/// in one directory:
///   meta.json        candidate digest the store was created for
///   judgments.log    append-only JSONL, fsynced before each acknowledgment
///   snapshot.json    live judgments after the last compaction
/// Reads take a shared lock; submissions and compaction take it exclusively.
class Store {
public:
    /// Opens or creates the store. Throws InputError if the directory was
    /// created for different candidates or its files are corrupt. A torn
    /// final log line (no newline) is dropped with a warning.
    Store(std::filesystem::path dir, std::vector<pipeline::Candidate> candidates, StoreOptions options = {});
    ~Store();
    Store(const Store &) = delete;
    Store &operator=(const Store &) = delete;

    const std::filesystem::path &dir() const { return dir_; }
    const std::string &consolidator() const { return options_.consolidator; }
    std::size_t task_count() const { return tasks_.size(); }
    /// Throws UnknownTaskError.
    TaskView task(TaskId id) const;

    /// Lowest-id task this annotator has not judged, optionally restricted
    /// to one split. Task ids follow (practice first, split, cluster id,
    /// mention id), so a cluster's tasks are served consecutively.
    std::optional<TaskView> next_task(const std::string &annotator,
                                      const std::optional<std::string> &split = std::nullopt) const;

    /// Persists the judgment before returning. Throws UnknownTaskError or
    /// InputError for inconsistent verdicts.
    Ack submit(Judgment judgment);

    /// Live judgments (latest per task and annotator), by task then annotator.
    std::vector<Judgment> live_judgments() const;
    /// The consolidator's verdict when present, else the latest one.
    std::optional<Verdict> effective_verdict(TaskId id) const;

    nlohmann::json progress() const;
    AnnotatorAgreement agreement_for(const std::string &annotator) const;

    /// Valid mentions of the split, in cluster chains. Throws
    /// UnjudgedTasksError unless `partial`, in which case unjudged tasks are
    /// left out. Practice tasks are never exported.
    ExportResult export_validated(const std::string &split, bool partial) const;

    /// Rewrites the snapshot with the live judgments and empties the log.
    /// Superseded judgments are dropped from disk.
    void compact();

private:
    void replay(const Judgment &judgment);
    void append_log(const Judgment &judgment);
    void load();
    std::optional<Verdict> effective_verdict_locked(std::size_t index) const;

    std::filesystem::path dir_;
    StoreOptions options_;
    std::vector<ValidationTask> tasks_;
    mutable std::shared_mutex mutex_;
    // task -> annotator -> live judgment
    std::vector<std::map<std::string, Judgment>> live_;
    std::map<std::string, std::set<std::string>> submission_keys_;
    std::uint64_t next_seq_ = 1;
    int log_fd_ = -1;
};

/// Writes `<dir>/<split>.jsonl`. When `train` is given, also writes
/// `<dir>/train.jsonl` with every mention sharing a source article with a
/// validated mention in any exported split file under `dir` removed.
/// Returns a summary record.
nlohmann::json write_export(const std::filesystem::path &dir, const ExportResult &result,
                            const std::optional<pipeline::DatasetSplit> &train);

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

} // namespace wec::validation
