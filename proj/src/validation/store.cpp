#include "wec/validation/store.h"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <mutex>

#include <fcntl.h>
#include <unistd.h>

#include "wec/pipeline/splits.h"
#include "wec/util/digest.h"
#include "wec/util/jsonl.h"
#include "wec/util/log.h"

namespace wec::validation {

namespace fs = std::filesystem;

namespace {

constexpr int kFormatVersion = 1;

std::string errno_text() { return std::strerror(errno); }

void write_all(int fd, const std::string &bytes, const fs::path &path) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw Error("write failed on " + path.string() + ": " + errno_text());
        }
        done += static_cast<std::size_t>(n);
    }
}

void sync_fd(int fd, const fs::path &path) {
    if (::fsync(fd) != 0)
        throw Error("fsync failed on " + path.string() + ": " + errno_text());
}

void sync_dir(const fs::path &dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (fd < 0)
        throw Error("cannot open directory " + dir.string() + ": " + errno_text());
    ::fsync(fd);
    ::close(fd);
}

/// Temporary file, fsync, rename, fsync of the directory.
void write_durable(const fs::path &path, const std::string &text) {
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error("cannot write " + tmp.string() + ": " + errno_text());
    try {
        write_all(fd, text, tmp);
        sync_fd(fd, tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    fs::rename(tmp, path);
    sync_dir(path.parent_path());
}

bool task_order(const ValidationTask &a, const ValidationTask &b) {
    const auto &ma = a.candidate.mention, &mb = b.candidate.mention;
    return std::tie(b.practice, a.candidate.split, ma.cluster_id, ma.mention_id) <
           std::tie(a.practice, b.candidate.split, mb.cluster_id, mb.mention_id);
}

std::string status_name(TaskStatus s) { return s == TaskStatus::pending ? "pending" : "judged"; }

} // namespace

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const TaskView &v) {
    return {{"task_id", v.task.task_id},
            {"status", status_name(v.status)},
            {"practice", v.task.practice},
            {"split", v.task.candidate.split},
            {"pivot_title", v.task.candidate.pivot_title},
            {"pivot_summary", v.task.candidate.pivot_summary},
            {"mention", pipeline::to_json(v.task.candidate.mention)}};
}

nlohmann::json to_json(const Ack &a) {
    return {{"acknowledged", true}, {"seq", a.seq}, {"superseded", a.superseded}, {"duplicate", a.duplicate}};
}

nlohmann::json to_json(const AnnotatorAgreement &a) {
    return {{"report", a.report ? to_json(*a.report) : nlohmann::json(nullptr)},
            {"compared", a.compared},
            {"only_annotator", a.only_annotator},
            {"only_consolidator", a.only_consolidator}};
}

Store::Store(fs::path dir, std::vector<pipeline::Candidate> candidates, StoreOptions options)
    : dir_(std::move(dir)), options_(std::move(options)) {
    if (!options_.clock)
        options_.clock = utc_now;
    if (options_.consolidator.empty())
        throw ContractError("consolidator id is empty");
    std::set<std::int64_t> seen;
    for (auto &c : candidates) {
        if (!seen.insert(c.mention.mention_id).second)
            throw InputError("candidate mention " + std::to_string(c.mention.mention_id) + " appears twice");
        ValidationTask t;
        t.practice = options_.practice_mentions.count(c.mention.mention_id) > 0;
        t.candidate = std::move(c);
        tasks_.push_back(std::move(t));
    }
    for (auto id : options_.practice_mentions)
        if (!seen.count(id))
            throw InputError("practice mention " + std::to_string(id) + " is not a candidate");
    std::sort(tasks_.begin(), tasks_.end(), task_order);
    std::string canonical;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        tasks_[i].task_id = static_cast<TaskId>(i);
        canonical += util::dump_record(to_json(tasks_[i].candidate));
        canonical += tasks_[i].practice ? " practice\n" : "\n";
    }
    live_.resize(tasks_.size());

    fs::create_directories(dir_);
    const nlohmann::json meta{{"format_version", kFormatVersion},
                              {"tasks", tasks_.size()},
                              {"candidates_digest", util::sha256_hex(canonical)}};
    const auto meta_path = dir_ / "meta.json";
    if (fs::exists(meta_path)) {
        nlohmann::json existing;
        try {
            existing = nlohmann::json::parse(util::read_file(meta_path));
        } catch (const nlohmann::json::exception &e) {
            throw InputError(meta_path.string() + ": " + e.what());
        }
        if (existing.value("candidates_digest", "") != meta["candidates_digest"])
            throw InputError("store " + dir_.string() +
                             " was created for a different candidate set or practice selection");
    } else {
        write_durable(meta_path, meta.dump(2) + "\n");
    }
    load();
    const auto log_path = dir_ / "judgments.log";
    log_fd_ = ::open(log_path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (log_fd_ < 0)
        throw Error("cannot open " + log_path.string() + ": " + errno_text());
    sync_dir(dir_);
    log::info("store_opened", {{"dir", dir_.string()}, {"tasks", tasks_.size()}, {"next_seq", next_seq_}});
}

Store::~Store() {
    if (log_fd_ >= 0)
        ::close(log_fd_);
}

void Store::replay(const Judgment &j) {
    if (j.task_id < 0 || static_cast<std::size_t>(j.task_id) >= tasks_.size())
        throw InputError("judgment log names unknown task " + std::to_string(j.task_id));
    auto &slot = live_[static_cast<std::size_t>(j.task_id)];
    auto it = slot.find(j.annotator_id);
    if (it == slot.end() || it->second.seq < j.seq)
        slot[j.annotator_id] = j;
    if (j.submission_key)
        submission_keys_[j.annotator_id].insert(*j.submission_key);
    next_seq_ = std::max(next_seq_, j.seq + 1);
}

void Store::load() {
    const auto snapshot_path = dir_ / "snapshot.json";
    std::uint64_t compacted_below = 0;
    if (fs::exists(snapshot_path)) {
        try {
            const auto snap = nlohmann::json::parse(util::read_file(snapshot_path));
            compacted_below = snap.at("next_seq").get<std::uint64_t>();
            for (const auto &[annotator, keys] : snap.at("submission_keys").items())
                for (const auto &k : keys)
                    submission_keys_[annotator].insert(k.get<std::string>());
            for (const auto &r : snap.at("judgments"))
                replay(judgment_from_json(r));
        } catch (const nlohmann::json::exception &e) {
            throw InputError(snapshot_path.string() + ": " + e.what());
        }
        next_seq_ = std::max(next_seq_, compacted_below);
    }

    const auto log_path = dir_ / "judgments.log";
    if (!fs::exists(log_path))
        return;
    const std::string text = util::read_file(log_path);
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            // Only a fully written, synced line is ever acknowledged, so an
            // unterminated tail is a torn write from a crash.
            log::warn("judgment_log_torn_tail", {{"path", log_path.string()}, {"bytes", text.size() - pos}});
            fs::resize_file(log_path, pos);
            break;
        }
        ++line_no;
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty())
            continue;
        Judgment j;
        try {
            j = judgment_from_json(nlohmann::json::parse(line));
        } catch (const std::exception &e) {
            throw InputError(log_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        // Lines already folded into the snapshot survive a crash between
        // snapshot rename and log truncation.
        if (j.seq < compacted_below)
            continue;
        replay(j);
    }
}

TaskView Store::task(TaskId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tasks_.size())
        throw UnknownTaskError("unknown task " + std::to_string(id));
    std::shared_lock lock(mutex_);
    const auto i = static_cast<std::size_t>(id);
    return {tasks_[i], live_[i].empty() ? TaskStatus::pending : TaskStatus::judged};
}

std::optional<TaskView> Store::next_task(const std::string &annotator, const std::optional<std::string> &split) const {
    std::shared_lock lock(mutex_);
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        if (split && tasks_[i].candidate.split != *split)
            continue;
        if (!live_[i].count(annotator))
            return TaskView{tasks_[i], live_[i].empty() ? TaskStatus::pending : TaskStatus::judged};
    }
    return std::nullopt;
}

void Store::append_log(const Judgment &j) {
    const auto path = dir_ / "judgments.log";
    write_all(log_fd_, util::dump_record(to_json(j)) + "\n", path);
    sync_fd(log_fd_, path);
}

Ack Store::submit(Judgment j) {
    check_judgment(j);
    if (j.task_id < 0 || static_cast<std::size_t>(j.task_id) >= tasks_.size())
        throw UnknownTaskError("unknown task " + std::to_string(j.task_id));
    std::unique_lock lock(mutex_);
    Ack ack;
    if (j.submission_key) {
        auto keys = submission_keys_.find(j.annotator_id);
        if (keys != submission_keys_.end() && keys->second.count(*j.submission_key)) {
            ack.duplicate = true;
            auto live = live_[static_cast<std::size_t>(j.task_id)].find(j.annotator_id);
            if (live != live_[static_cast<std::size_t>(j.task_id)].end())
                ack.seq = live->second.seq;
            return ack;
        }
    }
    if (j.timestamp.empty())
        j.timestamp = options_.clock();
    j.seq = next_seq_;
    append_log(j);
    ack.seq = j.seq;
    ack.superseded = live_[static_cast<std::size_t>(j.task_id)].count(j.annotator_id) > 0;
    replay(j);
    return ack;
}

std::vector<Judgment> Store::live_judgments() const {
    std::shared_lock lock(mutex_);
    std::vector<Judgment> out;
    for (const auto &slot : live_)
        for (const auto &[annotator, j] : slot)
            out.push_back(j);
    return out;
}

std::optional<Verdict> Store::effective_verdict(TaskId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= tasks_.size())
        throw UnknownTaskError("unknown task " + std::to_string(id));
    std::shared_lock lock(mutex_);
    return effective_verdict_locked(static_cast<std::size_t>(id));
}

std::optional<Verdict> Store::effective_verdict_locked(std::size_t index) const {
    const auto &slot = live_[index];
    if (slot.empty())
        return std::nullopt;
    if (auto it = slot.find(options_.consolidator); it != slot.end())
        return it->second.verdict;
    const Judgment *latest = nullptr;
    for (const auto &[annotator, j] : slot)
        if (!latest || j.seq > latest->seq)
            latest = &j;
    return latest->verdict;
}

nlohmann::json Store::progress() const {
    std::shared_lock lock(mutex_);
    nlohmann::json splits = nlohmann::json::object();
    std::map<std::string, std::size_t> per_annotator;
    std::size_t judged = 0, practice = 0, practice_judged = 0;
    for (std::size_t i = 0; i < tasks_.size(); ++i) {
        const bool done = !live_[i].empty();
        judged += done;
        for (const auto &[annotator, j] : live_[i])
            ++per_annotator[annotator];
        if (tasks_[i].practice) {
            ++practice;
            practice_judged += done;
            continue;
        }
        auto &s = splits[tasks_[i].candidate.split];
        if (s.is_null())
            s = {{"total", 0}, {"judged", 0}, {"pending", 0}};
        s["total"] = s["total"].get<std::size_t>() + 1;
        const char *field = done ? "judged" : "pending";
        s[field] = s[field].get<std::size_t>() + 1;
    }
    return {{"total", tasks_.size()},
            {"judged", judged},
            {"pending", tasks_.size() - judged},
            {"practice", {{"total", practice}, {"judged", practice_judged}}},
            {"splits", splits},
            {"annotators", per_annotator},
            {"consolidator", options_.consolidator}};
}

AnnotatorAgreement Store::agreement_for(const std::string &annotator) const {
    if (annotator == options_.consolidator)
        throw InputError("agreement compares an annotator with the consolidator, not with itself");
    std::map<TaskId, Verdict> mine, gold;
    AnnotatorAgreement out;
    {
        std::shared_lock lock(mutex_);
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            if (tasks_[i].practice)
                continue;
            auto a = live_[i].find(annotator);
            auto g = live_[i].find(options_.consolidator);
            const bool has_a = a != live_[i].end(), has_g = g != live_[i].end();
            if (has_a && has_g) {
                mine[tasks_[i].task_id] = a->second.verdict;
                gold[tasks_[i].task_id] = g->second.verdict;
            }
            out.only_annotator += has_a && !has_g;
            out.only_consolidator += has_g && !has_a;
        }
    }
    out.compared = mine.size();
    if (!mine.empty())
        out.report = agreement(mine, gold);
    return out;
}

ExportResult Store::export_validated(const std::string &split, bool partial) const {
    if (split != "dev" && split != "test")
        throw InputError("export split must be 'dev' or 'test', got '" + split + "'");
    ExportResult out;
    out.split.name = split;
    std::vector<pipeline::Mention> valid;
    std::map<int, std::string> pivots;
    std::shared_lock lock(mutex_);
    for (const auto &t : tasks_) {
        if (t.candidate.split != split)
            continue;
        if (t.practice) {
            ++out.practice_excluded;
            continue;
        }
        const auto verdict = effective_verdict_locked(static_cast<std::size_t>(t.task_id));
        if (!verdict) {
            out.unjudged.push_back(t.task_id);
        } else if (*verdict == Verdict::valid) {
            valid.push_back(t.candidate.mention);
            pivots[t.candidate.mention.cluster_id] = t.candidate.pivot_title;
        } else {
            ++out.rejected;
        }
    }
    if (!out.unjudged.empty() && !partial) {
        std::string listed;
        for (std::size_t i = 0; i < out.unjudged.size() && i < 20; ++i)
            listed += (i ? ", " : "") + std::to_string(out.unjudged[i]);
        if (out.unjudged.size() > 20)
            listed += ", ...";
        throw UnjudgedTasksError(std::to_string(out.unjudged.size()) + " " + split +
                                     " tasks are unjudged (use partial export to skip them): " + listed,
                                 out.unjudged);
    }
    out.accepted = valid.size();
    out.split.chains = pipeline::assemble_chains(std::move(valid));
    for (auto &chain : out.split.chains)
        chain.pivot_title = pivots[chain.cluster_id];
    return out;
}

void Store::compact() {
    std::unique_lock lock(mutex_);
    nlohmann::json judgments = nlohmann::json::array();
    for (const auto &slot : live_)
        for (const auto &[annotator, j] : slot)
            judgments.push_back(to_json(j));
    nlohmann::json keys = nlohmann::json::object();
    for (const auto &[annotator, set] : submission_keys_)
        keys[annotator] = set;
    const nlohmann::json snapshot{{"next_seq", next_seq_}, {"submission_keys", keys}, {"judgments", judgments}};
    write_durable(dir_ / "snapshot.json", util::dump_record(snapshot) + "\n");
    const auto log_path = dir_ / "judgments.log";
    if (::ftruncate(log_fd_, 0) != 0)
        throw Error("cannot truncate " + log_path.string() + ": " + errno_text());
    sync_fd(log_fd_, log_path);
    log::info("store_compacted", {{"live_judgments", judgments.size()}, {"next_seq", next_seq_}});
}

nlohmann::json write_export(const fs::path &dir, const ExportResult &result,
                            const std::optional<pipeline::DatasetSplit> &train) {
    fs::create_directories(dir);
    pipeline::write_split(dir / (result.split.name + ".jsonl"), result.split);
    nlohmann::json summary{{"split", result.split.name},
                           {"mentions", result.accepted},
                           {"chains", result.split.chains.size()},
                           {"rejected", result.rejected},
                           {"unjudged", result.unjudged.size()},
                           {"practice_excluded", result.practice_excluded},
                           {"files", {result.split.name + ".jsonl"}}};
    if (train) {
        std::vector<pipeline::Mention> validated;
        for (const char *name : {"dev", "test"}) {
            const auto path = dir / (std::string(name) + ".jsonl");
            if (fs::exists(path)) {
                auto ms = pipeline::read_mentions(path);
                validated.insert(validated.end(), ms.begin(), ms.end());
            }
        }
        const auto purged = pipeline::purge_train_leakage(*train, validated);
        pipeline::write_split(dir / "train.jsonl", purged);
        summary["train"] = {{"mentions_before", train->mention_count()}, {"mentions_after", purged.mention_count()}};
        summary["files"].push_back("train.jsonl");
    }
    return summary;
}

} // namespace wec::validation
