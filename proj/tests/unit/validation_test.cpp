#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>

#include "wec/pipeline/dataset_io.h"
#include "wec/util/jsonl.h"
#include "wec/validation/judgment.h"
#include "wec/validation/service.h"
#include "wec/validation/store.h"
#include "oracles/oracles.h"

using namespace wec::validation;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(WEC_FIXTURES) / "validation";

std::vector<wec::pipeline::Candidate> fixture_candidates() {
    return wec::pipeline::read_candidates(kFixture / "candidates.jsonl");
}

fs::path fresh_dir(const std::string &name) {
    auto dir = fs::temp_directory_path() / "wec_validation_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

StoreOptions fixed_clock() {
    StoreOptions o;
    o.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
    return o;
}

Judgment judge(TaskId task, const std::string &who, bool valid,
               std::optional<RejectReason> reason = RejectReason::subevent) {
    Judgment j;
    j.task_id = task;
    j.annotator_id = who;
    j.verdict = valid ? Verdict::valid : Verdict::rejected;
    if (!valid)
        j.reject_reason = reason;
    return j;
}

std::vector<int> labels(std::size_t ones, std::size_t zeros) {
    std::vector<int> v(ones, 1);
    v.resize(ones + zeros, 0);
    return v;
}

} // namespace

TEST_CASE("judgment records and the verdict/reason invariant") {
    auto j = judge(3, "ann", false, RejectReason::event_location);
    j.note = "link on the city";
    j.submission_key = "k1";
    auto back = judgment_from_json(to_json(j));
    CHECK(back.task_id == 3);
    CHECK(*back.reject_reason == RejectReason::event_location);
    CHECK(back.note == "link on the city");
    CHECK(*back.submission_key == "k1");

    CHECK_THROWS_AS(check_judgment(judge(1, "ann", false, std::nullopt)), wec::InputError);
    auto valid_with_reason = judge(1, "ann", true);
    valid_with_reason.reject_reason = RejectReason::other;
    CHECK_THROWS_AS(check_judgment(valid_with_reason), wec::InputError);
    CHECK_THROWS_AS(check_judgment(judge(1, "", true)), wec::InputError);
    CHECK_THROWS_AS(parse_reject_reason("boredom"), wec::InputError);
    CHECK_THROWS_AS(judgment_from_json({{"task_id", 1}, {"annotator_id", "a"}, {"verdict", "maybe"}}),
                    wec::InputError);
    for (auto r : {RejectReason::insufficient_context, RejectReason::boundary_not_trigger, RejectReason::event_time,
                   RejectReason::event_location, RejectReason::subevent, RejectReason::other})
        CHECK(parse_reject_reason(to_string(r)) == r);
}

TEST_CASE("agreement on the contrived table matches the formula oracle") {
    auto r = agreement_from_counts(40, 5, 5, 50);
    CHECK(r.precision == doctest::Approx(40.0 / 45.0).epsilon(1e-12));
    CHECK(r.recall == doctest::Approx(40.0 / 45.0).epsilon(1e-12));
    CHECK(std::abs(r.observed_agreement - 0.9) < 1e-12);
    CHECK(std::abs(r.expected_agreement - 0.505) < 1e-12);
    // Annotator labels: 40 TP, 5 FP (valid vs rejected), 5 FN, 50 TN.
    std::vector<int> a, g;
    for (auto [x, y, n] : {std::tuple{1, 1, 40}, {1, 0, 5}, {0, 1, 5}, {0, 0, 50}})
        for (int i = 0; i < n; ++i) {
            a.push_back(x);
            g.push_back(y);
        }
    CHECK(std::abs(r.cohen_kappa - wec::oracle::kappa(a, g)) < 1e-12);
    CHECK(std::abs(r.cohen_kappa - (0.9 - 0.505) / 0.495) < 1e-12);

    auto same = agreement_from_counts(7, 0, 0, 3);
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);
    CHECK(same.cohen_kappa == 1.0);
    CHECK(agreement_from_counts(5, 0, 0, 0).cohen_kappa == 1.0);

    // Everything judged valid against a 50/50 gold: chance level.
    auto chance = agreement_from_counts(25, 25, 0, 0);
    CHECK(chance.cohen_kappa == 0.0);
    CHECK(wec::oracle::kappa(labels(50, 0), [] {
              auto v = labels(25, 25);
              return v;
          }()) == 0.0);

    auto none = agreement_from_counts(0, 0, 3, 2);
    CHECK(none.precision_undefined);
    CHECK(none.precision == 0.0);
    CHECK_THROWS_AS(agreement_from_counts(0, 0, 0, 0), wec::InputError);
}

TEST_CASE("agreement over verdict maps is symmetric in kappa and checks task ids") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<TaskId, Verdict> a, b;
        std::vector<int> la, lb;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const bool x = rng() % 2, y = rng() % 3 != 0;
            a[i] = x ? Verdict::valid : Verdict::rejected;
            b[i] = y ? Verdict::valid : Verdict::rejected;
            la.push_back(x);
            lb.push_back(y);
        }
        auto ab = agreement(a, b), ba = agreement(b, a);
        CHECK(std::abs(ab.cohen_kappa - ba.cohen_kappa) < 1e-12);
        CHECK(std::abs(ab.cohen_kappa - wec::oracle::kappa(la, lb)) < 1e-12);
        CHECK(ab.precision == ba.recall);
        CHECK(ab.cohen_kappa >= -1.0);
        CHECK(ab.cohen_kappa <= 1.0);
        CHECK(agreement(a, a).cohen_kappa == 1.0);
    }
    std::map<TaskId, Verdict> a{{1, Verdict::valid}}, b{{2, Verdict::valid}};
    CHECK_THROWS_AS(agreement(a, b), wec::InputError);
    b[1] = Verdict::valid;
    CHECK_THROWS_AS(agreement(a, b), wec::InputError);
}

TEST_CASE("task serving order") {
    Store empty(fresh_dir("empty"), {}, fixed_clock());
    CHECK_FALSE(empty.next_task("ann"));

    Store store(fresh_dir("order"), fixture_candidates(), fixed_clock());
    REQUIRE(store.task_count() == 10);
    // Dev before test, clusters contiguous, mention ids ascending.
    std::vector<std::pair<std::string, int>> seen;
    for (TaskId id = 0; id < 10; ++id) {
        auto t = store.task(id).task;
        seen.emplace_back(t.candidate.split, t.candidate.mention.cluster_id);
        if (id > 0) {
            auto prev = store.task(id - 1).task.candidate;
            if (prev.mention.cluster_id == t.candidate.mention.cluster_id)
                CHECK(prev.mention.mention_id < t.candidate.mention.mention_id);
        }
    }
    CHECK(std::is_sorted(seen.begin(), seen.end()));

    // Three tasks in play, one judged by the caller: the lower of the rest.
    store.submit(judge(1, "ann", true));
    CHECK(store.next_task("ann")->task.task_id == 0);
    store.submit(judge(0, "ann", true));
    CHECK(store.next_task("ann")->task.task_id == 2);
    CHECK(store.next_task("ann", std::string("test"))->task.task_id == 6);
    CHECK(store.task(0).status == TaskStatus::judged);
    CHECK(store.next_task("bob")->task.task_id == 0);
    CHECK(store.next_task("bob")->status == TaskStatus::judged);
    CHECK_THROWS_AS(store.task(10), UnknownTaskError);
}

TEST_CASE("two annotators interleaving see every task") {
    Store store(fresh_dir("two"), fixture_candidates(), fixed_clock());
    std::vector<TaskId> a_seen, b_seen;
    std::size_t pending_before = store.progress()["pending"];
    for (int step = 0; step < 20; ++step) {
        const std::string who = step % 2 ? "bob" : "ann";
        auto t = store.next_task(who);
        REQUIRE(t);
        (step % 2 ? b_seen : a_seen).push_back(t->task.task_id);
        store.submit(judge(t->task.task_id, who, t->task.task_id % 3 != 0));
        std::size_t pending = store.progress()["pending"];
        CHECK(pending <= pending_before);
        pending_before = pending;
    }
    CHECK_FALSE(store.next_task("ann"));
    CHECK_FALSE(store.next_task("bob"));
    CHECK(a_seen == std::vector<TaskId>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
    CHECK(b_seen == a_seen);
    auto p = store.progress();
    CHECK(p["judged"] == 10);
    CHECK(p["annotators"]["ann"] == 10);
    CHECK(p["splits"]["dev"]["total"] == 6);
}

TEST_CASE("submission rules, supersession and idempotency") {
    Store store(fresh_dir("submit"), fixture_candidates(), fixed_clock());
    CHECK_THROWS_AS(store.submit(judge(42, "ann", true)), UnknownTaskError);
    CHECK_THROWS_AS(store.submit(judge(1, "ann", false, std::nullopt)), wec::InputError);

    auto first = store.submit(judge(1, "ann", true));
    CHECK_FALSE(first.superseded);
    auto second = store.submit(judge(1, "ann", false, RejectReason::subevent));
    CHECK(second.superseded);
    CHECK(second.seq > first.seq);
    auto live = store.live_judgments();
    REQUIRE(live.size() == 1);
    CHECK(live[0].verdict == Verdict::rejected);
    CHECK(*live[0].reject_reason == RejectReason::subevent);
    CHECK(live[0].timestamp == "2026-01-01T00:00:00Z");

    auto keyed = judge(2, "ann", true);
    keyed.submission_key = "ann-2";
    auto k1 = store.submit(keyed);
    keyed.verdict = Verdict::rejected;
    keyed.reject_reason = RejectReason::other;
    auto k2 = store.submit(keyed);
    CHECK(k2.duplicate);
    CHECK(k2.seq == k1.seq);
    CHECK(store.effective_verdict(2) == Verdict::valid);

    // The consolidator overrides later annotator judgments.
    store.submit(judge(3, "consolidator", false, RejectReason::event_time));
    store.submit(judge(3, "ann", true));
    CHECK(store.effective_verdict(3) == Verdict::rejected);
    store.submit(judge(4, "ann", true));
    store.submit(judge(4, "bob", false, RejectReason::other));
    CHECK(store.effective_verdict(4) == Verdict::rejected);
    CHECK_FALSE(store.effective_verdict(5));
}

TEST_CASE("judgments survive a restart, a torn tail and compaction") {
    const auto dir = fresh_dir("durable");
    {
        Store store(dir, fixture_candidates(), fixed_clock());
        store.submit(judge(0, "ann", true));
        store.submit(judge(1, "ann", false, RejectReason::subevent));
        store.submit(judge(1, "ann", true));
        auto keyed = judge(2, "bob", true);
        keyed.submission_key = "b2";
        store.submit(keyed);
        // No compaction or clean shutdown work: the destructor only closes.
    }
    // Both judgments for task 1 stay in the log.
    std::size_t lines = 0;
    wec::util::read_jsonl(dir / "judgments.log", [&](const nlohmann::json &, std::size_t) { ++lines; });
    CHECK(lines == 4);
    std::ofstream(dir / "judgments.log", std::ios::app) << R"({"task_id":5,"annotator_id":"ann","ver)";
    {
        Store store(dir, fixture_candidates(), fixed_clock());
        CHECK(store.live_judgments().size() == 3);
        CHECK(store.effective_verdict(1) == Verdict::valid);
        auto again = judge(2, "bob", false, RejectReason::other);
        again.submission_key = "b2";
        CHECK(store.submit(again).duplicate);
        auto ack = store.submit(judge(5, "ann", true));
        CHECK(ack.seq == 5);
    }
    const std::string before_compaction = wec::util::read_file(dir / "judgments.log");
    {
        Store store(dir, fixture_candidates(), fixed_clock());
        CHECK(store.live_judgments().size() == 4);
        store.compact();
        CHECK(fs::file_size(dir / "judgments.log") == 0);
        store.submit(judge(6, "ann", true));
    }
    {
        Store store(dir, fixture_candidates(), fixed_clock());
        CHECK(store.live_judgments().size() == 5);
        auto again = judge(2, "bob", false, RejectReason::other);
        again.submission_key = "b2";
        CHECK(store.submit(again).duplicate);
    }
    // A crash between writing the snapshot and truncating the log replays
    // lines the snapshot already holds.
    {
        std::ofstream(dir / "judgments.log") << before_compaction;
        Store store(dir, fixture_candidates(), fixed_clock());
        CHECK(store.live_judgments().size() == 4);
        CHECK(store.submit(judge(7, "ann", true)).seq == 6);
    }
    // A store belongs to one candidate set.
    auto other = fixture_candidates();
    other.pop_back();
    CHECK_THROWS_AS(Store(dir, other, fixed_clock()), wec::InputError);
    auto practice = fixed_clock();
    practice.practice_mentions = {0};
    CHECK_THROWS_AS(Store(dir, fixture_candidates(), practice), wec::InputError);
}

TEST_CASE("export of the 10-candidate fixture with 2 rejections") {
    Store store(fresh_dir("export"), fixture_candidates(), fixed_clock());
    CHECK_THROWS_AS(store.export_validated("train", false), wec::InputError);
    try {
        store.export_validated("dev", false);
        FAIL("expected unjudged error");
    } catch (const UnjudgedTasksError &e) {
        CHECK(e.tasks.size() == 6);
    }
    for (TaskId id = 0; id < 10; ++id) {
        // Both mentions of the dev cluster 1 (tasks 4 and 5) are rejected.
        const bool reject = id == 4 || id == 5;
        store.submit(judge(id, "ann", !reject, id == 4 ? RejectReason::subevent : RejectReason::event_location));
    }
    auto dev = store.export_validated("dev", false);
    auto test = store.export_validated("test", false);
    CHECK(dev.accepted + test.accepted == 8);
    CHECK(dev.rejected == 2);
    REQUIRE(dev.split.chains.size() == 1);
    CHECK(dev.split.chains[0].cluster_id == 0);
    CHECK(dev.split.chains[0].pivot_title == "2010 Haiti earthquake");
    CHECK(test.split.chains.size() == 1);
    CHECK(test.split.mention_count() == 4);

    // Every exported mention has a valid effective verdict.
    for (const auto &m : wec::pipeline::flatten(dev.split.chains)) {
        bool found = false;
        for (TaskId id = 0; id < 10; ++id)
            if (store.task(id).task.candidate.mention.mention_id == m.mention_id) {
                CHECK(store.effective_verdict(id) == Verdict::valid);
                found = true;
            }
        CHECK(found);
    }

    // All valid: export equals the candidates.
    Store all(fresh_dir("export_all"), fixture_candidates(), fixed_clock());
    for (TaskId id = 0; id < 10; ++id)
        all.submit(judge(id, "ann", true));
    CHECK(all.export_validated("test", false).split.mention_count() == 4);
    CHECK(all.export_validated("dev", false).split.chains.size() == 2);
}

TEST_CASE("partial export and practice tasks") {
    auto opts = fixed_clock();
    opts.practice_mentions = {4, 6};
    Store store(fresh_dir("practice"), fixture_candidates(), opts);
    // Practice tasks come first.
    CHECK(store.task(0).task.practice);
    CHECK(store.task(0).task.candidate.mention.mention_id == 4);
    CHECK(store.task(1).task.candidate.mention.mention_id == 6);
    CHECK(store.next_task("ann")->task.practice);
    store.submit(judge(0, "ann", true));
    store.submit(judge(1, "ann", true));
    store.submit(judge(2, "ann", true));
    auto dev = store.export_validated("dev", true);
    CHECK(dev.accepted == 1);
    CHECK(dev.practice_excluded == 1);
    CHECK(dev.unjudged.size() == 4);
    CHECK(store.progress()["practice"]["judged"] == 2);
    opts.practice_mentions = {99};
    CHECK_THROWS_AS(Store(fresh_dir("practice_bad"), fixture_candidates(), opts), wec::InputError);
}

TEST_CASE("export purges leaked train articles") {
    const auto dir = fresh_dir("purge");
    Store store(dir / "store", fixture_candidates(), fixed_clock());
    for (TaskId id = 0; id < 10; ++id)
        store.submit(judge(id, "ann", id != 1, RejectReason::insufficient_context));
    auto train = wec::pipeline::read_split(kFixture / "train.jsonl", "train");
    REQUIRE(train.mention_count() == 6);
    auto s1 = write_export(dir / "out", store.export_validated("dev", false), train);
    CHECK(s1["train"]["mentions_after"] == 5); // Jacmel removed
    auto s2 = write_export(dir / "out", store.export_validated("test", false), train);
    CHECK(s2["train"]["mentions_after"] == 4); // Oslo removed as well

    std::set<std::string> eval_sources;
    for (const char *name : {"dev.jsonl", "test.jsonl"})
        for (const auto &m : wec::pipeline::read_mentions(dir / "out" / name))
            eval_sources.insert(m.source_title);
    CHECK(eval_sources.count("Port-au-Prince") == 0); // rejected, not a leak source
    for (const auto &m : wec::pipeline::read_mentions(dir / "out" / "train.jsonl"))
        CHECK(eval_sources.count(m.source_title) == 0);
}

TEST_CASE("agreement against the consolidator") {
    Store store(fresh_dir("agree"), fixture_candidates(), fixed_clock());
    for (TaskId id = 0; id < 10; ++id) {
        store.submit(judge(id, "consolidator", id % 4 != 0));
        if (id < 8)
            store.submit(judge(id, "ann", id % 4 != 0));
    }
    auto a = store.agreement_for("ann");
    CHECK(a.compared == 8);
    CHECK(a.only_consolidator == 2);
    REQUIRE(a.report);
    CHECK(a.report->precision == 1.0);
    CHECK(a.report->recall == 1.0);
    CHECK(a.report->cohen_kappa == 1.0);
    CHECK_FALSE(store.agreement_for("nobody").report);
    CHECK_THROWS_AS(store.agreement_for("consolidator"), wec::InputError);
}

TEST_CASE("HTTP API with two clients") {
    const auto dir = fresh_dir("http");
    Store store(dir / "store", fixture_candidates(), fixed_clock());
    ServiceOptions opts;
    opts.export_dir = dir / "exports";
    opts.train = wec::pipeline::read_split(kFixture / "train.jsonl", "train");
    Service service(store, opts);
    const int port = service.bind("127.0.0.1", 0);
    std::thread server([&] { service.listen(); });

    httplib::Client ann("127.0.0.1", port), bob("127.0.0.1", port);
    for (int i = 0; i < 50; ++i) {
        if (auto r = ann.Get("/progress"))
            break;
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }

    auto missing = ann.Get("/tasks/next");
    REQUIRE(missing);
    CHECK(missing->status == 400);
    CHECK(missing->get_header_value("Access-Control-Allow-Origin") == "*");
    auto preflight = ann.Options("/judgments");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    auto export_early = ann.Post("/export?split=dev", "", "application/json");
    REQUIRE(export_early);
    CHECK(export_early->status == 409);
    CHECK(nlohmann::json::parse(export_early->body)["tasks"].size() == 6);

    for (int step = 0; step < 20; ++step) {
        auto &client = step % 2 ? bob : ann;
        const std::string who = step % 2 ? "bob" : "ann";
        auto r = client.Get("/tasks/next?annotator=" + who);
        REQUIRE(r);
        REQUIRE(r->status == 200);
        const auto task = nlohmann::json::parse(r->body);
        const TaskId id = task["task_id"];
        CHECK(task["mention"]["tokens"].is_array());
        nlohmann::json body{{"task_id", id}, {"annotator_id", who}, {"verdict", "valid"}};
        if (id == 4 || id == 5) {
            body["verdict"] = "rejected";
            body["reject_reason"] = "subevent";
        }
        auto ack = client.Post("/judgments", body.dump(), "application/json");
        REQUIRE(ack);
        CHECK(ack->status == 200);
        CHECK(nlohmann::json::parse(ack->body)["acknowledged"] == true);
    }
    auto done = ann.Get("/tasks/next?annotator=ann");
    REQUIRE(done);
    CHECK(done->status == 204);

    auto unknown = ann.Post("/judgments", R"({"task_id":99,"annotator_id":"ann","verdict":"valid"})",
                            "application/json");
    CHECK(unknown->status == 404);
    auto no_reason = ann.Post("/judgments", R"({"task_id":1,"annotator_id":"ann","verdict":"rejected"})",
                              "application/json");
    CHECK(no_reason->status == 400);
    auto garbage = ann.Post("/judgments", "{not json", "application/json");
    CHECK(garbage->status == 400);
    CHECK(ann.Get("/tasks/3")->status == 200);
    CHECK(ann.Get("/tasks/30")->status == 404);

    auto progress = nlohmann::json::parse(bob.Get("/progress")->body);
    CHECK(progress["judged"] == 10);
    CHECK(progress["annotators"]["bob"] == 10);

    for (TaskId id = 0; id < 10; ++id) {
        nlohmann::json body{{"task_id", id}, {"annotator_id", "consolidator"}, {"verdict", "valid"}};
        if (id == 4 || id == 5 || id == 9) {
            body["verdict"] = "rejected";
            body["reject_reason"] = "other";
        }
        ann.Post("/judgments", body.dump(), "application/json");
    }
    auto agree = nlohmann::json::parse(ann.Get("/agreement?annotator=ann")->body);
    CHECK(agree["compared"] == 10);
    CHECK(agree["report"]["confusion"]["false_positive"] == 1);

    auto exported = ann.Post("/export?split=dev", "", "application/json");
    REQUIRE(exported);
    CHECK(exported->status == 200);
    auto summary = nlohmann::json::parse(exported->body);
    CHECK(summary["mentions"] == 4);
    CHECK(summary["train"]["mentions_after"] == 5);
    CHECK(fs::exists(dir / "exports" / "dev.jsonl"));
    CHECK(ann.Post("/export?split=test", "", "application/json")->status == 200);
    CHECK(wec::pipeline::read_mentions(dir / "exports" / "test.jsonl").size() == 3);

    service.stop();
    server.join();
}
