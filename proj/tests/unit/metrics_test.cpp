#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/metrics/assignment.h"
#include "wec/metrics/formats.h"
#include "wec/metrics/metrics.h"
#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "oracles/oracles.h"

using namespace wec::metrics;
using wec::oracle::random_partition;

namespace {

const std::string kScorerCases = std::string(WEC_FIXTURES) + "/scorer";

Partition P(std::vector<std::vector<MentionId>> clusters) { return Partition(std::move(clusters)); }

void check_close(const MetricScore &got, double r, double p, double eps = 1e-12) {
    CHECK(got.recall == doctest::Approx(r).epsilon(eps));
    CHECK(got.precision == doctest::Approx(p).epsilon(eps));
    CHECK(std::abs(got.recall - r) <= eps);
    CHECK(std::abs(got.precision - p) <= eps);
}

} // namespace

TEST_CASE("partition validation") {
    CHECK_THROWS_AS(P({{1, 2}, {}}), wec::InputError);
    CHECK_THROWS_AS(P({{1, 2}, {2, 3}}), wec::InputError);
    CHECK(P({{3, 1}, {2}}).universe() == std::vector<MentionId>{1, 2, 3});
    CHECK(P({}).size() == 0);
}

TEST_CASE("MUC examples") {
    auto same = muc(P({{1, 2, 3}, {4}}), P({{1, 2, 3}, {4}}));
    check_close(same, 1, 1);
    CHECK(same.f1 == 1.0);

    auto split = muc(P({{1, 2, 3}}), P({{1, 2}, {3}}));
    check_close(split, 0.5, 1.0);
    CHECK(split.f1 == doctest::Approx(2.0 / 3.0));

    auto singletons = muc(P({{1, 2, 3}}), P({{1}, {2}, {3}}));
    CHECK(singletons.recall == 0.0);
    CHECK(singletons.precision == 0.0);
    CHECK(singletons.precision_undefined);
    CHECK_FALSE(singletons.recall_undefined);

    auto no_key_links = muc(P({{1}, {2}}), P({{1, 2}}));
    CHECK(no_key_links.recall == 0.0);
    CHECK(no_key_links.recall_undefined);
    CHECK(no_key_links.f1 == 0.0);
}

TEST_CASE("B-cubed examples") {
    check_close(b_cubed(P({{1, 2}, {3}}), P({{1, 2}, {3}})), 1, 1);
    auto split = b_cubed(P({{1, 2, 3}}), P({{1, 2}, {3}}));
    check_close(split, 5.0 / 9.0, 1.0);
    check_close(b_cubed(P({{7}}), P({{7}})), 1, 1);
}

TEST_CASE("CEAF-e examples") {
    check_close(ceaf_e(P({{1, 2}, {3}}), P({{1, 2}, {3}})), 1, 1);
    // phi4({1,2},{1}) + phi4({3},{2,3}) = 2/3 + 2/3 beats the crossed
    // alignment phi4({1,2},{2,3}) = 1/2, so R = P = (4/3) / 2.
    check_close(ceaf_e(P({{1, 2}, {3}}), P({{1}, {2, 3}})), 2.0 / 3.0, 2.0 / 3.0);

    auto empty = ceaf_e(P({{1, 2}}), P({}));
    CHECK(empty.recall == 0);
    CHECK(empty.precision == 0);
    CHECK(empty.f1 == 0);
    CHECK(empty.precision_undefined);

    for (int n = 1; n <= 6; ++n) {
        std::vector<std::vector<MentionId>> singles, giant(1);
        for (int i = 0; i < n; ++i) {
            singles.push_back({i});
            giant[0].push_back(i);
        }
        const auto got = ceaf_e(P(singles), P(giant));
        const auto want = wec::oracle::ceaf_e(P(singles), P(giant));
        check_close(got, want.recall, want.precision);
        CHECK(got.precision == doctest::Approx(2.0 / (1 + n)));
    }
}

TEST_CASE("CoNLL arithmetic reproduces the published rows") {
    CHECK(format_percent(conll_f1(0.807, 0.602, 0.459)) == "62.3");
    CHECK(format_percent(conll_f1(0.781, 0.778, 0.736)) == "76.5");
    auto one = conll({1, 1, 1}, {1, 1, 1}, {1, 1, 1});
    CHECK(one.conll_f1 == 1.0);
    CHECK(f1_score(0, 0) == 0);
    CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("evaluate bundles the metrics and rejects universe mismatches") {
    auto key = P({{1, 2, 3}, {4, 5}});
    auto r = evaluate(key, key);
    CHECK(r.conll_f1 == 1.0);
    const std::string table = format_table(r);
    CHECK(table.find("100.0") != std::string::npos);
    CHECK(table.find("CEAF-e") != std::string::npos);
    auto j = to_json(r);
    CHECK(j["muc"]["f1"] == 1.0);
    CHECK(j["conll_f1"] == 1.0);

    CHECK_THROWS_AS(evaluate(key, P({{1, 2, 3}, {4}})), wec::InputError);
    CHECK_THROWS_AS(evaluate(key, P({{1, 2, 3}, {4, 5, 6}})), wec::InputError);
}

TEST_CASE("assignment solver matches exhaustive search") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
        std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
        for (auto &row : w)
            for (auto &x : row)
                x = (rng() % 4 == 0) ? 0.0 : (trial % 2 ? u(rng) : double(rng() % 4) / 4.0);
        const auto a = max_weight_assignment(w);
        CHECK(std::abs(a.total - wec::oracle::best_alignment(w)) <= 1e-12);
        std::set<long> cols_used;
        std::size_t matched = 0;
        double total = 0;
        for (std::size_t i = 0; i < rows; ++i) {
            if (a.row_to_col[i] < 0)
                continue;
            ++matched;
            CHECK(cols_used.insert(a.row_to_col[i]).second);
            total += w[i][a.row_to_col[i]];
        }
        CHECK(matched == std::min(rows, cols));
        CHECK(total == doctest::Approx(a.total));
    }
    CHECK(max_weight_assignment({}).total == 0);
    CHECK_THROWS_AS(max_weight_assignment({{1, 2}, {3}}), wec::ContractError);
}

TEST_CASE("metrics equal brute-force oracles on 1000 random pairs") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        const auto key = random_partition(rng, n), response = random_partition(rng, n);

        const auto m = muc(key, response);
        const auto mr = wec::oracle::muc_side(key, response), mp = wec::oracle::muc_side(response, key);
        CHECK(std::abs(m.recall - mr.first) <= 1e-12);
        CHECK(std::abs(m.precision - mp.first) <= 1e-12);
        CHECK(m.recall_undefined == mr.second);
        CHECK(m.precision_undefined == mp.second);

        const auto b = b_cubed(key, response);
        CHECK(std::abs(b.recall - wec::oracle::b3_side(key, response)) <= 1e-12);
        CHECK(std::abs(b.precision - wec::oracle::b3_side(response, key)) <= 1e-12);

        const auto c = ceaf_e(key, response), co = wec::oracle::ceaf_e(key, response);
        CHECK(std::abs(c.recall - co.recall) <= 1e-12);
        CHECK(std::abs(c.precision - co.precision) <= 1e-12);

        // Symmetry: swapping roles swaps recall and precision.
        for (auto [fwd, rev] : {std::pair{m, muc(response, key)}, std::pair{b, b_cubed(response, key)},
                                std::pair{c, ceaf_e(response, key)}}) {
            CHECK(std::abs(fwd.recall - rev.precision) <= 1e-12);
            CHECK(std::abs(fwd.precision - rev.recall) <= 1e-12);
        }

        // Relabelling: permuted cluster order and renamed mention ids.
        auto relabel = [&](const Partition &p) {
            auto clusters = p.clusters();
            std::shuffle(clusters.begin(), clusters.end(), rng);
            for (auto &cl : clusters) {
                std::reverse(cl.begin(), cl.end());
                for (auto &id : cl)
                    id = id * 7 + 100;
            }
            return P(clusters);
        };
        const auto r2 = evaluate(relabel(key), relabel(response));
        const auto r1 = evaluate(key, response);
        CHECK(std::abs(r1.conll_f1 - r2.conll_f1) <= 1e-12);

        for (double v : {m.recall, m.precision, m.f1, b.recall, b.precision, b.f1, c.recall, c.precision, c.f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-15);
        }
        const auto self = evaluate(key, key);
        CHECK(self.b_cubed.f1 == doctest::Approx(1.0));
        CHECK(self.ceaf_e.f1 == doctest::Approx(1.0));
        if (key.size() < static_cast<std::size_t>(n))
            CHECK(self.muc.f1 == doctest::Approx(1.0));
    }
}

TEST_CASE("CoNLL reader handles multi-token, nested and multi-document input") {
    std::istringstream in("#begin document (a); part 000\n"
                          "a 0 0 The (1\n"
                          "a 0 1 quake 1)|(2)\n"
                          "\n"
                          "a 0 2 hit -\n"
                          "a 0 3 it (1)\n"
                          "#end document\n"
                          "#begin document (b); part 000\n"
                          "b 0 0 It (1)\n"
                          "#end document\n");
    const auto mentions = read_conll(in);
    REQUIRE(mentions.size() == 4);
    const auto ids = conll_mention_ids(mentions);
    const auto p = conll_partition(mentions, ids);
    CHECK(p.size() == 3); // (a,1) with two spans, (a,2), (b,1)
    CHECK(p.mention_count() == 4);

    auto bad = [](const std::string &text) {
        std::istringstream s(text);
        return read_conll(s);
    };
    CHECK_THROWS_AS(bad("#begin document (a); part 000\na 0 0 x (1\n#end document\n"), wec::InputError);
    CHECK_THROWS_AS(bad("#begin document (a); part 000\na 0 0 x 1)\n#end document\n"), wec::InputError);
    CHECK_THROWS_AS(bad("#begin document (a); part 000\na 0 0 x (q)\n#end document\n"), wec::InputError);
    CHECK_THROWS_AS(bad("a 0 0 x (1)\n"), wec::InputError);
    CHECK_THROWS_AS(bad("#begin document (a); part 000\na 0 0 x (1)\n"), wec::InputError);
}

TEST_CASE("native and CoNLL forms convert losslessly") {
    const auto dir = std::filesystem::temp_directory_path() / "wec_metrics_test";
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_partition(rng, 1 + static_cast<int>(rng() % 12));
        std::vector<std::vector<MentionId>> shifted = p.clusters();
        for (auto &c : shifted)
            for (auto &id : c)
                id = id * 3 + 5;
        p = P(shifted);

        write_clustering(dir / "p.jsonl", p);
        CHECK(canonical(read_clustering(dir / "p.jsonl")).clusters() == canonical(p).clusters());
        {
            std::ofstream out(dir / "p.conll");
            write_conll(out, p);
        }
        const auto mentions = read_conll(dir / "p.conll");
        CHECK(canonical(conll_partition(mentions, conll_mention_ids(mentions))).clusters() == canonical(p).clusters());
        CHECK(detect_format(dir / "p.conll") == ClusteringFormat::conll);
        CHECK(detect_format(dir / "p.jsonl") == ClusteringFormat::jsonl);

        auto [k, r] = read_key_response(dir / "p.jsonl", dir / "p.conll");
        const auto report = evaluate(k, r);
        CHECK(report.b_cubed.f1 == doctest::Approx(1.0));
        CHECK(report.ceaf_e.f1 == doctest::Approx(1.0));
        // MUC has no links to count when every cluster is a singleton.
        CHECK(report.muc.f1 == doctest::Approx(p.size() < p.mention_count() ? 1.0 : 0.0));
    }
    std::ofstream(dir / "dup.jsonl") << "{\"mention_id\":1,\"cluster_id\":0}\n{\"mention_id\":1,\"cluster_id\":2}\n";
    CHECK_THROWS_AS(read_clustering(dir / "dup.jsonl"), wec::InputError);
}

TEST_CASE("scores equal the recorded reference-scorer outputs on 20 cases") {
    const auto expected = nlohmann::json::parse(wec::util::read_file(kScorerCases + "/expected.json"));
    REQUIRE(expected.size() == 20);
    auto two_decimals = [](double x) { return std::round(x * 10000.0) / 100.0; };
    for (const auto &[stem, row] : expected.items()) {
        CAPTURE(stem);
        const auto [key, response] =
            read_key_response(kScorerCases + "/" + stem + ".key.conll", kScorerCases + "/" + stem + ".response.conll");
        const auto report = evaluate(key, response);
        const std::pair<const char *, MetricScore> metrics[] = {
            {"muc", report.muc}, {"b_cubed", report.b_cubed}, {"ceaf_e", report.ceaf_e}};
        for (const auto &[name, score] : metrics) {
            CAPTURE(name);
            CHECK(two_decimals(score.recall) == two_decimals(row[name]["recall"].get<double>()));
            CHECK(two_decimals(score.precision) == two_decimals(row[name]["precision"].get<double>()));
            CHECK(two_decimals(score.f1) == two_decimals(row[name]["f1"].get<double>()));
            // The recorded values are also met at full precision.
            CHECK(std::abs(score.f1 - row[name]["f1"].get<double>()) <= 1e-9);
        }
        CHECK(two_decimals(report.conll_f1) == two_decimals(row["conll_f1"].get<double>()));
    }
}
