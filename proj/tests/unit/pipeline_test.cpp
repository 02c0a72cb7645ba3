#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wec/pipeline/dataset_io.h"
#include "wec/pipeline/extract.h"
#include "wec/pipeline/filters.h"
#include "wec/pipeline/mentions.h"
#include "wec/pipeline/pivots.h"
#include "wec/pipeline/splits.h"
#include "wec/pipeline/tokenize.h"
#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/util/log.h"
#include "wec/util/random.h"
#include "wec/util/utf8.h"
#include "wec/wikitext/dump_reader.h"
#include "wec/wikitext/page_parser.h"
#include "oracles/oracles.h"

using namespace wec::pipeline;
using wec::wikitext::InternalLink;
using wec::wikitext::Paragraph;
using wec::wikitext::ParsedPage;
using wec::wikitext::Span;

namespace {

const std::string kFixtures = WEC_FIXTURES;

std::vector<std::string> texts(const std::vector<Token> &tokens) {
    std::vector<std::string> out;
    for (const auto &t : tokens)
        out.push_back(t.text);
    return out;
}

/// A mention over `paragraph` whose anchor is the first occurrence of `anchor`.
Mention make_mention(std::int64_t id, const std::string &source, const std::string &paragraph,
                     const std::string &anchor, int cluster = 0, std::size_t paragraph_index = 0) {
    const std::size_t begin = paragraph.find(anchor);
    REQUIRE(begin != std::string::npos);
    const Span span{begin, begin + anchor.size()};
    const auto tokens = tokenize(paragraph, {span.begin, span.end});
    Mention m;
    m.mention_id = id;
    m.tokens = texts(tokens);
    m.first = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].span.begin >= span.begin && tokens[i].span.end <= span.end) {
            m.first = std::min(m.first, i);
            m.last = i;
        }
    }
    m.mention_text = detokenize(m.tokens, m.first, m.last);
    m.source_title = source;
    m.target_title = "Pivot " + std::to_string(cluster);
    m.cluster_id = cluster;
    m.origin = {paragraph_index, span, std::make_shared<const std::string>(paragraph)};
    return m;
}

/// A mention carrying only what the diversity cap and split code look at.
Mention bare_mention(std::int64_t id, int cluster, const std::string &text, const std::string &source = "S") {
    Mention m;
    m.mention_id = id;
    m.tokens = {text};
    m.mention_text = text;
    m.source_title = source;
    m.target_title = "Pivot " + std::to_string(cluster);
    m.cluster_id = cluster;
    return m;
}

ParsedPage page_with_links(const std::string &title, const std::string &text,
                           const std::vector<std::pair<std::string, std::string>> &links, bool boilerplate = false) {
    ParsedPage page;
    page.title = title;
    page.paragraphs.push_back({text, {0, text.size()}, boilerplate});
    std::size_t from = 0;
    for (const auto &[target, anchor] : links) {
        const std::size_t at = text.find(anchor, from);
        REQUIRE(at != std::string::npos);
        page.links.push_back({target, anchor, 0, {at, at + anchor.size()}});
        from = at + anchor.size();
    }
    return page;
}

EventRegistry registry_of(const std::vector<std::string> &titles) {
    EventRegistry r;
    std::vector<std::string> sorted = titles;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        r.pivots[sorted[i]] = {static_cast<int>(i), "earthquake"};
    return r;
}

StreamOpener fixture_dump() {
    return [] { return std::make_unique<std::ifstream>(kFixtures + "/dump20.xml"); };
}

ExtractConfig fixture_config() {
    ExtractConfig config;
    config.allowlist = load_allowlist(kFixtures + "/allowlist.txt");
    config.n_eval_clusters = 2;
    config.seed = 7;
    return config;
}

NerIndex fixture_ner() {
    NerIndex ner;
    ner.load(kFixtures + "/ner.jsonl");
    return ner;
}

std::filesystem::path temp_dir(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("wec_pipeline_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("tokenize splits punctuation and keeps word-internal joiners") {
    CHECK(texts(tokenize("The 2001 ACC Men's Basketball Tournament, held in U.S. arenas."))
          == std::vector<std::string>{"The", "2001", "ACC", "Men's", "Basketball", "Tournament", ",", "held", "in",
                                      "U.S", ".", "arenas", "."});
    CHECK(texts(tokenize("about 1,000 people (al-Qaeda) \"quoted\"")) ==
          std::vector<std::string>{"about", "1,000", "people", "(", "al-Qaeda", ")", "\"", "quoted", "\""});
    CHECK(texts(tokenize("a - b -- c")) == std::vector<std::string>{"a", "-", "b", "-", "-", "c"});
    // No-break space and em space are whitespace.
    CHECK(texts(tokenize("Léogâne town rebuilt")) ==
          std::vector<std::string>{"Léogâne", "town", "rebuilt"});
    CHECK(tokenize("").empty());
    CHECK(tokenize(" \t\n").empty());
}

TEST_CASE("tokenize forces boundaries and reports exact byte spans") {
    const std::string text = "the Oslo-bombing aftermath";
    auto plain = texts(tokenize(text));
    CHECK(plain == std::vector<std::string>{"the", "Oslo-bombing", "aftermath"});
    auto forced = texts(tokenize(text, {4, 8}));
    CHECK(forced == std::vector<std::string>{"the", "Oslo", "-", "bombing", "aftermath"});

    std::mt19937_64 rng(3);
    const std::string alphabet[] = {"a", "b", "Z", "9", " ", ",", ".", "'", "-", "(", "é", " ", "!"};
    for (int trial = 0; trial < 500; ++trial) {
        std::string s;
        const int n = static_cast<int>(rng() % 30);
        for (int i = 0; i < n; ++i)
            s += alphabet[rng() % std::size(alphabet)];
        std::vector<std::size_t> bounds;
        for (std::size_t p = 0; p <= s.size(); ++p)
            if (rng() % 7 == 0 && (p == s.size() || (static_cast<unsigned char>(s[p]) & 0xC0) != 0x80))
                bounds.push_back(p);
        const auto tokens = tokenize(s, bounds);
        std::size_t prev_end = 0;
        for (const auto &t : tokens) {
            CHECK(s.substr(t.span.begin, t.span.size()) == t.text);
            CHECK(t.span.begin >= prev_end);
            CHECK(!t.text.empty());
            prev_end = t.span.end;
            for (std::size_t b : bounds)
                CHECK_FALSE((b > t.span.begin && b < t.span.end));
        }
    }
}

TEST_CASE("detokenize attaches closing and opening punctuation") {
    const std::vector<std::string> t{"the", "(", "2010", ")", "earthquake", ",", "which", "killed", "many", "."};
    CHECK(detokenize(t) == "the (2010) earthquake, which killed many.");
    CHECK(detokenize(t, 4, 4) == "earthquake");
    CHECK(detokenize(t, 1, 3) == "(2010)");
    CHECK_THROWS_AS(detokenize(t, 3, 2), wec::ContractError);
    CHECK_THROWS_AS(detokenize(t, 0, 10), wec::ContractError);
}

TEST_CASE("allowlist parsing normalises entries and skips comments") {
    auto list = parse_allowlist("# comment\nEarthquake\n\n  Civilian_Attack  # trailing\nSolar   eclipse\n");
    CHECK(list == Allowlist{"civilian attack", "earthquake", "solar eclipse"});
    CHECK(load_allowlist(kFixtures + "/allowlist.txt") == Allowlist{"awards", "civilian attack", "earthquake"});

    const auto english = load_allowlist(std::filesystem::path(kFixtures) / ".." / ".." / "config" / "allowlist_en.txt");
    CHECK(english.size() == 28);
    CHECK(english.count("earthquake"));
    CHECK(english.count("civilian attack"));

    auto dir = temp_dir("allowlist");
    std::ofstream(dir / "empty.txt") << "# nothing\n";
    CHECK_THROWS_AS(load_allowlist(dir / "empty.txt"), wec::InputError);
}

TEST_CASE("collect_pivots keeps allowed infobox pages with sorted dense ids") {
    std::vector<ParsedPage> pages(5);
    const char *titles[] = {"Zeta flood", "Alpha", "Mid earthquake", "Beta", "Gamma"};
    const std::optional<std::string> types[] = {"flood", "settlement", "earthquake", std::nullopt, "person"};
    for (int i = 0; i < 5; ++i) {
        pages[i].title = titles[i];
        pages[i].infobox_type = types[i];
    }
    auto registry = collect_pivots(pages, {"earthquake", "flood"});
    REQUIRE(registry.size() == 2);
    CHECK(registry.find("Mid earthquake")->cluster_id == 0);
    CHECK(registry.find("Zeta flood")->cluster_id == 1);
    CHECK(registry.find("Zeta flood")->infobox_type == "flood");
    CHECK(registry.titles_by_cluster() == std::vector<std::string>{"Mid earthquake", "Zeta flood"});

    CHECK(collect_pivots({}, {"earthquake"}).empty());
    CHECK_THROWS_AS(collect_pivots(pages, {}), wec::ContractError);
    CHECK_THROWS_AS(collect_pivots(pages, {"Earthquake"}), wec::ContractError);
}

TEST_CASE("collect_mentions maps pivot links to mentions") {
    const auto registry = registry_of({"Great Fire", "Big Quake"});
    wec::wikitext::RedirectMap redirects{{"The Fire", "Great Fire"}};

    SUBCASE("two pivot links and one ordinary link") {
        auto page = page_with_links("Town", "The town burned in the fire and again in the blaze while the mayor was away.",
                                    {{"Great Fire", "fire"}, {"Great Fire", "the blaze"}, {"Mayor", "mayor"}});
        auto mentions = collect_mentions({page}, registry, redirects);
        REQUIRE(mentions.size() == 2);
        for (const auto &m : mentions) {
            CHECK(m.cluster_id == registry.find("Great Fire")->cluster_id);
            CHECK(m.target_title == "Great Fire");
            CHECK(m.source_title == "Town");
            CHECK(m.metadata.source_url == "https://en.wikipedia.org/wiki/Town");
            CHECK(m.metadata.target_url == "https://en.wikipedia.org/wiki/Great_Fire");
            CHECK(m.metadata.infobox_type == "earthquake");
            CHECK(m.mention_text == detokenize(m.tokens, m.first, m.last));
        }
        CHECK(mentions[0].mention_text == "fire");
        CHECK(mentions[1].mention_text == "the blaze");
        CHECK(mentions[0].mention_id == 0);
        CHECK(mentions[1].mention_id == 1);
    }
    SUBCASE("boilerplate paragraph yields nothing") {
        auto page = page_with_links("Town", "Year Event 1666 fire in the city", {{"Great Fire", "fire"}}, true);
        CHECK(collect_mentions({page}, registry, redirects).empty());
    }
    SUBCASE("page without links yields nothing") {
        auto page = page_with_links("Town", "Nothing links anywhere here.", {});
        CHECK(collect_mentions({page}, registry, redirects).empty());
    }
    SUBCASE("a pivot never mentions itself, other pivots are kept") {
        auto page = page_with_links("Great Fire", "The Great Fire followed the fire of the quake by a year in the city.",
                                    {{"Great Fire", "Great Fire"}, {"The Fire", "fire"}, {"Big Quake", "the quake"}});
        auto mentions = collect_mentions({page}, registry, redirects);
        REQUIRE(mentions.size() == 1);
        CHECK(mentions[0].target_title == "Big Quake");
    }
    SUBCASE("redirects are followed unless disabled") {
        auto page = page_with_links("Town", "The town burned in the fire of that famous long summer.", {{"The Fire", "fire"}});
        CHECK(collect_mentions({page}, registry, redirects).size() == 1);
        MentionConfig no_redirects;
        no_redirects.follow_redirects = false;
        CHECK(collect_mentions({page}, registry, redirects, no_redirects).empty());
    }
    SUBCASE("links with offsets outside the paragraph are dropped with a diagnostic") {
        auto page = page_with_links("Town", "The town burned in the fire of that famous long summer.", {{"Great Fire", "fire"}});
        page.links.push_back({"Great Fire", "ghost", 0, {50, 90}});
        page.links.push_back({"Great Fire", "ghost", 4, {0, 3}});
        std::vector<nlohmann::json> records;
        wec::log::ScopedSink sink([&](const nlohmann::json &r) { records.push_back(r); });
        std::size_t dropped = 0;
        auto mentions = collect_mentions({page}, registry, redirects, {}, 1, &dropped);
        CHECK(mentions.size() == 1);
        CHECK(dropped == 2);
        CHECK(std::count_if(records.begin(), records.end(),
                            [](const auto &r) { return r["event"] == "mention_dropped"; }) == 2);
    }
}

TEST_CASE("mention ids follow corpus order regardless of input order or workers") {
    const auto registry = registry_of({"Great Fire"});
    std::vector<ParsedPage> pages;
    for (int i = 0; i < 40; ++i)
        pages.push_back(page_with_links("Page " + std::to_string((i * 17) % 40),
                                        "Residents remember the fire and the fire again every single year.",
                                        {{"Great Fire", "fire"}, {"Great Fire", "fire"}}));
    auto one = collect_mentions(pages, registry, {}, {}, 1);
    std::reverse(pages.begin(), pages.end());
    auto many = collect_mentions(pages, registry, {}, {}, 6);
    REQUIRE(one.size() == 80);
    REQUIRE(many.size() == one.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].mention_id == static_cast<std::int64_t>(i));
        CHECK(to_json(one[i]) == to_json(many[i]));
    }
    for (std::size_t i = 1; i < one.size(); ++i)
        CHECK(one[i - 1].source_title <= one[i].source_title);
}

TEST_CASE("context filter threshold") {
    auto four = make_mention(0, "A", "one two three four the quake", "the quake");
    auto five = make_mention(1, "B", "one two three four five the quake", "the quake");
    auto none = make_mention(2, "C", "See the earthquake.", "the earthquake");
    auto result = filter_lacking_context({four, five, none});
    REQUIRE(result.kept.size() == 1);
    CHECK(result.kept[0].mention_id == 1);
    CHECK(result.removed.size() == 2);
    CHECK(filter_lacking_context({four}, 4).kept.size() == 1);
}

TEST_CASE("boilerplate-code filter") {
    auto html = make_mention(0, "A", "his pages contained <div class=\"x\">text</div> around the attacks here", "the attacks");
    auto json = make_mention(1, "B", "the payload {\"event\": \"attack\"} mentioned the attacks in passing", "the attacks");
    auto plain = make_mention(2, "C", "prices rose < 5 percent after the attacks in the city", "the attacks");
    auto lone = make_mention(3, "D", "a stray <br> tag near the attacks was left in the text", "the attacks");
    auto result = filter_boilerplate_code({html, json, plain, lone});
    std::set<std::int64_t> removed;
    for (const auto &m : result.removed)
        removed.insert(m.mention_id);
    CHECK(removed == std::set<std::int64_t>{0, 1});
    CHECK(result.kept.size() == 2);

    CHECK(filter_boilerplate_code({plain}, {"percent"}).removed.size() == 1);
    CHECK_THROWS_AS(filter_boilerplate_code({plain}, {"(unclosed"}), wec::InputError);
}

TEST_CASE("filter_by_ner removes mentions covered by blocked labels") {
    std::vector<Mention> mentions;
    const std::string context = " was remembered by many people in the town for years after";
    const std::vector<std::string> anchors{"the fire",   "July 1755", "Paris",       "the flood",  "fatal fire",
                                           "the quake",  "Lisbon",    "the storm",   "the crash",  "the riot"};
    for (std::size_t i = 0; i < anchors.size(); ++i)
        mentions.push_back(make_mention(static_cast<std::int64_t>(i), "Doc " + std::to_string(i),
                                        anchors[i] + context, anchors[i]));
    NerIndex ner;
    ner.add({"Doc 1", 0, {0, 9}, "DATE"});         // July 1755: full cover
    ner.add({"Doc 2", 0, {0, 5}, "GPE"});          // Paris
    ner.add({"Doc 6", 0, {0, 6}, "LOC"});          // Lisbon
    ner.add({"Doc 3", 0, {0, 9}, "EVENT"});        // not a blocked label
    ner.add({"Doc 5", 0, {4, 8}, "PERSON"});       // "quak" is 4 of 9 bytes
    ner.add({"Doc 7", 2, {0, 9}, "DATE"});         // other paragraphs of tagged pages
    ner.add({"Doc 8", 3, {0, 9}, "DATE"});
    ner.add({"Nowhere", 0, {0, 3}, "GPE"});

    std::vector<nlohmann::json> records;
    wec::log::ScopedSink sink([&](const nlohmann::json &r) { records.push_back(r); });
    NerFilterStats stats;
    auto result = filter_by_ner(mentions, ner, default_blocked_labels(), kDefaultNerCoverage, &stats);
    CHECK(result.kept.size() == 7);
    std::set<std::string> removed;
    for (const auto &m : result.removed)
        removed.insert(m.mention_text);
    CHECK(removed == std::set<std::string>{"July 1755", "Paris", "Lisbon"});
    CHECK(stats.unknown_document_annotations == 1);
    CHECK(std::any_of(records.begin(), records.end(),
                      [](const auto &r) { return r["event"] == "ner_unknown_documents"; }));

    // Exactly half the anchor bytes is enough.
    NerIndex half;
    half.add({"Doc 0", 0, {4, 8}, "NORP"}); // "fire" in "the fire"
    CHECK(filter_by_ner({mentions[0]}, half).removed.size() == 1);
    NerIndex under;
    under.add({"Doc 0", 0, {5, 8}, "NORP"});
    CHECK(filter_by_ner({mentions[0]}, under).removed.empty());
    CHECK(filter_by_ner({mentions[4]}, ner).kept.size() == 1); // "fatal fire" untagged

    CHECK(default_blocked_labels() == std::set<std::string>{"PERSON", "GPE", "LOC", "DATE", "NORP"});
    CHECK_THROWS_AS(ner.add({"Doc", 0, {0, 3}, "CITY"}), wec::InputError);
    CHECK_THROWS_AS(ner.add({"Doc", 0, {3, 3}, "GPE"}), wec::InputError);
}

TEST_CASE("NE annotations load from newline-delimited records") {
    auto ner = fixture_ner();
    CHECK(ner.size() == 12);
    REQUIRE(ner.lookup("Oslo", 1));
    CHECK(ner.lookup("Oslo", 1)->at(0).label == "DATE");
    CHECK(ner.lookup("Oslo", 7) == nullptr);

    auto dir = temp_dir("ner");
    std::ofstream(dir / "bad.jsonl") << "{\"source_title\":\"A\",\"paragraph_index\":0,\"char_start\":0,\"char_end\":2,"
                                        "\"label\":\"GPE\"}\n{\"source_title\":\"A\",\"paragraph_index\":0}\n";
    NerIndex bad;
    CHECK_THROWS_WITH_AS(bad.load(dir / "bad.jsonl"), doctest::Contains("bad.jsonl:2"), wec::InputError);
}

TEST_CASE("control_diversity examples") {
    auto chain_of = [](const std::vector<std::string> &strings) {
        CoreferenceChain c;
        for (std::size_t i = 0; i < strings.size(); ++i)
            c.mentions.push_back(bare_mention(static_cast<std::int64_t>(i), 0, strings[i]));
        return c;
    };
    auto surfaces = [](const CoreferenceChain &c) {
        std::vector<std::string> out;
        for (const auto &m : c.mentions)
            out.push_back(m.mention_text);
        return out;
    };

    auto oscars = control_diversity({chain_of(std::vector<std::string>(6, "the Oscars"))});
    CHECK(oscars[0].mentions.size() == 4);
    CHECK(oscars[0].mentions.back().mention_id == 3);

    auto four = chain_of(std::vector<std::string>(4, "the Oscars"));
    CHECK(surfaces(control_diversity({four})[0]) == surfaces(four));

    auto mixed = control_diversity({chain_of({"a", "a", "a", "a", "a", "b", "b"})});
    CHECK(surfaces(mixed[0]) == std::vector<std::string>{"a", "a", "a", "a", "b", "b"});

    auto folded = control_diversity({chain_of({"The Oscars", "the  oscars", "THE OSCARS", "the\toscars", "the oscars"})});
    CHECK(folded[0].mentions.size() == 4);

    CHECK(control_diversity({chain_of({"x", "x"})}, 1)[0].mentions.size() == 1);
    CHECK_THROWS_AS(control_diversity({}, 0), wec::ContractError);
}

TEST_CASE("control_diversity property: cap holds and survivors are the first seen") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pool{"the attack", "The Attack", "the  attack", "bombing", "Bombing", "massacre", "it"};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t cap = 1 + rng() % 5;
        std::vector<CoreferenceChain> chains(1 + rng() % 4);
        std::int64_t id = 0;
        for (std::size_t c = 0; c < chains.size(); ++c) {
            chains[c].cluster_id = static_cast<int>(c);
            const std::size_t n = rng() % 15;
            for (std::size_t i = 0; i < n; ++i)
                chains[c].mentions.push_back(bare_mention(id++, static_cast<int>(c), pool[rng() % pool.size()]));
        }
        const auto out = control_diversity(chains, cap);
        REQUIRE(out.size() == chains.size());
        for (std::size_t c = 0; c < chains.size(); ++c) {
            std::map<std::string, std::size_t> counts;
            for (const auto &m : out[c].mentions)
                CHECK(++counts[wec::utf8::normalize_surface(m.mention_text)] <= cap);
            std::vector<std::string> surfaces;
            for (const auto &m : chains[c].mentions)
                surfaces.push_back(m.mention_text);
            std::vector<std::int64_t> expected;
            for (std::size_t i : wec::oracle::diversity_survivors(surfaces, cap))
                expected.push_back(chains[c].mentions[i].mention_id);
            std::vector<std::int64_t> got;
            for (const auto &m : out[c].mentions)
                got.push_back(m.mention_id);
            CHECK(got == expected);
        }
    }
}

TEST_CASE("make_splits draws eval clusters reproducibly") {
    std::vector<CoreferenceChain> chains;
    std::int64_t id = 0;
    for (int c = 0; c < 10; ++c) {
        CoreferenceChain chain{c, "Pivot " + std::to_string(c), {}};
        for (int i = 0; i <= c % 4; ++i)
            chain.mentions.push_back(bare_mention(id++, c, "m"));
        chains.push_back(chain);
    }
    auto ids = [](const DatasetSplit &s) {
        std::vector<int> out;
        for (const auto &c : s.chains)
            out.push_back(c.cluster_id);
        return out;
    };

    const auto a = make_splits(chains, 4, 0.4, 99);
    auto shuffled = chains;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto b = make_splits(shuffled, 4, 0.4, 99);
    CHECK(ids(a.dev) == ids(b.dev));
    CHECK(ids(a.test) == ids(b.test));
    CHECK(a.dev.chains.size() + a.test.chains.size() == 4);
    CHECK(a.train.chains.size() == 6);

    std::set<std::set<int>> draws;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = make_splits(chains, 4, 0.4, seed);
        std::set<int> eval;
        for (const auto *split : {&s.dev, &s.test})
            for (int c : ids(*split))
                eval.insert(c);
        draws.insert(eval);
        // Every cluster lands in exactly one split.
        std::multiset<int> all;
        for (const auto *split : {&s.train, &s.dev, &s.test})
            for (int c : ids(*split))
                all.insert(c);
        CHECK(all.size() == 10);
        CHECK(std::set<int>(all.begin(), all.end()).size() == 10);
        CHECK(std::is_sorted(s.dev.chains.begin(), s.dev.chains.end(),
                             [](const auto &x, const auto &y) { return x.cluster_id < y.cluster_id; }));
    }
    CHECK(draws.size() > 1);

    const auto none = make_splits(chains, 0, 0.4, 1);
    CHECK(none.train.chains.size() == 10);
    CHECK(none.dev.chains.empty());
    CHECK(none.test.chains.empty());

    CHECK(make_splits(chains, 4, 0.0, 5).dev.chains.empty());
    CHECK(make_splits(chains, 4, 1.0, 5).test.chains.empty());
    CHECK_THROWS_AS(make_splits(chains, 10, 0.4, 1), wec::ContractError);
    CHECK_THROWS_AS(make_splits(chains, 2, 1.5, 1), wec::ContractError);
}

TEST_CASE("make_splits dev filling matches the stated rule") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CoreferenceChain> chains;
        std::int64_t id = 0;
        const int n = 2 + static_cast<int>(rng() % 10);
        for (int c = 0; c < n; ++c) {
            CoreferenceChain chain{c, "", {}};
            const int size = 1 + static_cast<int>(rng() % 6);
            for (int i = 0; i < size; ++i)
                chain.mentions.push_back(bare_mention(id++, c, "m"));
            chains.push_back(chain);
        }
        const std::size_t k = rng() % n;
        const double fraction = static_cast<double>(rng() % 11) / 10.0;
        const std::uint64_t seed = rng();
        const auto s = make_splits(chains, k, fraction, seed);

        // Replay the draw with the same generator to recover draw order.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i)
            order[i] = i;
        std::mt19937_64 replay(seed);
        for (std::size_t i = 0; i < k; ++i)
            std::swap(order[i], order[i + wec::util::uniform_below(replay, n - i)]);
        std::size_t total = 0;
        for (std::size_t i = 0; i < k; ++i)
            total += chains[order[i]].mentions.size();
        std::set<int> dev, test;
        std::size_t dev_mentions = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (static_cast<double>(dev_mentions) < fraction * static_cast<double>(total)) {
                dev.insert(order[i]);
                dev_mentions += chains[order[i]].mentions.size();
            } else {
                test.insert(order[i]);
            }
        }
        std::set<int> got_dev, got_test;
        for (const auto &c : s.dev.chains)
            got_dev.insert(c.cluster_id);
        for (const auto &c : s.test.chains)
            got_test.insert(c.cluster_id);
        CHECK(got_dev == dev);
        CHECK(got_test == test);
    }
}

TEST_CASE("purge_train_leakage") {
    DatasetSplit train{"train", {}};
    const char *sources[] = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"};
    for (int i = 0; i < 12; ++i) {
        if (i % 4 == 0)
            train.chains.push_back({i / 4, "P", {}});
        train.chains.back().mentions.push_back(bare_mention(i, i / 4, "m", sources[i]));
    }
    std::vector<Mention> eval{bare_mention(100, 7, "m", "B"), bare_mention(101, 7, "m", "F"),
                              bare_mention(102, 8, "m", "K"), bare_mention(103, 8, "m", "Z")};
    const auto purged = purge_train_leakage(train, eval);
    CHECK(purged.mention_count() == 9);
    for (const auto &chain : purged.chains)
        for (const auto &m : chain.mentions)
            CHECK((m.source_title != "B" && m.source_title != "F" && m.source_title != "K"));

    CHECK(purge_train_leakage(train, {bare_mention(5, 9, "m", "Q")}).mention_count() == 12);

    // A chain whose every mention leaks disappears.
    const auto emptied = purge_train_leakage(train, {bare_mention(1, 9, "m", "A"), bare_mention(2, 9, "m", "B"),
                                                     bare_mention(3, 9, "m", "C"), bare_mention(4, 9, "m", "D")});
    CHECK(emptied.chains.size() == 2);

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        DatasetSplit t{"train", {}};
        for (int c = 0; c < 5; ++c) {
            t.chains.push_back({c, "", {}});
            for (int i = 0; i < 6; ++i)
                t.chains.back().mentions.push_back(bare_mention(c * 10 + i, c, "m", sources[rng() % 12]));
        }
        std::vector<Mention> validated;
        for (int i = 0; i < 4; ++i)
            validated.push_back(bare_mention(500 + i, 9, "m", sources[rng() % 12]));
        const auto p = purge_train_leakage(t, validated);
        for (const auto &chain : p.chains) {
            CHECK(!chain.mentions.empty());
            for (const auto &m : chain.mentions)
                for (const auto &v : validated)
                    CHECK(m.source_title != v.source_title);
        }
    }
}

TEST_CASE("mention records round-trip and reject bad spans") {
    auto m = make_mention(3, "Haiti", "Recovery from the earthquake dominated politics.", "the earthquake", 2);
    m.metadata = {"u1", "u2", "earthquake"};
    const auto j = to_json(m);
    CHECK(j.size() == 8);
    CHECK(j["span"] == nlohmann::json::array({2, 3}));
    const auto back = mention_from_json(j);
    CHECK(to_json(back) == j);

    auto bad = j;
    bad["span"] = {3, 99};
    CHECK_THROWS_AS(mention_from_json(bad), wec::InputError);
    bad["span"] = {3, 2};
    CHECK_THROWS_AS(mention_from_json(bad), wec::InputError);
    bad.erase("tokens");
    CHECK_THROWS_AS(mention_from_json(bad), wec::InputError);
}

TEST_CASE("fixture dump reproduces the hand counts") {
    auto ner = fixture_ner();
    auto result = run_extract(fixture_dump(), fixture_config(), &ner);
    const auto &c = result.counts;
    CHECK(c.pages == 20);
    CHECK(c.redirects == 3);
    CHECK(c.pivots == 3);
    CHECK(c.raw_mentions == 19);
    CHECK(c.removed_lacking_context == 1);
    CHECK(c.removed_boilerplate_code == 1);
    CHECK(c.after_context_filters == 17);
    CHECK(c.removed_ner == 3);
    CHECK(c.ner_unknown_document_annotations == 1);
    CHECK(c.after_ner_filter == 14);
    CHECK(c.removed_diversity == 2);
    CHECK(c.after_diversity == 12);
    CHECK(c.chains == 3);

    CHECK(result.registry.titles_by_cluster() ==
          std::vector<std::string>{"2010 Haiti earthquake", "2011 Norway attacks", "83rd Academy Awards"});
    CHECK(result.registry.find("2011 Norway attacks")->infobox_type == "civilian attack");

    std::map<std::string, std::vector<std::string>> sources;
    std::size_t total = 0;
    for (const auto *split : {&result.splits.train, &result.splits.dev, &result.splits.test}) {
        for (const auto &chain : split->chains) {
            for (const auto &m : chain.mentions) {
                sources[chain.pivot_title].push_back(m.source_title);
                CHECK(m.source_title != chain.pivot_title);
                CHECK(m.mention_text == detokenize(m.tokens, m.first, m.last));
                ++total;
            }
        }
    }
    CHECK(total == 12);
    CHECK(sources["2010 Haiti earthquake"] ==
          std::vector<std::string>{"Haiti", "Hope for Haiti Now", "Jacmel", "Léogâne", "Port-au-Prince"});
    CHECK(sources["2011 Norway attacks"] ==
          std::vector<std::string>{"2010 Haiti earthquake", "Oslo", "Oslo", "Utøya"});
    CHECK(sources["83rd Academy Awards"] ==
          std::vector<std::string>{"Colin Firth", "Natalie Portman", "The King's Speech (film)"});
    CHECK(result.splits.dev.chains.size() + result.splits.test.chains.size() == 2);
    CHECK(result.pivot_summaries.at("2011 Norway attacks").rfind("The 2011 Norway attacks were", 0) == 0);
}

TEST_CASE("fixture pipeline output is byte-identical across runs and worker counts") {
    auto ner = fixture_ner();
    auto config = fixture_config();
    config.keep_diversity = true;
    auto first_dir = temp_dir("run1");
    auto second_dir = temp_dir("run2");
    const auto files = write_dataset(first_dir, run_extract(fixture_dump(), config, &ner));
    config.workers = 4;
    config.batch_pages = 3;
    write_dataset(second_dir, run_extract(fixture_dump(), config, &ner));
    REQUIRE(files.size() == 8);
    for (const auto &f : files)
        CHECK_MESSAGE(wec::util::read_file(first_dir / f) == wec::util::read_file(second_dir / f), f);

    // The uncontrolled variant keeps the two capped mentions.
    std::size_t capped = 0, uncapped = 0;
    for (const char *name : {"train", "dev", "test"}) {
        capped += read_mentions(first_dir / (std::string(name) + ".jsonl")).size();
        uncapped += read_mentions(first_dir / "uncontrolled" / (std::string(name) + ".jsonl")).size();
    }
    CHECK(capped == 12);
    CHECK(uncapped == 14);

    const auto candidates = read_candidates(first_dir / "candidates.jsonl");
    std::size_t eval = read_mentions(first_dir / "dev.jsonl").size() + read_mentions(first_dir / "test.jsonl").size();
    CHECK(candidates.size() == eval);
    for (const auto &cand : candidates)
        CHECK(!cand.pivot_summary.empty());
}
