#include "wec/cli/app.h"

#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "wec/cli/input.h"
#include "wec/cli/manifest.h"
#include "wec/metrics/formats.h"
#include "wec/metrics/metrics.h"
#include "wec/pipeline/dataset_io.h"
#include "wec/pipeline/extract.h"
#include "wec/resolver/clustering.h"
#include "wec/stats/corpus_stats.h"
#include "wec/util/digest.h"
#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/util/log.h"
#include "wec/util/parallel.h"
#include "wec/validation/service.h"
#include "wec/version.h"
#include "wec/wikitext/dump_reader.h"
#include "wec/wikitext/page_parser.h"

namespace wec::cli {

namespace fs = std::filesystem;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Global {
    unsigned workers = 1;
    std::string log_level = "info";
};

/// Every option of the command and the global ones, given or defaulted.
nlohmann::json flag_record(const CLI::App &app, const CLI::App &sub) {
    nlohmann::json flags = nlohmann::json::object();
    for (const CLI::App *scope : {&app, &sub}) {
        for (const CLI::Option *opt : scope->get_options()) {
            const auto &names = opt->get_lnames();
            if (names.empty() || names[0] == "help" || names[0] == "version")
                continue;
            nlohmann::json value;
            if (opt->get_expected_max() == 0) {
                value = opt->count() > 0;
            } else if (opt->count() > 0) {
                const auto &results = opt->results();
                value = results.size() == 1 ? nlohmann::json(results[0]) : nlohmann::json(results);
            } else if (!opt->get_default_str().empty()) {
                value = opt->get_default_str();
            }
            flags[names[0]] = value;
        }
    }
    return flags;
}

std::vector<pipeline::Mention> read_any_mentions(const std::string &path) {
    if (fs::path(path).extension() == ".json")
        return pipeline::read_wec_eng_json(path);
    return pipeline::read_mentions(path);
}

pipeline::DatasetSplit read_any_split(const std::string &path) {
    return pipeline::DatasetSplit{fs::path(path).stem().string(), pipeline::assemble_chains(read_any_mentions(path))};
}

metrics::Partition read_any_partition(const std::string &path) {
    if (metrics::detect_format(path) == metrics::ClusteringFormat::conll) {
        const auto mentions = metrics::read_conll(fs::path(path));
        return metrics::conll_partition(mentions, metrics::conll_mention_ids(mentions));
    }
    return metrics::read_clustering(path);
}

metrics::Partition key_of(const std::vector<pipeline::Mention> &mentions) {
    std::map<int, std::vector<metrics::MentionId>> clusters;
    for (const auto &m : mentions)
        clusters[m.cluster_id].push_back(m.mention_id);
    std::vector<std::vector<metrics::MentionId>> out;
    for (auto &[id, members] : clusters)
        out.push_back(std::move(members));
    return metrics::canonical(metrics::Partition(std::move(out)));
}

std::vector<metrics::MentionId> sorted_ids(const std::vector<pipeline::Mention> &mentions) {
    std::vector<metrics::MentionId> ids;
    for (const auto &m : mentions)
        ids.push_back(m.mention_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

void require_same_universe(const std::vector<metrics::MentionId> &mentions, const resolver::ScoreMatrix &scores,
                           const std::string &what) {
    if (mentions == scores.ids())
        return;
    std::vector<metrics::MentionId> missing;
    std::set_symmetric_difference(mentions.begin(), mentions.end(), scores.ids().begin(), scores.ids().end(),
                                  std::back_inserter(missing));
    throw InputError(what + ": score universe (" + std::to_string(scores.size()) + " mentions) differs from the " +
                     std::to_string(mentions.size()) + " mentions, e.g. id " + std::to_string(missing.front()));
}

// ---- parse -----------------------------------------------------------------

struct ParseOptions {
    std::string dump = "-";
    std::string out = "-";
    std::vector<int> namespaces{0};
    bool all_namespaces = false;
    std::size_t batch_pages = 256;
};

void write_parsed(std::ostream &sink, wikitext::DumpReader &reader, const ParseOptions &o, unsigned workers,
                  std::size_t &pages, std::size_t &redirects) {
    std::vector<wikitext::RawPage> batch;
    std::vector<std::string> lines;
    auto flush = [&] {
        lines.assign(batch.size(), {});
        util::parallel_for(batch.size(), workers, [&](std::size_t i) {
            lines[i] = util::dump_record(wikitext::to_json(wikitext::parse_page(batch[i])));
        });
        for (const auto &line : lines)
            sink << line << '\n';
        pages += batch.size();
        batch.clear();
    };
    while (auto page = reader.next()) {
        // Redirect pages carry no prose; only their count is reported.
        if (page->redirect_target) {
            ++redirects;
            continue;
        }
        batch.push_back(std::move(*page));
        if (batch.size() >= o.batch_pages)
            flush();
    }
    flush();
}

int cmd_parse(const ParseOptions &o, const Global &g, std::ostream &out) {
    Stopwatch clock;
    auto in = open_input(o.dump);
    wikitext::DumpOptions dump_options;
    if (!o.all_namespaces)
        dump_options.namespaces = std::set<int>(o.namespaces.begin(), o.namespaces.end());
    wikitext::DumpReader reader(*in, dump_options);
    std::size_t pages = 0, redirects = 0;
    if (o.out == "-") {
        write_parsed(out, reader, o, g.workers, pages, redirects);
        out.flush();
    } else {
        std::ofstream file(o.out, std::ios::binary);
        if (!file)
            throw InputError("cannot write " + o.out);
        write_parsed(file, reader, o, g.workers, pages, redirects);
        if (!file.flush())
            throw Error("write failed: " + o.out);
    }
    const auto &s = reader.stats();
    log::info("parse_done", {{"pages", pages},
                             {"redirects", redirects},
                             {"pages_seen", s.pages_seen},
                             {"pages_filtered", s.pages_filtered},
                             {"pages_skipped", s.pages_skipped},
                             {"peak_buffered_bytes", s.peak_buffered_bytes},
                             {"seconds", clock.seconds()}});
    return 0;
}

// ---- extract ---------------------------------------------------------------

struct ExtractOptions {
    std::string dump;
    std::string allowlist;
    std::string ner;
    std::size_t max_identical = pipeline::kDefaultMaxIdentical;
    std::size_t eval_clusters = 0;
    double dev_fraction = pipeline::kDefaultDevFraction;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool no_redirects = false;
    bool keep_diversity = false;
    std::size_t min_context_tokens = pipeline::kDefaultMinContextTokens;
    double ner_coverage = pipeline::kDefaultNerCoverage;
    std::size_t batch_pages = 256;
};

int cmd_extract(const ExtractOptions &o, const Global &g, const nlohmann::json &flags, std::ostream &out) {
    if (o.dump == "-")
        throw InputError("extract reads the dump twice, so it needs a file path rather than standard input");
    Stopwatch clock;
    pipeline::ExtractConfig config;
    config.allowlist = pipeline::load_allowlist(o.allowlist);
    config.max_identical = o.max_identical;
    config.n_eval_clusters = o.eval_clusters;
    config.dev_fraction = o.dev_fraction;
    config.seed = o.seed;
    config.keep_diversity = o.keep_diversity;
    config.workers = g.workers;
    config.min_context_tokens = o.min_context_tokens;
    config.ner_coverage = o.ner_coverage;
    config.mention.follow_redirects = !o.no_redirects;
    config.batch_pages = o.batch_pages;

    std::optional<pipeline::NerIndex> ner;
    if (!o.ner.empty()) {
        ner.emplace();
        ner->load(o.ner);
    }
    auto result = pipeline::run_extract([&] { return open_input(o.dump); }, config, ner ? &*ner : nullptr);
    const auto files = pipeline::write_dataset(o.out_dir, result);

    RunManifest manifest("extract", flags);
    manifest.add_input("dump", o.dump);
    manifest.add_input("allowlist", o.allowlist);
    if (!o.ner.empty())
        manifest.add_input("ner", o.ner);
    manifest.set("seed", o.seed);
    manifest.set("config", {{"max_identical", config.max_identical},
                            {"n_eval_clusters", config.n_eval_clusters},
                            {"dev_fraction", config.dev_fraction},
                            {"min_context_tokens", config.min_context_tokens},
                            {"ner_coverage", config.ner_coverage},
                            {"blocked_labels", config.blocked_labels},
                            {"boilerplate_patterns", config.boilerplate_patterns},
                            {"follow_redirects", config.mention.follow_redirects},
                            {"namespaces", config.namespaces},
                            {"allowlist_types", config.allowlist},
                            {"same_pivot_links_in_paragraph", "kept as separate mentions"},
                            {"keep_diversity", config.keep_diversity}});
    manifest.set("counts", pipeline::to_json(result.counts));
    manifest.set("splits", {{"train", result.splits.train.mention_count()},
                            {"dev", result.splits.dev.mention_count()},
                            {"test", result.splits.test.mention_count()}});
    for (const auto &[stage, seconds] : result.timings)
        manifest.add_timing(stage, seconds);
    manifest.add_timing("total", clock.seconds());
    manifest.set("outputs", files);
    manifest.write(fs::path(o.out_dir) / "manifest.json");

    const auto counts = pipeline::to_json(result.counts);
    for (const auto &[stage, count] : counts.items())
        out << std::left << std::setw(34) << stage << count.get<std::size_t>() << '\n';
    out << "wrote " << files.size() + 1 << " files to " << o.out_dir << '\n';
    return 0;
}

// ---- stats -----------------------------------------------------------------

struct StatsOptions {
    std::vector<std::string> inputs;
    std::string lemmas;
    std::string format = "table";
};

int cmd_stats(const StatsOptions &o, std::ostream &out) {
    stats::LemmaResource lemmas;
    if (!o.lemmas.empty())
        lemmas = stats::LemmaResource::load(o.lemmas);
    std::vector<stats::StatsReport> reports;
    for (const auto &path : o.inputs)
        reports.push_back(stats::compute_stats(read_any_split(path), lemmas));
    if (o.format == "table") {
        out << stats::format_table(reports);
    } else {
        for (const auto &r : reports)
            out << util::dump_record(stats::to_json(r)) << '\n';
    }
    return 0;
}

// ---- resolve ---------------------------------------------------------------

struct ResolveOptions {
    std::string mentions;
    std::string scores;
    bool lemma_baseline = false;
    double threshold = resolver::kDefaultThreshold;
    std::string tune_on;
    std::string tune_scores;
    std::string doc_partition;
    std::string lemmas;
    double default_score = resolver::kDefaultPairScore;
    std::string out;
};

int cmd_resolve(const ResolveOptions &o, const Global &g, const nlohmann::json &flags, std::ostream &out) {
    Stopwatch clock;
    const auto mentions = read_any_mentions(o.mentions);
    RunManifest manifest("resolve", flags);
    manifest.add_input("mentions", o.mentions);
    resolver::Clustering clustering;

    if (o.lemma_baseline) {
        stats::LemmaResource lemmas;
        if (!o.lemmas.empty()) {
            lemmas = stats::LemmaResource::load(o.lemmas);
            manifest.add_input("lemmas", o.lemmas);
        }
        clustering = resolver::lemma_baseline(mentions, lemmas);
    } else {
        auto scores = resolver::ScoreMatrix::load(o.scores, o.default_score);
        manifest.add_input("scores", o.scores);
        require_same_universe(sorted_ids(mentions), scores, o.scores);
        resolver::ClusteringConfig config{o.threshold, g.workers};
        if (!o.tune_on.empty()) {
            const auto dev = read_any_mentions(o.tune_on);
            auto dev_scores = resolver::ScoreMatrix::load(o.tune_scores, o.default_score);
            manifest.add_input("tune_on", o.tune_on);
            manifest.add_input("tune_scores", o.tune_scores);
            require_same_universe(sorted_ids(dev), dev_scores, o.tune_scores);
            const auto tuned = resolver::tune_threshold(key_of(dev), dev_scores, resolver::default_threshold_grid(),
                                                        g.workers);
            config.threshold = tuned.threshold;
            nlohmann::json curve = nlohmann::json::array();
            for (const auto &[t, f1] : tuned.curve)
                curve.push_back({{"threshold", t}, {"conll_f1", f1}});
            manifest.set("tuning", {{"threshold", tuned.threshold}, {"curve", curve}});
            out << "tuned threshold " << tuned.threshold << '\n';
        }
        if (!o.doc_partition.empty()) {
            std::map<metrics::MentionId, std::string> docs;
            for (const auto &m : mentions)
                docs[m.mention_id] = m.source_title;
            manifest.add_input("doc_partition", o.doc_partition);
            clustering = resolver::partition_restricted_clustering(scores, config, docs,
                                                                   resolver::load_doc_partition(o.doc_partition));
        } else {
            clustering = resolver::agglomerate(scores, config);
        }
        clustering.provenance.score_digest = util::sha256_file(o.scores);
        clustering.provenance.default_score = o.default_score;
    }

    metrics::write_clustering(o.out, clustering.partition);
    manifest.set("provenance", resolver::to_json(clustering.provenance));
    manifest.set("counts", {{"mentions", mentions.size()}, {"clusters", clustering.partition.size()}});
    manifest.add_timing("total", clock.seconds());
    manifest.set("outputs", {fs::path(o.out).filename().string()});
    manifest.write(o.out + ".manifest.json");
    out << clustering.partition.size() << " clusters over " << mentions.size() << " mentions written to " << o.out
        << '\n';
    return 0;
}

// ---- eval / convert --------------------------------------------------------

struct EvalOptions {
    std::string key;
    std::string response;
    std::string format = "table";
};

int cmd_eval(const EvalOptions &o, std::ostream &out) {
    const auto [key, response] = metrics::read_key_response(o.key, o.response);
    const auto report = metrics::evaluate(key, response);
    if (o.format == "table")
        out << metrics::format_table(report);
    else
        out << util::dump_record(metrics::to_json(report)) << '\n';
    return 0;
}

struct ConvertOptions {
    std::string in;
    std::string out;
    std::string to;
};

int cmd_convert(const ConvertOptions &o, std::ostream &out) {
    const auto partition = read_any_partition(o.in);
    const std::string to = !o.to.empty() ? o.to : fs::path(o.out).extension() == ".conll" ? "conll" : "jsonl";
    if (to == "conll") {
        std::ofstream file(o.out, std::ios::binary);
        if (!file)
            throw InputError("cannot write " + o.out);
        metrics::write_conll(file, partition);
        if (!file.flush())
            throw Error("write failed: " + o.out);
    } else {
        metrics::write_clustering(o.out, partition);
    }
    out << partition.mention_count() << " mentions in " << partition.size() << " clusters written to " << o.out
        << " (" << to << ")\n";
    return 0;
}

// ---- serve -----------------------------------------------------------------

struct ServeOptions {
    std::string candidates;
    std::string store;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string train;
    std::string export_dir;
    std::string consolidator = "consolidator";
    std::string practice;
    bool compact = false;
};

std::set<std::int64_t> read_practice_ids(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path);
    std::set<std::int64_t> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#')
            continue;
        try {
            std::size_t used = 0;
            ids.insert(std::stoll(line, &used));
            if (line.find_first_not_of(" \t\r", used) != std::string::npos)
                throw std::invalid_argument("trailing text");
        } catch (const std::exception &) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected one mention id per line");
        }
    }
    return ids;
}

int cmd_serve(const ServeOptions &o, std::ostream &out) {
    validation::StoreOptions store_options;
    store_options.consolidator = o.consolidator;
    if (!o.practice.empty())
        store_options.practice_mentions = read_practice_ids(o.practice);
    validation::Store store(o.store, pipeline::read_candidates(o.candidates), store_options);
    if (o.compact)
        store.compact();
    validation::ServiceOptions service_options;
    if (!o.export_dir.empty())
        service_options.export_dir = o.export_dir;
    if (!o.train.empty())
        service_options.train = pipeline::read_split(o.train, "train");
    validation::Service service(store, service_options);

    // Block the stop signals in every thread; one thread waits for them.
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
    std::atomic<bool> listening{true};
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&stop_signals, &sig);
        if (listening)
            log::info("serve_stopping", {{"signal", sig}});
        service.stop();
    });

    const int port = service.bind(o.host, o.port);
    out << "serving " << store.task_count() << " tasks on http://" << o.host << ":" << port << std::endl;
    log::info("serve_listening", {{"host", o.host}, {"port", port}, {"store", o.store}});
    service.listen();
    listening = false;
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    pthread_sigmask(SIG_UNBLOCK, &stop_signals, nullptr);
    return 0;
}

log::Level parse_level(const std::string &name) {
    if (name == "debug")
        return log::Level::debug;
    if (name == "warn")
        return log::Level::warn;
    if (name == "error")
        return log::Level::error;
    return log::Level::info;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out) {
    CLI::App app{"Cross-document event coreference corpus toolkit", "wec"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    app.fallthrough();
    Global global;
    app.add_option("--workers", global.workers, "Worker threads for parallel stages")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app.add_option("--log-level", global.log_level, "Minimum level of the JSON log lines on standard error")
        ->check(CLI::IsMember({"debug", "info", "warn", "error"}))
        ->capture_default_str();

    ParseOptions parse;
    auto *parse_cmd = app.add_subcommand("parse", "Parse a pages-articles export into ParsedPage records");
    parse_cmd->add_option("--dump", parse.dump, "Export file (.bz2/.gz/.xz/.zst decompressed on the fly; - for stdin)")
        ->capture_default_str();
    parse_cmd->add_option("--out", parse.out, "Output JSONL file (- for stdout)")->capture_default_str();
    parse_cmd->add_option("--namespaces", parse.namespaces, "Namespaces to keep")->capture_default_str();
    parse_cmd->add_flag("--all-namespaces", parse.all_namespaces, "Keep pages of every namespace");
    parse_cmd->add_option("--batch-pages", parse.batch_pages, "Pages parsed per parallel batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    ExtractOptions extract;
    auto *extract_cmd = app.add_subcommand("extract", "Build the coreference dataset from an export dump");
    extract_cmd->add_option("--dump", extract.dump, "Export file (read twice; compressed files are fine)")
        ->required();
    extract_cmd->add_option("--allowlist", extract.allowlist, "Event infobox types, one per line")
        ->required()
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--ner", extract.ner, "Named-entity annotations (JSONL standoff records)")
        ->check(CLI::ExistingFile);
    extract_cmd->add_option("--max-identical", extract.max_identical, "Identical strings kept per cluster")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    extract_cmd->add_option("--eval-clusters", extract.eval_clusters, "Clusters drawn for dev and test")
        ->capture_default_str();
    extract_cmd->add_option("--dev-fraction", extract.dev_fraction, "Share of eval mentions assigned to dev")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    extract_cmd->add_option("--seed", extract.seed, "Seed for the eval cluster draw")->capture_default_str();
    extract_cmd->add_option("--out-dir", extract.out_dir, "Output directory")->envname("WEC_OUT_DIR")->required();
    extract_cmd->add_flag("--no-redirects", extract.no_redirects, "Do not follow redirects to pivot pages");
    extract_cmd->add_flag("--keep-diversity", extract.keep_diversity,
                          "Also write the uncapped dataset under uncontrolled/");
    extract_cmd->add_option("--min-context-tokens", extract.min_context_tokens,
                            "Paragraph tokens required outside the mention")
        ->capture_default_str();
    extract_cmd->add_option("--ner-coverage", extract.ner_coverage,
                            "Share of the anchor a blocked entity must cover to drop it")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    extract_cmd->add_option("--batch-pages", extract.batch_pages, "Pages parsed per parallel batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    StatsOptions stats_opts;
    auto *stats_cmd = app.add_subcommand("stats", "Corpus statistics per split file");
    stats_cmd->add_option("inputs", stats_opts.inputs, "Split files (.jsonl) or released WEC-Eng files (.json)")
        ->required()
        ->check(CLI::ExistingFile);
    stats_cmd->add_option("--lemmas", stats_opts.lemmas, "surface<TAB>lemma file")->check(CLI::ExistingFile);
    stats_cmd->add_option("--format", stats_opts.format, "table or records")
        ->check(CLI::IsMember({"table", "records"}))
        ->capture_default_str();

    ResolveOptions resolve;
    auto *resolve_cmd = app.add_subcommand("resolve", "Cluster mentions with the lemma baseline or pair scores");
    resolve_cmd->add_option("--mentions", resolve.mentions, "Mentions to cluster (.jsonl split or WEC-Eng .json)")
        ->required()
        ->check(CLI::ExistingFile);
    auto *scores_opt = resolve_cmd->add_option("--scores", resolve.scores, "Pair score file")
                           ->check(CLI::ExistingFile);
    auto *lemma_opt = resolve_cmd->add_flag("--lemma-baseline", resolve.lemma_baseline,
                                            "Cluster by head lemma instead of scores");
    scores_opt->excludes(lemma_opt);
    auto *threshold_opt = resolve_cmd->add_option("--threshold", resolve.threshold, "Stop threshold")
                              ->check(CLI::Range(0.0, 1.0))
                              ->capture_default_str();
    auto *tune_opt = resolve_cmd->add_option("--tune-on", resolve.tune_on, "Dev mentions used to tune the threshold")
                         ->check(CLI::ExistingFile);
    auto *tune_scores_opt = resolve_cmd->add_option("--tune-scores", resolve.tune_scores, "Pair scores for --tune-on")
                                ->check(CLI::ExistingFile);
    tune_opt->needs(tune_scores_opt)->needs(scores_opt)->excludes(threshold_opt);
    tune_scores_opt->needs(tune_opt);
    resolve_cmd->add_option("--doc-partition", resolve.doc_partition, "document<TAB>group file")
        ->check(CLI::ExistingFile)
        ->needs(scores_opt);
    resolve_cmd->add_option("--lemmas", resolve.lemmas, "surface<TAB>lemma file for --lemma-baseline")
        ->check(CLI::ExistingFile)
        ->needs(lemma_opt);
    resolve_cmd->add_option("--default-score", resolve.default_score, "Score of pairs absent from the file")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    resolve_cmd->add_option("--out", resolve.out, "Clustering output (JSONL)")->required();

    EvalOptions eval;
    auto *eval_cmd = app.add_subcommand("eval", "Score a response clustering against a key");
    eval_cmd->add_option("--key", eval.key, "Key clustering (JSONL or CoNLL)")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--response", eval.response, "Response clustering (JSONL or CoNLL)")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--format", eval.format, "table or records")
        ->check(CLI::IsMember({"table", "records"}))
        ->capture_default_str();

    ConvertOptions convert;
    auto *convert_cmd = app.add_subcommand("convert", "Convert clusterings between JSONL and CoNLL");
    convert_cmd->add_option("--in", convert.in, "Input clustering")->required()->check(CLI::ExistingFile);
    convert_cmd->add_option("--out", convert.out, "Output file")->required();
    convert_cmd->add_option("--to", convert.to, "conll or jsonl (default from the output extension)")
        ->check(CLI::IsMember({"conll", "jsonl"}));

    ServeOptions serve;
    auto *serve_cmd = app.add_subcommand("serve", "Run the validation service");
    serve_cmd->add_option("--candidates", serve.candidates, "candidates.jsonl from extract")
        ->required()
        ->check(CLI::ExistingFile);
    serve_cmd->add_option("--store", serve.store, "Judgment store directory")->envname("WEC_STORE_DIR")->required();
    serve_cmd->add_option("--host", serve.host, "Address to bind")->capture_default_str();
    serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    serve_cmd->add_option("--train", serve.train, "Train split purged on export")->check(CLI::ExistingFile);
    serve_cmd->add_option("--export-dir", serve.export_dir, "Export directory (default <store>/exports)");
    serve_cmd->add_option("--consolidator", serve.consolidator, "Annotator id whose judgments are final")
        ->capture_default_str();
    serve_cmd->add_option("--practice", serve.practice, "Mention ids of practice tasks, one per line")
        ->check(CLI::ExistingFile);
    serve_cmd->add_flag("--compact", serve.compact, "Compact the judgment log before serving");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, std::cerr);
        return code == 0 ? 0 : 2;
    }
    log::set_level(parse_level(global.log_level));

    CLI::App *sub = app.get_subcommands().front();
    try {
        if (sub == parse_cmd)
            return cmd_parse(parse, global, out);
        if (sub == extract_cmd)
            return cmd_extract(extract, global, flag_record(app, *sub), out);
        if (sub == stats_cmd)
            return cmd_stats(stats_opts, out);
        if (sub == resolve_cmd) {
            if (resolve.scores.empty() && !resolve.lemma_baseline) {
                std::cerr << "resolve: one of --scores or --lemma-baseline is required\n";
                return 2;
            }
            return cmd_resolve(resolve, global, flag_record(app, *sub), out);
        }
        if (sub == eval_cmd)
            return cmd_eval(eval, out);
        if (sub == convert_cmd)
            return cmd_convert(convert, out);
        if (sub == serve_cmd)
            return cmd_serve(serve, out);
    } catch (const InputError &e) {
        log::error("command_failed", {{"subcommand", sub->get_name()}, {"kind", "input"}, {"message", e.what()}});
        return 1;
    } catch (const ContractError &e) {
        log::error("command_failed", {{"subcommand", sub->get_name()}, {"kind", "contract"}, {"message", e.what()}});
        return 1;
    } catch (const std::exception &e) {
        log::error("command_failed", {{"subcommand", sub->get_name()}, {"kind", "internal"}, {"message", e.what()}});
        return 1;
    }
    return 2;
}

} // namespace wec::cli
