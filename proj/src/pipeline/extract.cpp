#include "wec/pipeline/extract.h"

#include <chrono>

#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/util/log.h"
#include "wec/util/parallel.h"
#include "wec/wikitext/dump_reader.h"
#include "wec/wikitext/infobox.h"
#include "wec/wikitext/redirects.h"

namespace wec::pipeline {

using nlohmann::json;

json to_json(const StageCounts &c) {
    return {{"pages", c.pages},
            {"redirects", c.redirects},
            {"pivots", c.pivots},
            {"raw_mentions", c.raw_mentions},
            {"dropped_bad_offsets", c.dropped_bad_offsets},
            {"removed_lacking_context", c.removed_lacking_context},
            {"removed_boilerplate_code", c.removed_boilerplate_code},
            {"after_context_filters", c.after_context_filters},
            {"removed_ner", c.removed_ner},
            {"ner_unknown_document_annotations", c.ner_unknown_document_annotations},
            {"after_ner_filter", c.after_ner_filter},
            {"removed_diversity", c.removed_diversity},
            {"after_diversity", c.after_diversity},
            {"chains", c.chains}};
}

namespace {

class Stopwatch {
public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::unique_ptr<std::istream> open_or_throw(const StreamOpener &open) {
    auto in = open();
    if (!in || !*in)
        throw InputError("cannot open dump stream");
    return in;
}

} // namespace

ExtractResult run_extract(const StreamOpener &open_dump, const ExtractConfig &config, const NerIndex *ner) {
    ExtractResult result;
    Stopwatch clock;
    wikitext::DumpOptions dump_options;
    dump_options.namespaces = config.namespaces;

    // Pass 1: pivots and redirects. Only the infobox scan is needed here.
    PivotCollector pivots(config.allowlist);
    wikitext::RedirectMap direct;
    {
        auto in = open_or_throw(open_dump);
        auto stats = wikitext::parse_dump(
            *in,
            [&](wikitext::RawPage &&page) {
                if (page.redirect_target)
                    direct[page.title] = *page.redirect_target;
                else
                    pivots.add(page.title, wikitext::extract_infobox_type(page.wikitext));
            },
            dump_options);
        result.counts.pages = stats.pages_yielded;
    }
    result.registry = pivots.finish();
    const wikitext::RedirectMap redirects = wikitext::resolve_redirects(direct);
    result.counts.redirects = direct.size();
    result.counts.pivots = result.registry.size();
    result.timings["pivots"] = clock.lap();
    log::info("pivots_collected", {{"pivots", result.counts.pivots}, {"redirects", direct.size()}});

    // Pass 2: parse pages in batches and map each to its mentions.
    MentionConfig mention_config = config.mention;
    MentionExtractor extractor(result.registry, redirects, mention_config);
    std::vector<Mention> mentions;
    {
        auto in = open_or_throw(open_dump);
        wikitext::DumpReader reader(*in, dump_options);
        std::vector<wikitext::RawPage> batch;
        struct Output {
            PageMentions mentions;
            std::optional<std::string> summary;
        };
        auto flush = [&] {
            std::vector<Output> outputs(batch.size());
            util::parallel_for(batch.size(), config.workers, [&](std::size_t i) {
                const auto page = wikitext::parse_page(batch[i], config.markup);
                outputs[i].mentions = extractor.extract(page);
                if (result.registry.find(page.title))
                    outputs[i].summary = pivot_summary(page);
            });
            for (std::size_t i = 0; i < batch.size(); ++i) {
                result.counts.dropped_bad_offsets += outputs[i].mentions.dropped;
                for (auto &m : outputs[i].mentions.mentions)
                    mentions.push_back(std::move(m));
                if (outputs[i].summary)
                    result.pivot_summaries[batch[i].title] = std::move(*outputs[i].summary);
            }
            batch.clear();
        };
        while (auto page = reader.next()) {
            if (page->redirect_target)
                continue;
            batch.push_back(std::move(*page));
            if (batch.size() >= config.batch_pages)
                flush();
        }
        flush();
    }
    finalize_mentions(mentions);
    result.counts.raw_mentions = mentions.size();
    result.timings["mentions"] = clock.lap();

    auto context = filter_lacking_context(std::move(mentions), config.min_context_tokens);
    result.counts.removed_lacking_context = context.removed.size();
    auto code = filter_boilerplate_code(std::move(context.kept), config.boilerplate_patterns);
    result.counts.removed_boilerplate_code = code.removed.size();
    mentions = std::move(code.kept);
    result.counts.after_context_filters = mentions.size();

    if (ner) {
        NerFilterStats ner_stats;
        auto filtered = filter_by_ner(std::move(mentions), *ner, config.blocked_labels, config.ner_coverage, &ner_stats);
        result.counts.removed_ner = filtered.removed.size();
        result.counts.ner_unknown_document_annotations = ner_stats.unknown_document_annotations;
        mentions = std::move(filtered.kept);
    }
    result.counts.after_ner_filter = mentions.size();
    result.timings["filters"] = clock.lap();

    auto uncapped = assemble_chains(std::move(mentions), &result.registry);
    auto capped = control_diversity(uncapped, config.max_identical);
    for (const auto &chain : capped)
        result.counts.after_diversity += chain.mentions.size();
    result.counts.removed_diversity = result.counts.after_ner_filter - result.counts.after_diversity;
    result.counts.chains = capped.size();

    result.splits = make_splits(std::move(capped), config.n_eval_clusters, config.dev_fraction, config.seed);
    if (config.keep_diversity)
        result.uncontrolled = apply_assignment(std::move(uncapped), result.splits.assignment());
    result.timings["splits"] = clock.lap();

    log::info("extract_done", to_json(result.counts));
    return result;
}

std::vector<Candidate> make_candidates(const ExtractResult &result) {
    std::vector<Candidate> out;
    for (const auto *split : {&result.splits.dev, &result.splits.test}) {
        for (const auto &chain : split->chains) {
            auto summary = result.pivot_summaries.find(chain.pivot_title);
            for (const auto &m : chain.mentions)
                out.push_back({split->name, chain.pivot_title,
                               summary == result.pivot_summaries.end() ? std::string() : summary->second, m});
        }
    }
    return out;
}

std::vector<std::string> write_dataset(const std::filesystem::path &out_dir, const ExtractResult &result) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto *split : {&result.splits.train, &result.splits.dev, &result.splits.test}) {
        write_split(out_dir / (split->name + ".jsonl"), *split);
        written.push_back(split->name + ".jsonl");
    }
    write_candidates(out_dir / "candidates.jsonl", make_candidates(result));
    written.push_back("candidates.jsonl");

    util::JsonlWriter pivots(out_dir / "pivots.jsonl");
    for (const auto &title : result.registry.titles_by_cluster()) {
        const auto &info = *result.registry.find(title);
        auto summary = result.pivot_summaries.find(title);
        pivots.write({{"cluster_id", info.cluster_id},
                      {"pivot_title", title},
                      {"infobox_type", info.infobox_type},
                      {"pivot_summary", summary == result.pivot_summaries.end() ? "" : summary->second}});
    }
    pivots.close();
    written.push_back("pivots.jsonl");

    if (result.uncontrolled) {
        std::filesystem::create_directories(out_dir / "uncontrolled");
        const auto &u = *result.uncontrolled;
        for (const auto *split : {&u.train, &u.dev, &u.test}) {
            write_split(out_dir / "uncontrolled" / (split->name + ".jsonl"), *split);
            written.push_back("uncontrolled/" + split->name + ".jsonl");
        }
    }
    return written;
}

} // namespace wec::pipeline
