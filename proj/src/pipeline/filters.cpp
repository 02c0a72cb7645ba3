#include "wec/pipeline/filters.h"

#include <algorithm>
#include <unordered_map>

#include "wec/util/error.h"
#include "wec/util/jsonl.h"
#include "wec/util/log.h"

namespace wec::pipeline {

FilterResult filter_lacking_context(std::vector<Mention> mentions, std::size_t min_tokens) {
    FilterResult out;
    for (auto &m : mentions) {
        const std::size_t outside = m.tokens.size() - (m.last - m.first + 1);
        (outside < min_tokens ? out.removed : out.kept).push_back(std::move(m));
    }
    return out;
}

std::vector<std::string> default_boilerplate_patterns() {
    return {R"(<\s*([A-Za-z][A-Za-z0-9]*)\b[^<>]*>[^<>]*<\s*/\s*\1\s*>)",
            R"(\{\s*"[^"\n]*"\s*:)"};
}

FilterResult filter_boilerplate_code(std::vector<Mention> mentions, const std::vector<std::string> &patterns) {
    std::vector<std::regex> compiled;
    for (const auto &p : patterns) {
        try {
            compiled.emplace_back(p, std::regex::ECMAScript);
        } catch (const std::regex_error &e) {
            throw InputError("invalid boilerplate pattern '" + p + "': " + e.what());
        }
    }
    // Paragraph texts are shared between mentions of the same paragraph.
    std::unordered_map<const std::string *, bool> verdicts;
    const bool defaults = patterns == default_boilerplate_patterns();
    auto is_code = [&](const std::string &text) {
        // Both default detectors need one of these characters; skipping the
        // regex engine otherwise keeps the filter linear on long paragraphs.
        if (defaults && text.find_first_of("<{") == std::string::npos)
            return false;
        for (const auto &re : compiled)
            if (std::regex_search(text, re))
                return true;
        return false;
    };

    FilterResult out;
    for (auto &m : mentions) {
        bool code = false;
        if (m.origin.paragraph_text) {
            auto [it, inserted] = verdicts.try_emplace(m.origin.paragraph_text.get(), false);
            if (inserted)
                it->second = is_code(*m.origin.paragraph_text);
            code = it->second;
        } else {
            code = is_code(std::string());
        }
        (code ? out.removed : out.kept).push_back(std::move(m));
    }
    return out;
}

const std::set<std::string> &ontonotes_labels() {
    static const std::set<std::string> labels{
        "PERSON",   "NORP",  "FAC",  "ORG",     "GPE",     "LOC",      "PRODUCT", "EVENT",    "WORK_OF_ART",
        "LAW",      "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY",    "QUANTITY", "ORDINAL", "CARDINAL"};
    return labels;
}

const std::set<std::string> &default_blocked_labels() {
    static const std::set<std::string> labels{"PERSON", "GPE", "LOC", "DATE", "NORP"};
    return labels;
}

NerIndex::NerIndex(std::set<std::string> tagset) : tagset_(std::move(tagset)) {}

void NerIndex::add(NerAnnotation a) {
    if (!tagset_.count(a.label))
        throw InputError("NE label '" + a.label + "' is not in the tag set");
    if (a.char_span.begin >= a.char_span.end)
        throw InputError("NE annotation with empty span in '" + a.source_title + "'");
    by_paragraph_[{a.source_title, a.paragraph_index}].push_back(std::move(a));
    ++count_;
}

void NerIndex::load(const std::filesystem::path &path) {
    util::read_jsonl(path, [&](const nlohmann::json &r, std::size_t line) {
        NerAnnotation a;
        try {
            a.source_title = r.at("source_title").get<std::string>();
            a.paragraph_index = r.at("paragraph_index").get<std::size_t>();
            a.char_span = {r.at("char_start").get<std::size_t>(), r.at("char_end").get<std::size_t>()};
            a.label = r.at("label").get<std::string>();
            add(std::move(a));
        } catch (const nlohmann::json::exception &e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        } catch (const InputError &e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
}

const std::vector<NerAnnotation> *NerIndex::lookup(const std::string &title, std::size_t paragraph) const {
    auto it = by_paragraph_.find({title, paragraph});
    return it == by_paragraph_.end() ? nullptr : &it->second;
}

std::map<std::string, std::size_t> NerIndex::title_counts() const {
    std::map<std::string, std::size_t> out;
    for (const auto &[key, anns] : by_paragraph_)
        out[key.first] += anns.size();
    return out;
}

FilterResult filter_by_ner(std::vector<Mention> mentions, const NerIndex &ner, const std::set<std::string> &blocked,
                           double coverage, NerFilterStats *stats) {
    std::set<std::string> sources;
    for (const auto &m : mentions)
        sources.insert(m.source_title);
    std::size_t unknown = 0;
    std::vector<std::string> sample;
    for (const auto &[title, count] : ner.title_counts()) {
        if (sources.count(title))
            continue;
        unknown += count;
        if (sample.size() < 5)
            sample.push_back(title);
    }
    if (unknown)
        log::info("ner_unknown_documents", {{"annotations", unknown}, {"sample", sample}});
    if (stats)
        stats->unknown_document_annotations = unknown;

    FilterResult out;
    for (auto &m : mentions) {
        bool hit = false;
        if (const auto *anns = ner.lookup(m.source_title, m.origin.paragraph_index)) {
            const auto &span = m.origin.anchor;
            const double width = static_cast<double>(span.size());
            for (const auto &a : *anns) {
                if (!blocked.count(a.label))
                    continue;
                const std::size_t lo = std::max(span.begin, a.char_span.begin);
                const std::size_t hi = std::min(span.end, a.char_span.end);
                if (hi > lo && static_cast<double>(hi - lo) >= coverage * width) {
                    hit = true;
                    break;
                }
            }
        }
        (hit ? out.removed : out.kept).push_back(std::move(m));
    }
    return out;
}

} // namespace wec::pipeline
