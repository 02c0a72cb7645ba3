#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/pipeline/dataset_io.h"
#include "wec/pipeline/filters.h"
#include "wec/pipeline/mentions.h"
#include "wec/pipeline/pivots.h"
#include "wec/pipeline/splits.h"
#include "wec/wikitext/page_parser.h"

namespace wec::pipeline {

struct ExtractConfig {
    Allowlist allowlist;
    std::size_t max_identical = kDefaultMaxIdentical;
    std::size_t n_eval_clusters = 0;
    double dev_fraction = kDefaultDevFraction;
    std::uint64_t seed = 0;
    bool keep_diversity = false;
    unsigned workers = 1;
    std::size_t min_context_tokens = kDefaultMinContextTokens;
    std::vector<std::string> boilerplate_patterns = default_boilerplate_patterns();
    std::set<std::string> blocked_labels = default_blocked_labels();
    double ner_coverage = kDefaultNerCoverage;
    MentionConfig mention;
    wikitext::MarkupConfig markup;
    std::set<int> namespaces{0};
    /// Pages handed to the worker pool at a time in the mention pass.
    std::size_t batch_pages = 256;
};

/// Mention counts after each stage; every stage only removes.
struct StageCounts {
    std::size_t pages = 0;
    std::size_t redirects = 0;
    std::size_t pivots = 0;
    std::size_t raw_mentions = 0;
    std::size_t dropped_bad_offsets = 0;
    std::size_t removed_lacking_context = 0;
    std::size_t removed_boilerplate_code = 0;
    std::size_t after_context_filters = 0;
    std::size_t removed_ner = 0;
    std::size_t ner_unknown_document_annotations = 0;
    std::size_t after_ner_filter = 0;
    std::size_t removed_diversity = 0;
    std::size_t after_diversity = 0;
    std::size_t chains = 0;
};

nlohmann::json to_json(const StageCounts &counts);

struct ExtractResult {
    EventRegistry registry;
    std::map<std::string, std::string> pivot_summaries;
    StageCounts counts;
    Splits splits;
    /// The same cluster-to-split assignment before the diversity cap.
    std::optional<Splits> uncontrolled;
    /// Wall-clock seconds per stage.
    std::map<std::string, double> timings;
};

/// Opens a fresh stream over the dump; called once per pass.
using StreamOpener = std::function<std::unique_ptr<std::istream>()>;

/// Two streaming passes over the dump: pivots and redirects first, then
/// parsing and mention collection on `workers` threads. Output does not
/// depend on the worker count.
ExtractResult run_extract(const StreamOpener &open_dump, const ExtractConfig &config, const NerIndex *ner = nullptr);

/// Dev and test mentions wrapped for the validation service.
std::vector<Candidate> make_candidates(const ExtractResult &result);

/// Writes train/dev/test.jsonl, candidates.jsonl, pivots.jsonl and, when
/// present, uncontrolled/{train,dev,test}.jsonl. Returns the files written,
/// relative to `out_dir`.
std::vector<std::string> write_dataset(const std::filesystem::path &out_dir, const ExtractResult &result);

} // namespace wec::pipeline
