#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <optional>

#include "wec/metrics/metrics.h"
#include "wec/pipeline/extract.h"
#include "wec/pipeline/tokenize.h"
#include "wec/resolver/clustering.h"
#include "wec/stats/corpus_stats.h"
#include "wec/util/error.h"
#include "wec/validation/judgment.h"
#include "wec/version.h"
#include "wec/wikitext/infobox.h"
#include "wec/wikitext/page_parser.h"
#include "wec/wikitext/title.h"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Records cross the boundary as JSON text so both sides keep their own
// native containers.
py::object to_py(const json &value) { return py::module_::import("json").attr("loads")(value.dump()); }

json from_py(const py::handle &value) {
    return json::parse(py::module_::import("json").attr("dumps")(value).cast<std::string>());
}

wec::metrics::Partition partition(const std::vector<std::vector<wec::metrics::MentionId>> &clusters) {
    return wec::metrics::Partition(clusters);
}

std::vector<wec::pipeline::Mention> mentions_from(const py::iterable &records) {
    std::vector<wec::pipeline::Mention> out;
    for (const auto &r : records)
        out.push_back(wec::pipeline::mention_from_json(from_py(r)));
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the event coreference corpus toolkit";
    m.attr("__version__") = wec::kVersion;

    auto base = py::register_exception<wec::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<wec::InputError>(m, "InputError", base.ptr());
    py::register_exception<wec::ContractError>(m, "ContractError", base.ptr());

    m.def("normalize_title", &wec::wikitext::normalize_title, py::arg("title"));
    m.def("normalize_infobox_type", &wec::wikitext::normalize_infobox_type, py::arg("name"));
    m.def(
        "infobox_type", [](const std::string &wikitext) { return wec::wikitext::extract_infobox_type(wikitext); },
        py::arg("wikitext"));
    m.def(
        "parse_page",
        [](const std::string &title, const std::string &wikitext, std::int64_t page_id) {
            wec::wikitext::RawPage raw;
            raw.page_id = page_id;
            raw.title = title;
            raw.wikitext = wikitext;
            return to_py(wec::wikitext::to_json(wec::wikitext::parse_page(raw)));
        },
        py::arg("title"), py::arg("wikitext"), py::arg("page_id") = 0,
        "Parses one article into a ParsedPage record (dict).");
    m.def(
        "tokenize",
        [](const std::string &text) {
            std::vector<std::tuple<std::string, std::size_t, std::size_t>> out;
            for (const auto &t : wec::pipeline::tokenize(text))
                out.emplace_back(t.text, t.span.begin, t.span.end);
            return out;
        },
        py::arg("text"), "Tokens as (text, byte_begin, byte_end).");

    m.def(
        "extract",
        [](const std::string &dump, const std::string &allowlist, const std::string &out_dir,
           std::optional<std::string> ner, std::size_t eval_clusters, std::uint64_t seed, bool keep_diversity,
           unsigned workers) {
            wec::pipeline::ExtractConfig config;
            config.allowlist = wec::pipeline::load_allowlist(allowlist);
            config.n_eval_clusters = eval_clusters;
            config.seed = seed;
            config.keep_diversity = keep_diversity;
            config.workers = workers;
            std::optional<wec::pipeline::NerIndex> index;
            if (ner) {
                index.emplace();
                index->load(*ner);
            }
            auto open = [&]() -> std::unique_ptr<std::istream> {
                auto in = std::make_unique<std::ifstream>(dump, std::ios::binary);
                if (!*in)
                    throw wec::InputError("cannot open " + dump);
                return in;
            };
            wec::pipeline::ExtractResult result;
            {
                py::gil_scoped_release release;
                result = wec::pipeline::run_extract(open, config, index ? &*index : nullptr);
                wec::pipeline::write_dataset(out_dir, result);
            }
            return to_py(wec::pipeline::to_json(result.counts));
        },
        py::arg("dump"), py::arg("allowlist"), py::arg("out_dir"), py::arg("ner") = py::none(),
        py::arg("eval_clusters") = 0, py::arg("seed") = 0, py::arg("keep_diversity") = false,
        py::arg("workers") = 1, "Runs the dataset pipeline on an uncompressed dump; returns the stage counts.");

    m.def(
        "corpus_stats",
        [](const py::iterable &records, const std::string &name) {
            wec::pipeline::DatasetSplit split{name, wec::pipeline::assemble_chains(mentions_from(records))};
            return to_py(wec::stats::to_json(wec::stats::compute_stats(split, wec::stats::LemmaResource{})));
        },
        py::arg("mentions"), py::arg("name") = "split");

    m.def(
        "evaluate",
        [](const std::vector<std::vector<wec::metrics::MentionId>> &key,
           const std::vector<std::vector<wec::metrics::MentionId>> &response) {
            return to_py(wec::metrics::to_json(wec::metrics::evaluate(partition(key), partition(response))));
        },
        py::arg("key"), py::arg("response"), "MUC, B3, CEAF-e and CoNLL F1 for two partitions.");
    m.def("conll_f1", &wec::metrics::conll_f1, py::arg("muc_f1"), py::arg("b_cubed_f1"), py::arg("ceaf_e_f1"));

    m.def(
        "agglomerate",
        [](const std::vector<wec::metrics::MentionId> &ids, const std::vector<std::vector<double>> &scores,
           double threshold) {
            auto matrix = wec::resolver::ScoreMatrix::from_dense(ids, scores);
            return wec::resolver::agglomerate(matrix, {threshold}).partition.clusters();
        },
        py::arg("ids"), py::arg("scores"), py::arg("threshold") = wec::resolver::kDefaultThreshold,
        "Average-link clustering of a dense symmetric score matrix.");
    m.def(
        "tune_threshold",
        [](const std::vector<std::vector<wec::metrics::MentionId>> &key, const std::vector<wec::metrics::MentionId> &ids,
           const std::vector<std::vector<double>> &scores, std::optional<std::vector<double>> grid) {
            auto matrix = wec::resolver::ScoreMatrix::from_dense(ids, scores);
            return wec::resolver::tune_threshold(partition(key), matrix,
                                                 grid ? *grid : wec::resolver::default_threshold_grid())
                .threshold;
        },
        py::arg("key"), py::arg("ids"), py::arg("scores"), py::arg("grid") = py::none());
    m.def(
        "lemma_baseline",
        [](const py::iterable &records) {
            return wec::resolver::lemma_baseline(mentions_from(records), wec::stats::LemmaResource{})
                .partition.clusters();
        },
        py::arg("mentions"), "Clusters mention records by head lemma.");

    m.def(
        "agreement",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
            return to_py(wec::validation::to_json(wec::validation::agreement_from_counts(tp, fp, fn, tn)));
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"),
        "Precision, recall and Cohen's kappa from a 2x2 confusion table.");
}
