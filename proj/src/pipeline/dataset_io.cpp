#include "wec/pipeline/dataset_io.h"

#include <algorithm>

#include "wec/util/error.h"
#include "wec/util/jsonl.h"

namespace wec::pipeline {

void write_split(const std::filesystem::path &path, const DatasetSplit &split) {
    util::JsonlWriter out(path);
    for (const auto &chain : split.chains)
        for (const auto &m : chain.mentions)
            out.write(to_json(m));
    out.close();
}

std::vector<Mention> read_mentions(const std::filesystem::path &path) {
    std::vector<Mention> out;
    util::read_jsonl(path, [&](const nlohmann::json &r, std::size_t line) {
        try {
            out.push_back(mention_from_json(r));
        } catch (const InputError &e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return out;
}

DatasetSplit read_split(const std::filesystem::path &path, const std::string &name) {
    return DatasetSplit{name, assemble_chains(read_mentions(path))};
}

nlohmann::json to_json(const Candidate &c) {
    return {{"split", c.split},
            {"pivot_title", c.pivot_title},
            {"pivot_summary", c.pivot_summary},
            {"mention", to_json(c.mention)}};
}

Candidate candidate_from_json(const nlohmann::json &r) {
    Candidate c;
    try {
        c.split = r.at("split").get<std::string>();
        c.pivot_title = r.at("pivot_title").get<std::string>();
        c.pivot_summary = r.value("pivot_summary", "");
        c.mention = mention_from_json(r.at("mention"));
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("bad candidate record: ") + e.what());
    }
    if (c.split != "dev" && c.split != "test")
        throw InputError("candidate split must be dev or test, got '" + c.split + "'");
    return c;
}

void write_candidates(const std::filesystem::path &path, const std::vector<Candidate> &candidates) {
    util::JsonlWriter out(path);
    for (const auto &c : candidates)
        out.write(to_json(c));
    out.close();
}

std::vector<Candidate> read_candidates(const std::filesystem::path &path) {
    std::vector<Candidate> out;
    util::read_jsonl(path, [&](const nlohmann::json &r, std::size_t line) {
        try {
            out.push_back(candidate_from_json(r));
        } catch (const InputError &e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return out;
}

std::vector<Mention> read_wec_eng_json(const std::filesystem::path &path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(util::read_file(path));
    } catch (const nlohmann::json::parse_error &e) {
        throw InputError(path.string() + ": " + e.what());
    }
    if (!doc.is_array())
        throw InputError(path.string() + ": expected a JSON array of mention records");
    std::vector<Mention> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto &r = doc[i];
        Mention m;
        try {
            m.mention_id = static_cast<std::int64_t>(i);
            m.tokens = r.at("mention_context").get<std::vector<std::string>>();
            const auto indices = r.at("tokens_number").get<std::vector<std::size_t>>();
            if (indices.empty())
                throw InputError("empty tokens_number");
            m.first = *std::min_element(indices.begin(), indices.end());
            m.last = *std::max_element(indices.begin(), indices.end());
            m.mention_text = r.at("tokens_str").get<std::string>();
            m.source_title = r.at("doc_id").get<std::string>();
            m.target_title = r.value("coref_link", "");
            const auto &chain = r.at("coref_chain");
            m.cluster_id = chain.is_string() ? std::stoi(chain.get<std::string>()) : chain.get<int>();
        } catch (const nlohmann::json::exception &e) {
            throw InputError(path.string() + ": record " + std::to_string(i) + ": " + e.what());
        } catch (const std::logic_error &e) {
            throw InputError(path.string() + ": record " + std::to_string(i) + ": " + e.what());
        }
        if (m.last >= m.tokens.size())
            throw InputError(path.string() + ": record " + std::to_string(i) + ": span out of range");
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace wec::pipeline
