#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wec/pipeline/splits.h"
#include "wec/pipeline/types.h"

namespace wec::pipeline {

/// One mention record per line, chains in cluster-id order.
void write_split(const std::filesystem::path &path, const DatasetSplit &split);
std::vector<Mention> read_mentions(const std::filesystem::path &path);
DatasetSplit read_split(const std::filesystem::path &path, const std::string &name);

/// A dev/test mention awaiting manual validation, with what an annotator
/// needs to judge it.
struct Candidate {
    std::string split;
    std::string pivot_title;
    std::string pivot_summary;
    Mention mention;
};

nlohmann::json to_json(const Candidate &candidate);
Candidate candidate_from_json(const nlohmann::json &record);

void write_candidates(const std::filesystem::path &path, const std::vector<Candidate> &candidates);
std::vector<Candidate> read_candidates(const std::filesystem::path &path);

/// Reads the released WEC-Eng JSON (an array of records with coref_chain,
/// coref_link, doc_id, mention_context, tokens_number and tokens_str).
/// Records are returned in file order; mention ids are the record
/// positions.
std::vector<Mention> read_wec_eng_json(const std::filesystem::path &path);

} // namespace wec::pipeline
