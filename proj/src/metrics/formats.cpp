#include "wec/metrics/formats.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "wec/util/error.h"
#include "wec/util/jsonl.h"

namespace wec::metrics {

namespace {

using SpanKey = std::tuple<std::string, std::size_t, std::size_t>;

bool parse_long(std::string_view s, long &out) {
    if (s.empty() || s.size() > 18)
        return false;
    long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::vector<ConllMention> read_conll(std::istream &in) {
    std::vector<ConllMention> out;
    std::string line, document;
    bool in_document = false;
    std::size_t token = 0, line_no = 0;
    // Open mentions per cluster id: (start token, first word).
    std::map<long, std::vector<std::pair<std::size_t, std::string>>> open;

    auto fail = [&](const std::string &msg) { throw InputError("line " + std::to_string(line_no) + ": " + msg); };
    auto check_closed = [&] {
        for (const auto &[cluster, starts] : open)
            if (!starts.empty())
                fail("mention of cluster " + std::to_string(cluster) + " is never closed");
        open.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.rfind("#begin document", 0) == 0) {
            check_closed();
            document = trim(t.substr(15));
            in_document = true;
            token = 0;
            continue;
        }
        if (t.rfind("#end document", 0) == 0) {
            check_closed();
            in_document = false;
            continue;
        }
        if (t.empty() || t[0] == '#')
            continue;
        if (!in_document)
            fail("token line outside #begin document / #end document");

        std::istringstream cols(t);
        std::vector<std::string> fields;
        for (std::string f; cols >> f;)
            fields.push_back(f);
        const std::string &coref = fields.back();
        const std::string word = fields.size() >= 4 ? fields[3] : fields.front();
        if (coref != "-" && coref != "_") {
            std::size_t pos = 0;
            while (pos <= coref.size()) {
                std::size_t bar = coref.find('|', pos);
                if (bar == std::string::npos)
                    bar = coref.size();
                std::string_view part(coref.data() + pos, bar - pos);
                pos = bar + 1;
                const bool opens = !part.empty() && part.front() == '(';
                const bool closes = !part.empty() && part.back() == ')';
                if (opens)
                    part.remove_prefix(1);
                if (closes && !part.empty())
                    part.remove_suffix(1);
                long cluster = 0;
                if ((!opens && !closes) || !parse_long(part, cluster))
                    fail("bad coreference column '" + coref + "'");
                if (opens && closes) {
                    out.push_back({document, token, token, cluster, word});
                } else if (opens) {
                    open[cluster].push_back({token, word});
                } else {
                    auto &starts = open[cluster];
                    if (starts.empty())
                        fail("closing bracket for cluster " + std::to_string(cluster) + " without an opening one");
                    out.push_back({document, starts.back().first, token, cluster, starts.back().second});
                    starts.pop_back();
                }
            }
        }
        ++token;
    }
    if (in_document)
        fail("missing #end document");
    check_closed();
    return out;
}

std::vector<ConllMention> read_conll(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    try {
        return read_conll(in);
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

Partition canonical(const Partition &partition) {
    auto clusters = partition.clusters();
    for (auto &c : clusters)
        std::sort(c.begin(), c.end());
    std::sort(clusters.begin(), clusters.end());
    return Partition(std::move(clusters));
}

void write_conll(std::ostream &out, const Partition &partition, const std::string &document) {
    const Partition p = canonical(partition);
    std::vector<std::pair<MentionId, std::size_t>> rows;
    for (std::size_t c = 0; c < p.size(); ++c)
        for (MentionId id : p.clusters()[c])
            rows.push_back({id, c});
    std::sort(rows.begin(), rows.end());
    out << "#begin document (" << document << "); part 000\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        out << document << "\t0\t" << i << "\tm" << rows[i].first << "\t(" << rows[i].second << ")\n";
    out << "#end document\n";
}

std::map<SpanKey, MentionId> conll_mention_ids(const std::vector<ConllMention> &mentions) {
    std::map<SpanKey, MentionId> ids;
    bool named = !mentions.empty();
    for (const auto &m : mentions) {
        long id = 0;
        if (m.begin != m.end || m.word.size() < 2 || m.word[0] != 'm' || !parse_long(m.word.substr(1), id)) {
            named = false;
            break;
        }
    }
    if (named) {
        std::map<MentionId, SpanKey> by_id;
        for (const auto &m : mentions) {
            long id = 0;
            parse_long(m.word.substr(1), id);
            auto [it, inserted] = by_id.emplace(id, m.key());
            if (!inserted && it->second != SpanKey(m.key())) {
                named = false;
                break;
            }
            ids[m.key()] = id;
        }
        if (named)
            return ids;
        ids.clear();
    }
    for (const auto &m : mentions)
        ids.emplace(m.key(), 0);
    MentionId next = 0;
    for (auto &[key, id] : ids)
        id = next++;
    return ids;
}

Partition conll_partition(const std::vector<ConllMention> &mentions, const std::map<SpanKey, MentionId> &ids) {
    std::map<std::pair<std::string, long>, std::vector<MentionId>> clusters;
    std::map<MentionId, std::pair<std::string, long>> seen;
    for (const auto &m : mentions) {
        auto it = ids.find(m.key());
        if (it == ids.end())
            throw InputError("no mention id for span in " + m.document);
        auto [prev, inserted] = seen.emplace(it->second, std::make_pair(m.document, m.cluster));
        if (!inserted) {
            if (prev->second.second != m.cluster)
                throw InputError("a mention span in " + m.document + " carries two cluster ids");
            continue;
        }
        clusters[{m.document, m.cluster}].push_back(it->second);
    }
    std::vector<std::vector<MentionId>> out;
    for (auto &[key, members] : clusters)
        out.push_back(std::move(members));
    return Partition(std::move(out));
}

Partition read_clustering(const std::filesystem::path &path) {
    std::map<long long, std::vector<MentionId>> clusters;
    util::read_jsonl(path, [&](const nlohmann::json &r, std::size_t line) {
        try {
            clusters[r.at("cluster_id").get<long long>()].push_back(r.at("mention_id").get<MentionId>());
        } catch (const nlohmann::json::exception &e) {
            throw InputError(path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    std::vector<std::vector<MentionId>> out;
    for (auto &[id, members] : clusters)
        out.push_back(std::move(members));
    try {
        return Partition(std::move(out));
    } catch (const InputError &e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_clustering(const std::filesystem::path &path, const Partition &partition) {
    const Partition p = canonical(partition);
    util::JsonlWriter out(path);
    for (std::size_t c = 0; c < p.size(); ++c)
        for (MentionId id : p.clusters()[c])
            out.write({{"mention_id", id}, {"cluster_id", c}});
    out.close();
}

ClusteringFormat detect_format(const std::filesystem::path &path) {
    if (path.extension() == ".conll")
        return ClusteringFormat::conll;
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty())
            continue;
        return t.rfind("#begin", 0) == 0 ? ClusteringFormat::conll : ClusteringFormat::jsonl;
    }
    return ClusteringFormat::jsonl;
}

std::pair<Partition, Partition> read_key_response(const std::filesystem::path &key,
                                                  const std::filesystem::path &response) {
    const auto kf = detect_format(key), rf = detect_format(response);
    if (kf == ClusteringFormat::conll && rf == ClusteringFormat::conll) {
        const auto km = read_conll(key), rm = read_conll(response);
        std::vector<ConllMention> both = km;
        both.insert(both.end(), rm.begin(), rm.end());
        const auto ids = conll_mention_ids(both);
        return {conll_partition(km, ids), conll_partition(rm, ids)};
    }
    auto load = [](const std::filesystem::path &path, ClusteringFormat f) {
        if (f == ClusteringFormat::jsonl)
            return read_clustering(path);
        const auto mentions = read_conll(path);
        return conll_partition(mentions, conll_mention_ids(mentions));
    };
    return {load(key, kf), load(response, rf)};
}

} // namespace wec::metrics
