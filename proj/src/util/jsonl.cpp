#include "wec/util/jsonl.h"

#include <sstream>

#include "wec/util/error.h"

namespace wec::util {

void read_jsonl(const std::filesystem::path &path,
                const std::function<void(const nlohmann::json &, std::size_t)> &fn) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error &e) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        fn(record, line_no);
    }
}

JsonlWriter::JsonlWriter(const std::filesystem::path &path) : path_(path), out_(path, std::ios::binary) {
    if (!out_)
        throw InputError("cannot write " + path.string());
}

void JsonlWriter::write(const nlohmann::json &record) {
    out_ << dump_record(record) << '\n';
    ++count_;
}

void JsonlWriter::close() {
    out_.flush();
    if (!out_)
        throw Error("write failed: " + path_.string());
    out_.close();
}

std::string dump_record(const nlohmann::json &record) {
    return record.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_file_atomic(const std::filesystem::path &path, const std::string &text) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot write " + tmp.string());
        out << text;
        out.flush();
        if (!out)
            throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace wec::util
