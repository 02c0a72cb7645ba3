#include "wec/wikitext/dump_reader.h"

#include <charconv>
#include <deque>
#include <string>
#include <vector>

#include <expat.h>

#include "wec/util/error.h"
#include "wec/util/log.h"
#include "wec/wikitext/title.h"

namespace wec::wikitext {

namespace {

enum class Field { none, title, ns, id, text };

struct PageBuilder {
    std::string title;
    std::string ns;
    std::string id;
    std::string text;
    bool has_title = false;
    bool has_id = false;

    std::size_t bytes() const { return title.size() + ns.size() + id.size() + text.size(); }
    void clear() { *this = PageBuilder{}; }
};

std::optional<std::int64_t> parse_int(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        return std::nullopt;
    return value;
}

} // namespace

struct DumpReader::Impl {
    std::istream &in;
    DumpOptions options;
    DumpStats stats;
    XML_Parser parser = nullptr;

    std::vector<std::string> stack;
    PageBuilder page;
    Field field = Field::none;
    bool in_page = false;

    std::deque<RawPage> ready;
    std::size_t ready_bytes = 0;
    std::vector<char> buffer;
    bool finished = false;
    std::optional<std::string> failure;

    Impl(std::istream &stream, DumpOptions opts) : in(stream), options(std::move(opts)) {
        parser = XML_ParserCreate(nullptr);
        if (!parser)
            throw Error("expat: cannot create parser");
        XML_SetUserData(parser, this);
        XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
        XML_SetCharacterDataHandler(parser, &Impl::on_chars);
        buffer.resize(options.chunk_size == 0 ? 4096 : options.chunk_size);
    }

    ~Impl() {
        if (parser)
            XML_ParserFree(parser);
    }

    void note_buffered() {
        const std::size_t now = ready_bytes + (in_page ? page.bytes() : 0);
        if (now > stats.peak_buffered_bytes)
            stats.peak_buffered_bytes = now;
    }

    static void on_start(void *user, const XML_Char *name, const XML_Char **) {
        auto &self = *static_cast<Impl *>(user);
        const std::string_view tag = name;
        const std::string_view parent = self.stack.empty() ? std::string_view{} : self.stack.back();
        if (tag == "page") {
            self.in_page = true;
            self.page.clear();
        } else if (self.in_page) {
            if (parent == "page" && tag == "title") {
                self.field = Field::title;
                self.page.has_title = true;
            } else if (parent == "page" && tag == "ns") {
                self.field = Field::ns;
            } else if (parent == "page" && tag == "id") {
                self.field = Field::id;
                self.page.has_id = true;
            } else if (parent == "revision" && tag == "text") {
                // Multi-revision dumps: the last revision wins.
                self.page.text.clear();
                self.field = Field::text;
            }
        }
        self.stack.emplace_back(tag);
    }

    static void on_end(void *user, const XML_Char *name) {
        auto &self = *static_cast<Impl *>(user);
        self.field = Field::none;
        if (!self.stack.empty())
            self.stack.pop_back();
        if (std::string_view(name) == "page" && self.in_page) {
            self.finish_page();
            self.in_page = false;
        }
    }

    static void on_chars(void *user, const XML_Char *data, int len) {
        auto &self = *static_cast<Impl *>(user);
        const std::string_view chunk(data, static_cast<std::size_t>(len));
        switch (self.field) {
        case Field::title: self.page.title.append(chunk); break;
        case Field::ns: self.page.ns.append(chunk); break;
        case Field::id: self.page.id.append(chunk); break;
        case Field::text: self.page.text.append(chunk); break;
        case Field::none: return;
        }
        self.note_buffered();
    }

    void skip(std::string_view reason) {
        ++stats.pages_skipped;
        log::warn("dump.page_skipped", {{"reason", std::string(reason)},
                                        {"title", page.title},
                                        {"line", XML_GetCurrentLineNumber(parser)}});
    }

    void finish_page() {
        ++stats.pages_seen;
        if (!page.has_title || !page.has_id) {
            skip(page.has_title ? "missing id" : "missing title");
            return;
        }
        const auto id = parse_int(page.id);
        if (!id || *id < 0) {
            skip("non-numeric page id");
            return;
        }
        int ns = 0;
        if (!page.ns.empty()) {
            const auto parsed = parse_int(page.ns);
            if (!parsed) {
                skip("non-numeric namespace");
                return;
            }
            ns = static_cast<int>(*parsed);
        }
        RawPage raw;
        raw.page_id = *id;
        raw.ns = ns;
        raw.title = normalize_title(page.title);
        if (raw.title.empty()) {
            skip("empty title");
            return;
        }
        if (options.namespaces && !options.namespaces->contains(ns)) {
            ++stats.pages_filtered;
            return;
        }
        raw.wikitext = std::move(page.text);
        raw.redirect_target = redirect_target(raw.wikitext);
        ready_bytes += raw.title.size() + raw.wikitext.size();
        ready.push_back(std::move(raw));
        note_buffered();
    }

    // Feeds one more chunk. Returns false once the stream is exhausted or broken.
    bool pump() {
        if (finished)
            return false;
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto got = static_cast<int>(in.gcount());
        const bool last = got == 0 || in.eof();
        if (XML_Parse(parser, buffer.data(), got, last ? XML_TRUE : XML_FALSE) == XML_STATUS_ERROR) {
            failure = std::string("malformed or truncated dump at line ") +
                      std::to_string(XML_GetCurrentLineNumber(parser)) + ": " +
                      XML_ErrorString(XML_GetErrorCode(parser));
            finished = true;
            return false;
        }
        if (last)
            finished = true;
        return true;
    }
};

DumpReader::DumpReader(std::istream &in, DumpOptions options)
    : impl_(std::make_unique<Impl>(in, std::move(options))) {}

DumpReader::~DumpReader() = default;

std::optional<RawPage> DumpReader::next() {
    auto &s = *impl_;
    while (s.ready.empty() && s.pump()) {
    }
    if (!s.ready.empty()) {
        RawPage page = std::move(s.ready.front());
        s.ready.pop_front();
        s.ready_bytes -= page.title.size() + page.wikitext.size();
        ++s.stats.pages_yielded;
        return page;
    }
    if (s.failure) {
        const std::string message = *s.failure;
        s.failure.reset();
        log::error("dump.stream_error", {{"message", message}, {"pages_yielded", s.stats.pages_yielded}});
        throw InputError(message);
    }
    return std::nullopt;
}

const DumpStats &DumpReader::stats() const { return impl_->stats; }

DumpStats parse_dump(std::istream &in, const std::function<void(RawPage &&)> &sink, DumpOptions options) {
    DumpReader reader(in, std::move(options));
    while (auto page = reader.next())
        sink(std::move(*page));
    return reader.stats();
}

} // namespace wec::wikitext
