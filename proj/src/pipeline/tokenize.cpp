#include "wec/pipeline/tokenize.h"

#include <set>

#include "wec/util/error.h"
#include "wec/util/utf8.h"

namespace wec::pipeline {

namespace {

struct CodePoint {
    char32_t cp;
    std::size_t begin;
    std::size_t end;
};

bool is_joiner(char32_t cp) {
    return cp == U'\'' || cp == U'’' || cp == U'-' || cp == U'.' || cp == U',';
}

const std::set<std::string> &closing_tokens() {
    static const std::set<std::string> s{".", ",", ";", ":", "!", "?", ")", "]", "}", "%",
                                         "»", "”", "’", "…"};
    return s;
}

const std::set<std::string> &opening_tokens() {
    static const std::set<std::string> s{"(", "[", "{", "«", "“", "‘", "¿", "¡"};
    return s;
}

} // namespace

std::vector<Token> tokenize(std::string_view text, const std::vector<std::size_t> &boundaries) {
    std::vector<CodePoint> cps;
    for (std::size_t pos = 0; pos < text.size();) {
        const std::size_t begin = pos;
        const char32_t cp = utf8::decode(text, pos);
        cps.push_back({cp, begin, pos});
    }
    std::vector<bool> forced(text.size() + 1, false);
    for (std::size_t b : boundaries)
        if (b <= text.size())
            forced[b] = true;

    std::vector<Token> tokens;
    bool open = false;
    auto flush = [&] { open = false; };
    auto start = [&](std::size_t i) {
        tokens.push_back({std::string(text.substr(cps[i].begin, cps[i].end - cps[i].begin)),
                          {cps[i].begin, cps[i].end}});
        open = true;
    };
    auto extend = [&](std::size_t i) {
        Token &t = tokens.back();
        t.text.append(text.substr(cps[i].begin, cps[i].end - cps[i].begin));
        t.span.end = cps[i].end;
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        const auto &c = cps[i];
        if (forced[c.begin])
            flush();
        if (utf8::is_space(c.cp)) {
            flush();
            continue;
        }
        if (utf8::is_punct(c.cp)) {
            const bool joins = open && is_joiner(c.cp) && i > 0 && utf8::is_alnum(cps[i - 1].cp) &&
                               i + 1 < cps.size() && utf8::is_alnum(cps[i + 1].cp) &&
                               !forced[c.end];
            if (joins) {
                extend(i);
            } else {
                start(i);
                flush();
            }
            continue;
        }
        if (open)
            extend(i);
        else
            start(i);
    }
    return tokens;
}

std::string detokenize(const std::vector<std::string> &tokens, std::size_t first, std::size_t last) {
    if (first > last || last >= tokens.size())
        throw ContractError("detokenize: span out of range");
    std::string out = tokens[first];
    for (std::size_t i = first + 1; i <= last; ++i) {
        if (!closing_tokens().count(tokens[i]) && !opening_tokens().count(tokens[i - 1]))
            out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string detokenize(const std::vector<std::string> &tokens) {
    return tokens.empty() ? std::string() : detokenize(tokens, 0, tokens.size() - 1);
}

} // namespace wec::pipeline
