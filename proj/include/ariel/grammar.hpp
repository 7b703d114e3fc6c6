#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ariel/errors.hpp"
#include "ariel/util.hpp"

namespace ariel {

class PrefixAutomaton;

// A terminal is one lexical entry of one or more word tokens
// (e.g. 'acoustic gramophone' is a single two-word terminal).
struct Terminal {
    std::vector<int> words;  // vocabulary ids
    std::string text;        // words joined by spaces
};

struct Symbol {
    enum Kind { Nonterminal, TerminalRef };
    Kind kind;
    int index;

    bool operator==(const Symbol&) const = default;
};

using Alternative = std::vector<Symbol>;

namespace detail {

struct GrammarData {
    std::vector<std::string> nonterminal_names;
    std::map<std::string, int> nonterminal_ids;
    std::vector<std::vector<Alternative>> productions;  // per nonterminal, file order
    std::vector<Terminal> terminals;                    // first-appearance order, deduplicated
    std::map<std::string, int> terminal_ids;            // keyed by joined text
    std::vector<std::string> vocabulary;                // word tokens, first-appearance order
    std::map<std::string, int> word_ids;
    int start = 0;
    std::string source_hash;

    // Built once at load; immutable afterwards.
    std::shared_ptr<const PrefixAutomaton> automaton;
};

}  // namespace detail

// Immutable context-free grammar over a finite language. Cheap to copy;
// all queries are pure and thread-safe.
class Grammar {
public:
    Grammar() = default;
    explicit Grammar(std::shared_ptr<const detail::GrammarData> data) : data_(std::move(data)) {}

    bool valid() const { return data_ != nullptr; }

    const std::vector<std::string>& nonterminals() const { return data_->nonterminal_names; }
    const std::vector<Terminal>& terminals() const { return data_->terminals; }
    const std::vector<std::string>& vocabulary() const { return data_->vocabulary; }
    int start() const { return data_->start; }
    const std::string& start_name() const { return data_->nonterminal_names[data_->start]; }
    const std::string& source_hash() const { return data_->source_hash; }

    const std::vector<Alternative>& alternatives(int nonterminal) const {
        return data_->productions[nonterminal];
    }
    const std::string& nonterminal_name(int id) const { return data_->nonterminal_names[id]; }
    const Terminal& terminal(int id) const { return data_->terminals[id]; }
    const std::string& word(int id) const { return data_->vocabulary[id]; }

    std::optional<int> nonterminal_id(std::string_view name) const {
        auto it = data_->nonterminal_ids.find(std::string(name));
        if (it == data_->nonterminal_ids.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> word_id(std::string_view w) const {
        auto it = data_->word_ids.find(std::string(w));
        if (it == data_->word_ids.end()) return std::nullopt;
        return it->second;
    }
    std::optional<int> terminal_id(std::string_view text) const {
        auto it = data_->terminal_ids.find(std::string(text));
        if (it == data_->terminal_ids.end()) return std::nullopt;
        return it->second;
    }

    // A lexical category is a nonterminal whose every alternative is a single
    // terminal. These are the natural preterminals for template extraction.
    bool is_lexical_category(int nonterminal) const {
        const auto& alts = data_->productions[nonterminal];
        if (alts.empty()) return false;
        for (const auto& alt : alts) {
            if (alt.size() != 1 || alt[0].kind != Symbol::TerminalRef) return false;
        }
        return true;
    }
    std::set<std::string> lexical_categories() const {
        std::set<std::string> out;
        for (size_t i = 0; i < data_->nonterminal_names.size(); ++i)
            if (is_lexical_category(static_cast<int>(i))) out.insert(data_->nonterminal_names[i]);
        return out;
    }

    const PrefixAutomaton& automaton() const { return *data_->automaton; }
    std::shared_ptr<const detail::GrammarData> data() const { return data_; }

private:
    std::shared_ptr<const detail::GrammarData> data_;
};

namespace detail {

struct RawItem {
    bool quoted;
    std::string text;  // quoted: space-separated words; bare: symbol name
    int line;
};
struct RawProduction {
    std::string lhs;
    bool lexical;  // "=>" line
    std::vector<std::vector<RawItem>> alternatives;
    int line;
};

// Strips a '#' comment, respecting single quotes.
inline std::string strip_comment(std::string_view line) {
    bool in_quote = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\'') in_quote = !in_quote;
        else if (line[i] == '#' && !in_quote) return std::string(line.substr(0, i));
    }
    return std::string(line);
}

inline std::vector<RawItem> tokenize_alternative(std::string_view s, int line_no) {
    std::vector<RawItem> items;
    size_t i = 0;
    while (i < s.size()) {
        if (s[i] == ' ' || s[i] == '\t') { ++i; continue; }
        if (s[i] == '\'') {
            size_t close = s.find('\'', i + 1);
            if (close == std::string_view::npos)
                throw SyntaxError("line " + std::to_string(line_no) + ": unbalanced quote");
            std::string content(s.substr(i + 1, close - i - 1));
            if (trim(content).empty())
                throw SyntaxError("line " + std::to_string(line_no) + ": empty terminal");
            items.push_back({true, std::string(trim(content)), line_no});
            i = close + 1;
        } else {
            size_t j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\'') ++j;
            items.push_back({false, std::string(s.substr(i, j - i)), line_no});
            i = j;
        }
    }
    return items;
}

inline std::vector<std::string_view> split_outside_quotes(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    bool in_quote = false;
    size_t start = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\'') in_quote = !in_quote;
        else if (s[i] == sep && !in_quote) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.push_back(s.substr(start));
    return parts;
}

inline bool has_lowercase(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::islower(c); });
}

std::shared_ptr<const PrefixAutomaton> build_automaton(const Grammar& g);

}  // namespace detail

// Parses the grammar text format:
//   lhs -> alt1 | alt2 | ...      productions; quoted items are terminals
//   lhs => 'multi word' | 'bar'   lexical entries, one terminal per alternative
//   start: name                   optional start override (default: first lhs)
//   # comment                     blank lines ignored
// A trailing '|' continues the alternative list on the next line. Bare symbols
// that never appear as an lhs are accepted as implicit single-word terminals
// when they contain no lowercase letters (the convention used for abstract
// grammars like "S -> A | B"); otherwise they are reported as undefined.
inline Grammar load_grammar(const std::string& source) {
    using namespace detail;
    auto data = std::make_shared<GrammarData>();
    data->source_hash = to_hex(fnv1a64(source));

    // Logical lines: strip comments, merge continuations.
    std::vector<std::pair<std::string, int>> logical;
    {
        std::string pending;
        int pending_line = 0;
        int line_no = 0;
        size_t pos = 0;
        while (pos <= source.size()) {
            size_t nl = source.find('\n', pos);
            std::string_view raw(source.data() + pos,
                                 (nl == std::string::npos ? source.size() : nl) - pos);
            pos = (nl == std::string::npos) ? source.size() + 1 : nl + 1;
            ++line_no;
            std::string line = strip_comment(raw);
            std::string_view t = trim(line);
            if (t.empty()) continue;
            if (pending.empty()) {
                pending = std::string(t);
                pending_line = line_no;
            } else {
                pending += " ";
                pending += std::string(t);
            }
            if (pending.back() == '|') continue;  // alternatives continue below
            logical.emplace_back(pending, pending_line);
            pending.clear();
        }
        if (!pending.empty())
            throw SyntaxError("line " + std::to_string(pending_line) +
                              ": production ends with '|'");
    }

    std::optional<std::string> start_name;
    std::vector<RawProduction> raws;
    for (auto& [text, line_no] : logical) {
        if (text.rfind("start:", 0) == 0) {
            start_name = std::string(trim(std::string_view(text).substr(6)));
            if (start_name->empty())
                throw SyntaxError("line " + std::to_string(line_no) + ": empty start symbol");
            continue;
        }
        size_t arrow = text.find("->");
        size_t lex = text.find("=>");
        bool lexical = lex != std::string::npos && (arrow == std::string::npos || lex < arrow);
        size_t op = lexical ? lex : arrow;
        if (op == std::string::npos)
            throw SyntaxError("line " + std::to_string(line_no) + ": expected '->' or '=>'");
        std::string lhs(trim(std::string_view(text).substr(0, op)));
        if (lhs.empty() || lhs.find('\'') != std::string::npos ||
            lhs.find(' ') != std::string::npos)
            throw SyntaxError("line " + std::to_string(line_no) + ": bad lhs '" + lhs + "'");

        RawProduction rp{lhs, lexical, {}, line_no};
        std::string_view rhs = std::string_view(text).substr(op + 2);
        for (auto part : split_outside_quotes(rhs, '|')) {
            auto items = tokenize_alternative(part, line_no);
            if (items.empty())
                throw SyntaxError("line " + std::to_string(line_no) + ": empty alternative");
            if (lexical) {
                if (items.size() != 1 || !items[0].quoted)
                    throw SyntaxError("line " + std::to_string(line_no) +
                                      ": lexical alternatives must be single quoted entries");
            }
            rp.alternatives.push_back(std::move(items));
        }
        raws.push_back(std::move(rp));
    }
    if (raws.empty()) throw SyntaxError("no productions found");

    // Pass 1: collect nonterminals (all lhs names), in first-appearance order.
    for (const auto& rp : raws) {
        if (!data->nonterminal_ids.count(rp.lhs)) {
            data->nonterminal_ids[rp.lhs] = static_cast<int>(data->nonterminal_names.size());
            data->nonterminal_names.push_back(rp.lhs);
        }
    }
    data->productions.resize(data->nonterminal_names.size());

    auto intern_terminal = [&](const std::string& text, int line_no) -> int {
        auto words = split_words(text);
        if (words.empty())
            throw SyntaxError("line " + std::to_string(line_no) + ": empty terminal");
        std::string key = join(words);
        auto it = data->terminal_ids.find(key);
        if (it != data->terminal_ids.end()) return it->second;
        Terminal t;
        t.text = key;
        for (const auto& w : words) {
            auto wit = data->word_ids.find(w);
            int wid;
            if (wit == data->word_ids.end()) {
                wid = static_cast<int>(data->vocabulary.size());
                data->word_ids[w] = wid;
                data->vocabulary.push_back(w);
            } else {
                wid = wit->second;
            }
            t.words.push_back(wid);
        }
        int id = static_cast<int>(data->terminals.size());
        data->terminal_ids[key] = id;
        data->terminals.push_back(std::move(t));
        return id;
    };

    // Pass 2: resolve alternatives.
    for (const auto& rp : raws) {
        int nt = data->nonterminal_ids.at(rp.lhs);
        for (const auto& raw_alt : rp.alternatives) {
            Alternative alt;
            for (const auto& item : raw_alt) {
                if (item.quoted) {
                    alt.push_back({Symbol::TerminalRef, intern_terminal(item.text, item.line)});
                } else if (auto it = data->nonterminal_ids.find(item.text);
                           it != data->nonterminal_ids.end()) {
                    alt.push_back({Symbol::Nonterminal, it->second});
                } else if (!detail::has_lowercase(item.text)) {
                    alt.push_back({Symbol::TerminalRef, intern_terminal(item.text, item.line)});
                } else {
                    throw UndefinedSymbol("line " + std::to_string(item.line) + ": '" +
                                          item.text + "' has no production");
                }
            }
            data->productions[nt].push_back(std::move(alt));
        }
    }

    if (start_name) {
        auto it = data->nonterminal_ids.find(*start_name);
        if (it == data->nonterminal_ids.end())
            throw UndefinedSymbol("start symbol '" + *start_name + "' has no production");
        data->start = it->second;
    } else {
        data->start = data->nonterminal_ids.at(raws.front().lhs);
    }

    // Cycle check: DFS over nonterminal references. Color: 0 new, 1 on stack, 2 done.
    {
        std::vector<int> color(data->nonterminal_names.size(), 0);
        std::vector<int> path;
        auto dfs = [&](auto&& self, int nt) -> void {
            color[nt] = 1;
            path.push_back(nt);
            for (const auto& alt : data->productions[nt]) {
                for (const auto& sym : alt) {
                    if (sym.kind != Symbol::Nonterminal) continue;
                    if (color[sym.index] == 1) {
                        std::string cycle;
                        auto it = std::find(path.begin(), path.end(), sym.index);
                        for (; it != path.end(); ++it)
                            cycle += data->nonterminal_names[*it] + " -> ";
                        cycle += data->nonterminal_names[sym.index];
                        throw CyclicGrammar("recursion detected: " + cycle);
                    }
                    if (color[sym.index] == 0) self(self, sym.index);
                }
            }
            path.pop_back();
            color[nt] = 2;
        };
        for (size_t i = 0; i < data->nonterminal_names.size(); ++i)
            if (color[i] == 0) dfs(dfs, static_cast<int>(i));
    }

    Grammar g(data);
    // The automaton is part of the immutable grammar value; building it here
    // keeps every later query pure and lock-free.
    const_cast<GrammarData&>(*data).automaton = detail::build_automaton(g);
    return g;
}

}  // namespace ariel

#include "ariel/automaton.hpp"
