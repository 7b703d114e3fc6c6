#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ariel/automaton.hpp"
#include "ariel/grammar.hpp"

namespace ariel {

// One element of a flattened rule template: either a preterminal category
// name or a literal word token.
struct TemplateItem {
    bool literal;
    std::string text;
    auto operator<=>(const TemplateItem&) const = default;
};

struct RuleTemplate {
    std::vector<TemplateItem> items;
    auto operator<=>(const RuleTemplate&) const = default;

    // Printed as [qword, adjective_state, 'and', ...]
    std::string str() const {
        std::string out = "[";
        for (size_t i = 0; i < items.size(); ++i) {
            if (i) out += ", ";
            out += items[i].literal ? "'" + items[i].text + "'" : items[i].text;
        }
        return out + "]";
    }
};

struct DerivationNode {
    Symbol symbol;
    int begin = 0, end = 0;  // token range [begin, end)
    std::vector<DerivationNode> children;  // empty for terminals
};

struct Span {
    std::string category;
    int begin, end;
    auto operator<=>(const Span&) const = default;
};

struct ParseOutcome {
    bool accepted = false;
    RuleTemplate rule_template;   // at the requested preterminal granularity
    std::vector<Span> spans;      // token ranges of preterminal occurrences
    DerivationNode derivation;    // canonical derivation (valid iff accepted)
};

namespace detail {

// Possible end positions of each (symbol, start) over a fixed token sequence;
// memoized per parse. Acyclicity bounds the recursion.
class EndsTable {
public:
    EndsTable(const Grammar& g, const std::vector<std::string>& tokens) : g_(g) {
        token_ids_.reserve(tokens.size());
        for (const auto& t : tokens) {
            auto wid = g.word_id(t);
            token_ids_.push_back(wid ? *wid : -1);
        }
    }

    const std::vector<int>& symbol_ends(const Symbol& sym, int from) {
        if (sym.kind == Symbol::TerminalRef) return terminal_ends(sym.index, from);
        return nonterminal_ends(sym.index, from);
    }

    const std::vector<int>& nonterminal_ends(int nt, int from) {
        auto key = std::make_pair(nt, from);
        auto it = nt_memo_.find(key);
        if (it != nt_memo_.end()) return it->second;
        std::set<int> ends;
        for (const auto& alt : g_.alternatives(nt)) {
            std::set<int> pos{from};
            for (const auto& sym : alt) {
                std::set<int> next;
                for (int p : pos)
                    for (int e : symbol_ends(sym, p)) next.insert(e);
                pos = std::move(next);
                if (pos.empty()) break;
            }
            ends.insert(pos.begin(), pos.end());
        }
        return nt_memo_.emplace(key, std::vector<int>(ends.begin(), ends.end())).first->second;
    }

    const std::vector<int>& terminal_ends(int tid, int from) {
        auto key = std::make_pair(~tid, from);  // keyspace disjoint from nonterminals
        auto it = nt_memo_.find(key);
        if (it != nt_memo_.end()) return it->second;
        std::vector<int> ends;
        const Terminal& t = g_.terminal(tid);
        if (from + t.words.size() <= token_ids_.size() &&
            std::equal(t.words.begin(), t.words.end(), token_ids_.begin() + from))
            ends.push_back(from + static_cast<int>(t.words.size()));
        return nt_memo_.emplace(key, std::move(ends)).first->second;
    }

    int size() const { return static_cast<int>(token_ids_.size()); }

private:
    const Grammar& g_;
    std::vector<int> token_ids_;
    std::map<std::pair<int, int>, std::vector<int>> nt_memo_;
};

// Canonical derivation: alternatives are tried in file order, symbols left to
// right; the first complete match wins. EndsTable prunes dead branches.
class CanonicalDeriver {
public:
    CanonicalDeriver(const Grammar& g, EndsTable& ends) : g_(g), ends_(ends) {}

    bool derive(const Symbol& sym, int from, int to, DerivationNode& out) {
        const auto& reachable = ends_.symbol_ends(sym, from);
        if (!std::binary_search(reachable.begin(), reachable.end(), to)) return false;
        out.symbol = sym;
        out.begin = from;
        out.end = to;
        out.children.clear();
        if (sym.kind == Symbol::TerminalRef) return true;  // ends check covered the match
        for (size_t a = 0; a < g_.alternatives(sym.index).size(); ++a) {
            const Alternative& alt = g_.alternatives(sym.index)[a];
            std::vector<DerivationNode> children;
            if (derive_seq(alt, 0, from, to, children)) {
                out.children = std::move(children);
                return true;
            }
        }
        return false;
    }

private:
    bool derive_seq(const Alternative& alt, size_t i, int from, int to,
                    std::vector<DerivationNode>& children) {
        if (i == alt.size()) return from == to;
        for (int mid : ends_.symbol_ends(alt[i], from)) {
            if (mid > to) break;
            DerivationNode child;
            if (!derive(alt[i], from, mid, child)) continue;
            children.push_back(std::move(child));
            if (derive_seq(alt, i + 1, mid, to, children)) return true;
            children.pop_back();
        }
        return false;
    }

    const Grammar& g_;
    EndsTable& ends_;
};

inline void flatten(const Grammar& g, const DerivationNode& node,
                    const std::set<std::string>& preterminals, RuleTemplate& tmpl,
                    std::vector<Span>& spans) {
    if (node.symbol.kind == Symbol::TerminalRef) {
        for (int wid : g.terminal(node.symbol.index).words)
            tmpl.items.push_back({true, g.word(wid)});
        return;
    }
    const std::string& name = g.nonterminal_name(node.symbol.index);
    if (preterminals.count(name)) {
        tmpl.items.push_back({false, name});
        spans.push_back({name, node.begin, node.end});
        return;
    }
    for (const auto& child : node.children) flatten(g, child, preterminals, tmpl, spans);
}

}  // namespace detail

// Recognition with a canonical derivation. `preterminals` controls the
// granularity of the flattened template and spans; with an empty set the
// template is the sentence itself and spans are empty. Rejection is a normal
// outcome, never an exception.
inline ParseOutcome recognize(const Grammar& g, const std::vector<std::string>& tokens,
                              const std::set<std::string>& preterminals = {}) {
    ParseOutcome out;
    if (!accepts(g, tokens)) return out;
    out.accepted = true;
    detail::EndsTable ends(g, tokens);
    detail::CanonicalDeriver deriver(g, ends);
    Symbol root{Symbol::Nonterminal, g.start()};
    bool ok = deriver.derive(root, 0, static_cast<int>(tokens.size()), out.derivation);
    if (!ok)  // cannot happen: the automaton accepted
        throw NotInLanguage("derivation extraction failed for an accepted sentence");
    detail::flatten(g, out.derivation, preterminals, out.rule_template, out.spans);
    return out;
}

// All flattened start-symbol expansions, stopping at `preterminals`;
// deduplicated and sorted. Guards against combinatorial explosion.
inline std::vector<RuleTemplate> enumerate_templates(const Grammar& g,
                                                     const std::set<std::string>& preterminals,
                                                     size_t cap = 10'000'000) {
    std::map<int, std::vector<RuleTemplate>> memo;
    auto expand_nt = [&](auto&& self, int nt) -> const std::vector<RuleTemplate>& {
        auto it = memo.find(nt);
        if (it != memo.end()) return it->second;
        std::set<RuleTemplate> results;
        for (const auto& alt : g.alternatives(nt)) {
            std::vector<RuleTemplate> partial{RuleTemplate{}};
            for (const auto& sym : alt) {
                std::vector<RuleTemplate> suffixes;
                if (sym.kind == Symbol::TerminalRef) {
                    RuleTemplate t;
                    for (int wid : g.terminal(sym.index).words)
                        t.items.push_back({true, g.word(wid)});
                    suffixes.push_back(std::move(t));
                } else if (preterminals.count(g.nonterminal_name(sym.index))) {
                    suffixes.push_back(RuleTemplate{{{false, g.nonterminal_name(sym.index)}}});
                } else {
                    suffixes = self(self, sym.index);
                }
                std::vector<RuleTemplate> combined;
                if (partial.size() * suffixes.size() > cap)
                    throw ExplosionGuard("template count exceeds cap of " + std::to_string(cap));
                combined.reserve(partial.size() * suffixes.size());
                for (const auto& p : partial)
                    for (const auto& s : suffixes) {
                        RuleTemplate t = p;
                        t.items.insert(t.items.end(), s.items.begin(), s.items.end());
                        combined.push_back(std::move(t));
                    }
                partial = std::move(combined);
            }
            for (auto& t : partial) {
                results.insert(std::move(t));
                if (results.size() > cap)
                    throw ExplosionGuard("template count exceeds cap of " + std::to_string(cap));
            }
        }
        return memo.emplace(nt, std::vector<RuleTemplate>(results.begin(), results.end()))
            .first->second;
    };
    for (const auto& name : preterminals)
        if (!g.nonterminal_id(name))
            throw UndefinedSymbol("preterminal '" + name + "' is not a nonterminal");
    return expand_nt(expand_nt, g.start());
}

}  // namespace ariel
