#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ariel/errors.hpp"
#include "ariel/grammar.hpp"
#include "ariel/rational.hpp"

namespace ariel {

// The grammar compiles into a deterministic word-level automaton over prefix
// states. A state is a set of derivation cursors; because the automaton is
// deterministic, counting accepted paths counts distinct token sequences, so
// ambiguous derivations of one sentence are never double-counted.
class PrefixAutomaton {
public:
    // Dot sits before symbol `pos` of productions[nt][alt].
    struct Frame {
        int nt, alt, pos;
        auto operator<=>(const Frame&) const = default;
    };
    // A derivation spine whose top frame points at a terminal; word_off is the
    // position inside that (possibly multi-word) terminal.
    struct Item {
        std::vector<Frame> stack;
        int word_off;
        auto operator<=>(const Item&) const = default;
    };
    struct State {
        bool complete = false;                       // consumed prefix is in L(g)
        std::vector<Item> items;                     // sorted, unique
        std::vector<std::pair<int, int>> edges;      // (word id, state id), sorted by word id
        BigInt completions;                          // distinct sentences from here
    };

    explicit PrefixAutomaton(const Grammar& g) : grammar_(g.data()) {
        std::vector<Item> items;
        bool complete = false;
        for (size_t alt = 0; alt < g.alternatives(g.start()).size(); ++alt)
            expand({{g.start(), static_cast<int>(alt), 0}}, items, complete);
        initial_ = intern(complete, std::move(items));
        for (size_t i = 0; i < states_.size(); ++i) build_edges(static_cast<int>(i));
        count_all();
    }

    int initial() const { return initial_; }
    const State& state(int id) const { return states_[id]; }
    size_t size() const { return states_.size(); }

    // Word ids of the valid next words, in canonical (vocabulary) order.
    const std::vector<std::pair<int, int>>& edges(int id) const { return states_[id].edges; }
    bool complete(int id) const { return states_[id].complete; }
    const BigInt& completions(int id) const { return states_[id].completions; }

    int step(int id, int word_id) const {
        const auto& e = states_[id].edges;
        auto it = std::lower_bound(e.begin(), e.end(), word_id,
                                   [](const auto& p, int w) { return p.first < w; });
        if (it == e.end() || it->first != word_id) return -1;
        return it->second;
    }

private:
    // Closure: descend into nonterminals and pop finished alternatives until
    // every cursor rests on a terminal word. Popping past the root means the
    // consumed prefix is a complete sentence.
    void expand(std::vector<Frame> stack, std::vector<Item>& out, bool& complete) const {
        for (;;) {
            if (stack.empty()) {
                complete = true;
                return;
            }
            Frame& top = stack.back();
            const Alternative& alt = grammar_->productions[top.nt][top.alt];
            if (top.pos == static_cast<int>(alt.size())) {
                stack.pop_back();
                if (!stack.empty()) ++stack.back().pos;
                continue;
            }
            const Symbol& sym = alt[top.pos];
            if (sym.kind == Symbol::TerminalRef) {
                out.push_back({std::move(stack), 0});
                return;
            }
            for (size_t a = 0; a < grammar_->productions[sym.index].size(); ++a) {
                std::vector<Frame> next = stack;
                next.push_back({sym.index, static_cast<int>(a), 0});
                expand(std::move(next), out, complete);
            }
            return;
        }
    }

    int intern(bool complete, std::vector<Item> items) {
        std::sort(items.begin(), items.end());
        items.erase(std::unique(items.begin(), items.end()), items.end());
        Key key{complete, items};
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(states_.size());
        states_.push_back(State{complete, std::move(items), {}, BigInt(-1)});
        index_.emplace(std::move(key), id);
        return id;
    }

    void build_edges(int id) {
        // Group cursor moves by the word they consume; each group closes into
        // the successor state. states_ grows during the loop, so index by id.
        std::map<int, std::pair<std::vector<Item>, bool>> moved;
        for (const Item& item : states_[id].items) {
            const Frame& top = item.stack.back();
            const Symbol& sym = grammar_->productions[top.nt][top.alt][top.pos];
            const Terminal& term = grammar_->terminals[sym.index];
            int wid = term.words[item.word_off];
            auto& [items, complete] = moved[wid];
            if (item.word_off + 1 < static_cast<int>(term.words.size())) {
                items.push_back({item.stack, item.word_off + 1});
            } else {
                std::vector<Frame> stack = item.stack;
                ++stack.back().pos;
                expand(std::move(stack), items, complete);
            }
        }
        auto& edges = states_[id].edges;
        for (auto& [wid, group] : moved)
            edges.emplace_back(wid, intern(group.second, std::move(group.first)));
    }

    void count_all() {
        for (size_t i = 0; i < states_.size(); ++i) count(static_cast<int>(i));
    }
    const BigInt& count(int id) {
        State& s = states_[id];
        if (s.completions >= 0) return s.completions;
        BigInt total = s.complete ? 1 : 0;
        for (const auto& [wid, next] : s.edges) total += count(next);
        s.completions = std::move(total);
        return s.completions;
    }

    struct Key {
        bool complete;
        std::vector<Item> items;
        auto operator<=>(const Key&) const = default;
    };

    std::shared_ptr<const detail::GrammarData> grammar_;
    std::vector<State> states_;
    std::map<Key, int> index_;
    int initial_ = 0;
};

namespace detail {
inline std::shared_ptr<const PrefixAutomaton> build_automaton(const Grammar& g) {
    return std::make_shared<const PrefixAutomaton>(g);
}
}  // namespace detail

// Incremental recognition state for a token prefix. Immutable; advancing
// returns a fresh state.
class PrefixState {
public:
    explicit PrefixState(Grammar g)
        : grammar_(std::move(g)), state_(grammar_.automaton().initial()), tokens_consumed_(0) {}

    const Grammar& grammar() const { return grammar_; }
    int state_id() const { return state_; }
    int tokens_consumed() const { return tokens_consumed_; }

    // True iff the consumed token sequence is itself a sentence of L(g).
    bool complete() const { return grammar_.automaton().complete(state_); }

    bool can_advance(std::string_view word) const {
        auto wid = grammar_.word_id(word);
        return wid && grammar_.automaton().step(state_, *wid) >= 0;
    }

    PrefixState advanced(std::string_view word) const {
        auto wid = grammar_.word_id(word);
        int next = wid ? grammar_.automaton().step(state_, *wid) : -1;
        if (next < 0)
            throw InvalidContinuation("'" + std::string(word) +
                                      "' is not a valid continuation after " +
                                      std::to_string(tokens_consumed_) + " token(s)");
        return PrefixState(grammar_, next, tokens_consumed_ + 1);
    }

    // Valid next words in canonical order (vocabulary first-appearance order).
    std::vector<std::string> continuation_words() const {
        std::vector<std::string> words;
        for (const auto& [wid, next] : grammar_.automaton().edges(state_))
            words.push_back(grammar_.word(wid));
        return words;
    }
    const std::vector<std::pair<int, int>>& continuation_edges() const {
        return grammar_.automaton().edges(state_);
    }

private:
    PrefixState(Grammar g, int state, int consumed)
        : grammar_(std::move(g)), state_(state), tokens_consumed_(consumed) {}

    Grammar grammar_;
    int state_;
    int tokens_consumed_;
};

struct Continuations {
    bool stop;                        // prefix itself is a sentence
    std::vector<std::string> words;   // canonical order
};

inline PrefixState initial_state(const Grammar& g) { return PrefixState(g); }

inline PrefixState advance(const PrefixState& s, std::string_view word) {
    return s.advanced(word);
}

inline Continuations continuations(const PrefixState& s) {
    return {s.complete(), s.continuation_words()};
}

inline BigInt count_completions(const PrefixState& s) {
    return s.grammar().automaton().completions(s.state_id());
}

inline BigInt count_language(const Grammar& g) {
    return g.automaton().completions(g.automaton().initial());
}

template <typename Tokens>
inline std::optional<PrefixState> try_fold(const Grammar& g, const Tokens& tokens) {
    PrefixState s = initial_state(g);
    for (const auto& t : tokens) {
        if (!s.can_advance(t)) return std::nullopt;
        s = s.advanced(t);
    }
    return s;
}

template <typename Tokens>
inline bool accepts(const Grammar& g, const Tokens& tokens) {
    auto s = try_fold(g, tokens);
    return s && s->complete();
}

}  // namespace ariel
