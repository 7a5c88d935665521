#pragma once

#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "tilie/error.hpp"
#include "tilie/rational.hpp"

namespace tilie {

// Nested-bracket expressions over generator indices. Words witness closure
// membership: expanding a word through the sector's commutator reproduces an
// element exactly. Scalars live in Combo nodes, so proof identities carrying
// constants expand to equality rather than proportionality.

template <typename S>
struct Word;

template <typename S>
using WordPtr = std::shared_ptr<const Word<S>>;

template <typename S>
struct Word {
    struct Leaf {
        int index;
    };
    struct Bracket {
        WordPtr<S> a, b;
    };
    struct Combo {
        std::vector<std::pair<S, WordPtr<S>>> terms;
    };

    std::variant<Leaf, Bracket, Combo> node;

    static WordPtr<S> leaf(int index) { return std::make_shared<Word>(Word{Leaf{index}}); }
    static WordPtr<S> bracket(WordPtr<S> a, WordPtr<S> b) {
        return std::make_shared<Word>(Word{Bracket{std::move(a), std::move(b)}});
    }
    static WordPtr<S> combo(std::vector<std::pair<S, WordPtr<S>>> terms) {
        return std::make_shared<Word>(Word{Combo{std::move(terms)}});
    }
    static WordPtr<S> scaled(const S& c, WordPtr<S> w) {
        return combo({{c, std::move(w)}});
    }

    bool is_leaf() const { return std::holds_alternative<Leaf>(node); }
};

template <typename S>
int word_bracket_depth(const WordPtr<S>& w) {
    if (!w) return 0;
    if (auto* l = std::get_if<typename Word<S>::Leaf>(&w->node)) {
        (void)l;
        return 0;
    }
    if (auto* b = std::get_if<typename Word<S>::Bracket>(&w->node))
        return 1 + std::max(word_bracket_depth(b->a), word_bracket_depth(b->b));
    int d = 0;
    for (const auto& [c, t] : std::get<typename Word<S>::Combo>(w->node).terms)
        d = std::max(d, word_bracket_depth(t));
    return d;
}

/// Recursive evaluation of a word over a generator list. BracketFn is the
/// sector commutator; Element must support + and scalar *.
template <typename Element, typename S, typename BracketFn>
Element word_expand(const WordPtr<S>& w, std::span<const Element> generators, BracketFn&& br) {
    if (!w) throw ValidationError("word_expand: empty word");
    if (auto* l = std::get_if<typename Word<S>::Leaf>(&w->node)) {
        if (l->index < 0 || static_cast<std::size_t>(l->index) >= generators.size())
            throw ValidationError("word_expand: leaf index out of range");
        return generators[static_cast<std::size_t>(l->index)];
    }
    if (auto* b = std::get_if<typename Word<S>::Bracket>(&w->node)) {
        return br(word_expand<Element>(b->a, generators, br),
                  word_expand<Element>(b->b, generators, br));
    }
    const auto& combo = std::get<typename Word<S>::Combo>(w->node);
    if (combo.terms.empty()) throw ValidationError("word_expand: empty combination");
    Element acc = combo.terms.front().first *
                  word_expand<Element>(combo.terms.front().second, generators, br);
    for (std::size_t i = 1; i < combo.terms.size(); ++i)
        acc = acc + combo.terms[i].first * word_expand<Element>(combo.terms[i].second, generators, br);
    return acc;
}

}  // namespace tilie
