#include "covsyn/automaton.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace covsyn {

std::size_t Automaton::marked_count() const {
    return static_cast<std::size_t>(std::count(marked_.begin(), marked_.end(), true));
}

StateId Automaton::target(StateId q, const Event& e) const {
    const auto& row = out_.at(q);
    auto it = std::lower_bound(row.begin(), row.end(), e,
                               [](const Transition& t, const Event& ev) { return t.event < ev; });
    if (it != row.end() && it->event == e) return it->target;
    return no_state;
}

EventSet Automaton::enabled(StateId q) const {
    std::vector<Event> evs;
    for (const auto& t : out_.at(q)) evs.push_back(t.event);
    return EventSet(std::move(evs));
}

std::optional<StateId> Automaton::find_state(const std::string& label) const {
    for (StateId q = 0; q < labels_.size(); ++q)
        if (labels_[q] == label) return q;
    return std::nullopt;
}

Automaton Automaton::with_marking(std::vector<bool> marked) const {
    if (marked.size() != labels_.size())
        throw Error("marking vector size does not match state count");
    Automaton a = *this;
    a.marked_ = std::move(marked);
    return a;
}

Automaton Automaton::with_all_marked() const {
    Automaton a = *this;
    std::fill(a.marked_.begin(), a.marked_.end(), true);
    return a;
}

StateId Automaton::Builder::add_state(std::string label, bool marked) {
    while (label_index_.count(label)) label += '\'';
    label_index_.insert(label);
    labels_.push_back(std::move(label));
    marked_.push_back(marked);
    out_.emplace_back();
    origin_sets_.emplace_back();
    return static_cast<StateId>(labels_.size() - 1);
}

StateId Automaton::Builder::add_state_fresh(std::string label, bool marked) {
    if (label_index_.count(label))
        throw Error("duplicate state name '" + label + "'");
    return add_state(std::move(label), marked);
}

void Automaton::Builder::transition(StateId src, const Event& e, StateId dst) {
    if (src >= labels_.size() || dst >= labels_.size())
        throw Error("transition endpoint is not a known state");
    if (!alphabet_.contains(e))
        throw Error("transition event '" + e.name() + "' is not in the alphabet");
    for (const auto& t : out_[src]) {
        if (t.event == e) {
            if (t.target == dst) return; // idempotent re-add
            throw Error("nondeterministic transition on '" + e.name() + "' at state '" +
                        labels_[src] + "'");
        }
    }
    out_[src].push_back({e, dst});
}

StateId Automaton::Builder::target(StateId src, const Event& e) const {
    for (const auto& t : out_.at(src))
        if (t.event == e) return t.target;
    return no_state;
}

Automaton Automaton::Builder::build() {
    if (labels_.empty()) throw Error("automaton needs at least one state");
    if (initial_ == no_state || initial_ >= labels_.size())
        throw Error("automaton has no initial state");
    Automaton a;
    a.alphabet_ = std::move(alphabet_);
    a.labels_ = std::move(labels_);
    a.marked_ = std::move(marked_);
    a.out_ = std::move(out_);
    for (auto& row : a.out_)
        std::sort(row.begin(), row.end(),
                  [](const Transition& x, const Transition& y) { return x.event < y.event; });
    a.origin_sets_ = std::move(origin_sets_);
    a.initial_ = initial_;
    a.origin_ = kind_;
    return a;
}

} // namespace covsyn
