#pragma once

#include "covsyn/event.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

namespace covsyn {

using StateId = std::uint32_t;
inline constexpr StateId no_state = static_cast<StateId>(-1);

struct Transition {
    Event event;
    StateId target = no_state;
};

enum class StateOrigin { none, tuple, cell };

// Deterministic partial finite automaton over a fixed alphabet, immutable
// after Builder::build(). State ids are dense integers; labels are carried
// for diagnostics, serialization and DOT export. Products and observers keep
// per-state provenance (component tuple, subset-construction cell) so later
// stages can ask which plant state a composite state embeds.
class Automaton {
public:
    class Builder;

    Automaton() = default;

    const EventSet& alphabet() const { return alphabet_; }
    std::size_t state_count() const { return labels_.size(); }
    StateId initial() const { return initial_; }

    const std::string& label(StateId q) const { return labels_.at(q); }
    bool marked(StateId q) const { return marked_.at(q); }
    std::size_t marked_count() const;

    const std::vector<Transition>& out(StateId q) const { return out_.at(q); }
    StateId target(StateId q, const Event& e) const;
    bool defined(StateId q, const Event& e) const { return target(q, e) != no_state; }
    EventSet enabled(StateId q) const;

    StateOrigin origin() const { return origin_; }
    const std::vector<StateId>& origin_of(StateId q) const { return origin_sets_.at(q); }

    std::optional<StateId> find_state(const std::string& label) const;

    Automaton with_marking(std::vector<bool> marked) const;
    Automaton with_all_marked() const;

private:
    EventSet alphabet_;
    std::vector<std::string> labels_;
    std::vector<bool> marked_;
    std::vector<std::vector<Transition>> out_; // sorted by event name
    std::vector<std::vector<StateId>> origin_sets_;
    StateId initial_ = no_state;
    StateOrigin origin_ = StateOrigin::none;
};

class Automaton::Builder {
public:
    explicit Builder(EventSet alphabet) : alphabet_(std::move(alphabet)) {}

    // Labels are kept unique by appending primes if needed; callers that care
    // about exact labels (the parser) pass require_fresh to get an error
    // instead.
    StateId add_state(std::string label, bool marked = false);
    StateId add_state_fresh(std::string label, bool marked = false);

    void add_event(const Event& e) { alphabet_.insert(e); }
    void transition(StateId src, const Event& e, StateId dst);
    void mark(StateId q, bool m = true) { marked_.at(q) = m; }
    void initial(StateId q) { initial_ = q; }
    void origin_kind(StateOrigin k) { kind_ = k; }
    void origin_set(StateId q, std::vector<StateId> set) { origin_sets_.at(q) = std::move(set); }

    StateId target(StateId src, const Event& e) const;
    bool defined(StateId src, const Event& e) const { return target(src, e) != no_state; }
    std::size_t state_count() const { return labels_.size(); }
    const EventSet& alphabet() const { return alphabet_; }

    Automaton build();

private:
    EventSet alphabet_;
    std::vector<std::string> labels_;
    std::vector<bool> marked_;
    std::vector<std::vector<Transition>> out_;
    std::vector<std::vector<StateId>> origin_sets_;
    std::unordered_set<std::string> label_index_;
    StateId initial_ = no_state;
    StateOrigin kind_ = StateOrigin::none;
};

} // namespace covsyn
