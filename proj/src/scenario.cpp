#include "covsyn/scenario.hpp"

#include <algorithm>
#include <set>

namespace covsyn {

Event Scenario::hashed(const Event& e) const {
    if (!compromised.contains(e))
        throw Error("event '" + e.name() + "' is not a compromised sensor event");
    return Event::relabeled(e);
}

EventSet Scenario::hashed_compromised() const {
    EventSet s;
    for (const Event& e : compromised) s.insert(Event::relabeled(e));
    return s;
}

Event Scenario::find_event(const std::string& name) const {
    for (const Event& e : alphabet)
        if (e.name() == name) return e;
    throw Error("unknown event '" + name + "'");
}

bool Scenario::is_damage(StateId q) const {
    return std::binary_search(damage.begin(), damage.end(), q);
}

void Scenario::validate() const {
    if (alphabet.empty()) throw Error("scenario has an empty alphabet");
    for (const Event& e : alphabet)
        if (e.kind() != EventKind::plain)
            throw Error("scenario alphabet holds a non-plant event '" + e.name() + "'");
    if (!controllable.subset_of(alphabet))
        throw Error("controllable events must belong to the alphabet");
    if (!observable.subset_of(alphabet))
        throw Error("observable events must belong to the alphabet");
    if (!controllable.subset_of(observable))
        throw Error("every controllable event must be observable");
    if (!compromised.subset_of(observable))
        throw Error("compromised sensor events must be observable");
    if (!attackable.subset_of(controllable))
        throw Error("attackable actuator events must be controllable");
    for (const Event& e : alphabet) {
        if (e.controllable() != controllable.contains(e))
            throw Error("event '" + e.name() + "' disagrees with the controllable set");
        if (e.observable() != observable.contains(e))
            throw Error("event '" + e.name() + "' disagrees with the observable set");
    }
    if (!(plant.alphabet() == alphabet))
        throw Error("plant alphabet differs from the scenario alphabet");

    if (!std::is_sorted(damage.begin(), damage.end()))
        throw Error("damage states must be listed in sorted order");
    if (std::adjacent_find(damage.begin(), damage.end()) != damage.end())
        throw Error("duplicate damage state");
    for (StateId q : damage) {
        if (q >= plant.state_count()) throw Error("damage state out of range");
        if (!plant.out(q).empty())
            throw Error("damage state '" + plant.label(q) + "' has outgoing transitions");
    }
    for (StateId q = 0; q < plant.state_count(); ++q)
        if (plant.marked(q) != is_damage(q))
            throw Error("plant marking must coincide with the damage set");

    std::set<std::vector<Event>> seen;
    for (const auto& s : observations) {
        for (const Event& e : s)
            if (!observable.contains(e))
                throw Error("observation uses non-observable event '" + e.name() + "'");
        if (!seen.insert(s).second) throw Error("duplicate observation string");
    }
    if (seen.find({}) == seen.end())
        throw Error("observations must include the empty string");
    for (const auto& s : observations) {
        if (s.empty()) continue;
        std::vector<Event> prefix(s.begin(), s.end() - 1);
        if (seen.find(prefix) == seen.end())
            throw Error("observations are not prefix-closed");
    }
    if (!std::is_sorted(observations.begin(), observations.end()))
        throw Error("observations must be sorted");
}

std::vector<std::vector<Event>> prefix_closure(const std::vector<std::vector<Event>>& strings) {
    std::set<std::vector<Event>> out;
    out.insert(std::vector<Event>{});
    for (const auto& s : strings)
        for (std::size_t n = 1; n <= s.size(); ++n)
            out.insert(std::vector<Event>(s.begin(), s.begin() + static_cast<long>(n)));
    return {out.begin(), out.end()};
}

} // namespace covsyn
