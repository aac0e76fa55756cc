#pragma once

#include "covsyn/automaton.hpp"

#include <vector>

namespace covsyn {

// Problem instance: plant over a partitioned alphabet, deadlocked damage
// states, the attacker's sensor/actuator reach, and the recorded
// observations. Controllable events must be observable (the standing
// normality assumption); loaders reject anything else.
struct Scenario {
    EventSet alphabet;      // all plain events, flags match the partitions
    EventSet controllable;  // within observable
    EventSet observable;
    EventSet compromised;   // sensor events the attacker can intercept or fake
    EventSet attackable;    // actuator events the attacker can force

    Automaton plant;             // marked exactly at the damage states
    std::vector<StateId> damage; // sorted

    std::vector<std::vector<Event>> observations; // prefix-closed, sorted

    EventSet uncontrollable() const { return set_difference(alphabet, controllable); }
    EventSet unobservable() const { return set_difference(alphabet, observable); }

    Event hashed(const Event& e) const;  // σ -> σ#, σ must be compromised
    EventSet hashed_compromised() const; // relabeled copies of the compromised set

    Event find_event(const std::string& name) const;
    bool is_damage(StateId q) const;

    void validate() const; // throws Error on the first problem found
};

// Every prefix of every string, including the empty string; sorted, unique.
std::vector<std::vector<Event>> prefix_closure(const std::vector<std::vector<Event>>& strings);

} // namespace covsyn
