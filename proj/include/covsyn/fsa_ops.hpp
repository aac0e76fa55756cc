#pragma once

#include "covsyn/automaton.hpp"

#include <map>
#include <vector>

namespace covsyn {

// States reachable from `from` through events outside `observable`,
// including `from` itself; sorted.
std::vector<StateId> unobservable_reach(const Automaton& a, StateId from,
                                        const EventSet& observable);

// Subset-construction observer. The result keeps the full input alphabet:
// events outside `observable` self-loop at every cell, events inside it
// follow the pointwise image closed under unobservable reach. Cells are
// sorted, deduplicated and never empty; a cell is marked iff it intersects
// the input's marked set. Per-state origin records the cell.
Automaton observer(const Automaton& a, const EventSet& observable);

// Synchronous product over the union alphabet: shared events synchronize,
// private events interleave. A product state is marked iff every component
// state is marked. Only the reachable part is built; per-state origin tuples
// record the component states.
Automaton sync_product(const std::vector<const Automaton*>& parts);
Automaton sync_product(const Automaton& a, const Automaton& b);

Automaton reachable_trim(const Automaton& a);
bool is_marker_reachable(const Automaton& a);

// Renames events per `map`; unmapped events stay. The map must be injective
// on its image and must not collapse two transitions of one state.
Automaton relabel(const Automaton& a, const std::map<Event, Event>& map);

// Totalizes over `alphabet` (a superset of the input alphabet) by routing
// every undefined pair to a fresh unmarked absorbing state. The dump state is
// added even when nothing routes to it.
Automaton complete(const Automaton& a, const EventSet& alphabet,
                   const std::string& dump_label);

struct Containment {
    bool closed = true; // L(a) within L(b)
    bool marked = true; // Lm(a) within Lm(b)
    std::vector<Event> closed_witness;
    std::vector<Event> marked_witness;
};

// Language containment over the union alphabet; events absent from b's
// alphabet count as undefined in b. Witnesses hold the first offending string
// of each kind.
Containment language_subset(const Automaton& a, const Automaton& b);
bool language_equal(const Automaton& a, const Automaton& b);

enum class Acceptance { rejected, in_closed, in_marked };

// Runs the string; throws on events outside the alphabet.
Acceptance accepts(const Automaton& a, const std::vector<Event>& s);

enum class Phase { command, reaction };

// Phase labels for command-alternating automata: the initial state is a
// command state, command events step to the reaction layer, non-self-loop
// plain events step back. Deadlocked states get the phase they are reached
// with. Throws if the reachable part violates the alternation.
std::vector<Phase> bipartite_phases(const Automaton& a);

} // namespace covsyn
