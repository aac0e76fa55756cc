#pragma once

#include "covsyn/fsa_ops.hpp"
#include "covsyn/scenario.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace covsyn {

struct CommandCaps {
    std::size_t warn_above = std::size_t{1} << 16;
    std::size_t max_controllable = 20;
};

// All control commands Σ_uc ∪ X for X ⊆ Σ_c, enumerated by bit pattern over
// the sorted controllable events (so the order is stable across runs). When
// the command count exceeds the warning threshold an explanation is written
// to *warning; past max_controllable the call refuses outright.
std::vector<Event> build_gamma(const Scenario& sc, const CommandCaps& caps = {},
                               std::string* warning = nullptr);

Event least_command(const Scenario& sc); // γ = Σ_uc, always a command
Event full_command(const Scenario& sc);  // γ = Σ

// Attack choreography. Three states: after intercepting a compromised
// reading the attacker may forward any relabeled reading or swallow it, and
// must then hand control back with stop; every other observable only allows
// an immediate stop. Commands and unobservable events pass through idle.
Automaton build_ac(const Scenario& sc, const std::vector<Event>& gamma);

// Command execution: commands alternate with plant events, and only events
// inside the current command may occur. Unobservable members keep the
// command open; an observable member closes it.
Automaton build_ce(const Scenario& sc, const std::vector<Event>& gamma);

// Command execution under actuator attack: build_ce plus enablement of the
// attackable events inside every open command and of the uncontrollable
// events before any command arrives.
Automaton build_cea(const Scenario& sc, const std::vector<Event>& gamma);

struct ObservationAutomaton {
    Automaton a;
    StateId deadlock = no_state; // the single state every maximal string reaches
};

// Prefix tree of the recorded observations with all maximal strings merged
// into one deadlocked state. Fully marked.
ObservationAutomaton build_mo(const Scenario& sc);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> problems;

    void problem(std::string p) {
        ok = false;
        problems.push_back(std::move(p));
    }
    std::string joined() const;
};

// Supervisor well-formedness over a scenario: alphabet Σ, every
// uncontrollable event enabled everywhere, unobservable events self-looping
// wherever they are enabled.
ValidationReport validate_supervisor(const Scenario& sc, const Automaton& s);

// Attacker well-formedness: alphabet Σ ∪ Σ# ∪ Γ ∪ {stop}, everything the
// attacker cannot disable enabled everywhere, everything it cannot observe
// self-looping wherever enabled.
ValidationReport validate_attacker(const Scenario& sc, const std::vector<Event>& gamma,
                                   const Automaton& a);

// Bipartite unfolding of a supervisor: each state gets a command copy that
// issues En_S(q) as a single command event, then behaves like q until the
// next observation.
Automaton build_bt(const Scenario& sc, const Automaton& s, const std::vector<Event>& gamma);

// Observer of the command-paced plant over observations plus commands: the
// reference trace any supervisor compares its inputs against to spot
// tampering.
Automaton universal_monitor(const Scenario& sc, const Automaton& ce);

// build_bt constrained to command/event sequences the plant under command
// feedback can actually produce.
Automaton build_bts1(const Scenario& sc, const Automaton& bt, const Automaton& ce);

struct AttackedSupervisor {
    Automaton a;
    StateId detect = no_state; // entered on inputs the supervisor cannot explain
};

// How the supervisor runs when sensor readings arrive relabeled and the
// attacker may slip actuator events past it.
AttackedSupervisor build_btsa(const Scenario& sc, const Automaton& bts1);

// Does the closed loop under this supervisor reproduce every recorded
// observation?
bool check_consistency(const Scenario& sc, const Automaton& s);

// Does the closed loop under this supervisor avoid all damage states?
bool check_safe(const Scenario& sc, const Automaton& s);

} // namespace covsyn
