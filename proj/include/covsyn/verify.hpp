#pragma once

#include "covsyn/synthesis.hpp"

#include <cstdint>

namespace covsyn {

struct ClosedLoop {
    // Plant, command execution under attack, attack choreography, attacked
    // supervisor, attacker, in that component order. Marked exactly where
    // the plant component is a damage state.
    Automaton b;
    StateId detect = no_state; // detection state of the attacked supervisor
};

// Joint behaviour of one concrete supervisor and one attacker. Throws Error
// when either automaton is malformed.
ClosedLoop assemble_closed_loop(const Scenario& sc, const Automaton& supervisor,
                                const Automaton& attacker);

// No reachable configuration where the supervisor has detected the attack
// while the plant is still undamaged.
bool check_covert(const Scenario& sc, const ClosedLoop& loop);

// Some damage configuration is reachable.
bool check_damage_reachable(const ClosedLoop& loop);

struct SupervisorVerdict {
    bool valid = false; // well formed, consistent with the observations, safe
    std::string why_invalid;
    bool covert = false;
    bool damage = false;
};

struct SuccessReport {
    std::vector<SupervisorVerdict> rows; // one per supervisor, same order
    bool vacuous = true;                 // no valid supervisor among them
    bool successful = false;             // covert and damaging against every valid one
};

// Judge an attacker against a set of candidate supervisors. Invalid
// supervisors are reported but do not count against the attacker.
SuccessReport check_successful(const Scenario& sc, const Automaton& attacker,
                               const std::vector<Automaton>& supervisors);

// Samples distinct supervisors that are consistent with the observations and
// safe, by resolving the safe consistent command space to one command per
// control state: random choices up to `depth` observation rounds, the least
// permissive command beyond. The least permissive supervisor itself is
// always the first sample. Deterministic for a fixed seed.
std::vector<Automaton> enumerate_consistent_supervisors(const Scenario& sc, std::size_t depth,
                                                        std::size_t count, std::uint64_t seed);

struct OracleCaps {
    std::size_t max_cells = 12;
    std::size_t max_controllable = 6;
    std::size_t max_policies = std::size_t{1} << 16;
};

// Exhaustive reference for synth_supremal_safe: tries every way of disabling
// controllable transitions per observer cell, keeps the safe policies and
// returns the unique one whose closed-loop language contains all others
// (std::logic_error if no maximum exists, which would falsify supremality).
// Desk scale only; throws Error when the caps are exceeded.
std::optional<Automaton> brute_force_supremal(const Automaton& plant,
                                              const std::vector<StateId>& bad,
                                              const ControlConstraint& cc,
                                              const OracleCaps& caps = {});

} // namespace covsyn
