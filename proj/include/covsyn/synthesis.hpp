#pragma once

#include "covsyn/attack_models.hpp"

#include <optional>

namespace covsyn {

struct ControlConstraint {
    EventSet controllable;
    EventSet observable; // must contain controllable
};

struct EngineStats {
    std::size_t cells = 0;          // observer states explored
    std::size_t deleted_cells = 0;  // removed as unsafe
    std::size_t dropped_edges = 0;  // controllable transitions into removed cells
};

// Supremal safe partial-observation supervisor: the largest sublanguage of
// the plant that never visits a bad state and only disables controllable
// events, decided on observations alone. With controllable ⊆ observable one
// backward closure under unprotected events plus one observer pass is exact;
// the result is rechecked and a fixpoint violation throws std::logic_error.
// Returns nullopt when even the empty supervisor would be unsafe.
std::optional<Automaton> synth_supremal_safe(const Automaton& plant,
                                             const std::vector<StateId>& bad,
                                             const ControlConstraint& cc,
                                             EngineStats* stats = nullptr);

// Supremal safe command-feedback space: what any safe supervisor may do,
// expressed over plant events and commands. Throws PipelineError when no
// safe supervisor exists at all.
Automaton procedure1_ns(const Scenario& sc, const std::vector<Event>& gamma);

// Observation-consistency side of the command space: a command may be issued
// only if it covers every continuation the observations record from here;
// observables the observations never saw fall into an absorbing dump state.
Automaton build_oc(const Scenario& sc, const ObservationAutomaton& mo,
                   const std::vector<Event>& gamma);

struct CommandSpaceUnderAttack {
    Automaton a;
    StateId exposed = no_state; // some consistent safe supervisor notices the attack
};

// The safe consistent command space as the attacker experiences it:
// compromised readings arrive relabeled, attackable actuator events slip
// through, and anything no consistent safe supervisor can explain leads to
// the exposed state.
CommandSpaceUnderAttack build_ocnsa(const Scenario& sc, const Automaton& ns,
                                    const Automaton& oc);

// Least permissive supervisor consistent with the observations: enable
// exactly what was observed plus everything that cannot be disabled.
Automaton build_sdown(const Scenario& sc, const ObservationAutomaton& mo);

struct DowngradedUnderAttack {
    Automaton a;
    StateId risk = no_state; // this supervisor would flag the attack here
};

DowngradedUnderAttack build_sdown_a(const Scenario& sc, const Automaton& sdown);

// Completion of the attacked least permissive supervisor: undefined letters
// go to an unmarked dump, every other state is marked. Reaching a marked
// damage configuration in a product with this automaton means damage without
// ever leaving the covert envelope of the weakest supervisor.
Automaton complete_sdown_a(const Scenario& sc, const Automaton& sdown_a);

struct SynthesisReport {
    bool attacker_exists = false;
    std::optional<Automaton> attacker;

    std::vector<Event> gamma;
    std::string gamma_warning;

    Automaton ac, ce, cea, ns, oc, ocnsa, sdown, sdown_a, sdown_a_bar;
    Automaton plant_under_attack;
    ObservationAutomaton mo;
    StateId exposed = no_state;

    std::size_t bad_states = 0;
    EngineStats engine;
    double wall_ms = 0.0;
};

// Full synthesis: build the attacked command space and the completed least
// permissive supervisor, run the supremal safe synthesis over the joint
// behaviour, and keep the result only if it actually reaches damage.
SynthesisReport procedure2_synthesize(const Scenario& sc, const CommandCaps& caps = {});

} // namespace covsyn
