#include "covsyn/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace covsyn {

std::optional<Automaton> synth_supremal_safe(const Automaton& plant,
                                             const std::vector<StateId>& bad,
                                             const ControlConstraint& cc,
                                             EngineStats* stats) {
    if (!cc.controllable.subset_of(cc.observable))
        throw Error("synthesis needs every controllable event to be observable");
    if (!cc.observable.subset_of(plant.alphabet()))
        throw Error("synthesis constraint mentions events outside the plant alphabet");
    for (StateId q : bad)
        if (q >= plant.state_count()) throw Error("bad state out of range");

    // Everything that can reach a bad state without passing a controllable
    // event is as good as bad: nothing a supervisor does can cut the path.
    std::vector<std::vector<StateId>> rev(plant.state_count());
    for (StateId q = 0; q < plant.state_count(); ++q)
        for (const Transition& t : plant.out(q))
            if (!cc.controllable.contains(t.event)) rev[t.target].push_back(q);
    std::vector<char> unsafe(plant.state_count(), 0);
    std::deque<StateId> work;
    for (StateId q : bad)
        if (!unsafe[q]) {
            unsafe[q] = 1;
            work.push_back(q);
        }
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        for (StateId p : rev[q])
            if (!unsafe[p]) {
                unsafe[p] = 1;
                work.push_back(p);
            }
    }

    Automaton obs = observer(plant, cc.observable);
    if (stats) stats->cells = obs.state_count();

    std::vector<char> removed(obs.state_count(), 0);
    std::size_t removed_count = 0;
    for (StateId c = 0; c < obs.state_count(); ++c) {
        for (StateId member : obs.origin_of(c))
            if (unsafe[member]) {
                removed[c] = 1;
                ++removed_count;
                break;
            }
    }
    if (stats) stats->deleted_cells = removed_count;
    if (removed[obs.initial()]) return std::nullopt;

    // Keep the reachable remainder. A non-controllable transition into a
    // removed cell cannot happen here: its source cell would hold an unsafe
    // member and be removed itself.
    Automaton::Builder b(obs.alphabet());
    std::vector<StateId> to_new(obs.state_count(), no_state);
    std::deque<StateId> frontier;
    auto admit = [&](StateId c) {
        if (to_new[c] != no_state) return;
        to_new[c] = b.add_state_fresh(obs.label(c), obs.marked(c));
        b.origin_set(to_new[c], obs.origin_of(c));
        frontier.push_back(c);
    };
    admit(obs.initial());
    b.initial(to_new[obs.initial()]);
    std::size_t dropped = 0;
    std::vector<std::pair<StateId, Transition>> edges;
    while (!frontier.empty()) {
        StateId c = frontier.front();
        frontier.pop_front();
        for (const Transition& t : obs.out(c)) {
            if (removed[t.target]) {
                if (!cc.controllable.contains(t.event))
                    throw std::logic_error(
                        "synthesis fixpoint violated: an unprotected event leads from a "
                        "kept cell into a removed one");
                ++dropped;
                continue;
            }
            admit(t.target);
            edges.push_back({c, t});
        }
    }
    for (const auto& [src, t] : edges) b.transition(to_new[src], t.event, to_new[t.target]);
    b.origin_kind(StateOrigin::cell);
    if (stats) stats->dropped_edges = dropped;

    Automaton result = std::move(b).build();
    for (StateId q = 0; q < result.state_count(); ++q)
        for (StateId member : result.origin_of(q))
            if (unsafe[member])
                throw std::logic_error("synthesis fixpoint violated: an unsafe plant state "
                                       "survived into the result");
    return result;
}

Automaton procedure1_ns(const Scenario& sc, const std::vector<Event>& gamma) {
    Automaton g = sc.plant.with_all_marked();
    Automaton ce = build_ce(sc, gamma);
    Automaton p = sync_product(g, ce);

    std::vector<StateId> bad;
    for (StateId q = 0; q < p.state_count(); ++q)
        if (sc.is_damage(p.origin_of(q).at(0))) bad.push_back(q);

    const Event least = least_command(sc);
    EventSet ctrl;
    for (const Event& gm : gamma)
        if (!(gm == least)) ctrl.insert(gm);
    EventSet vis = sc.observable;
    for (const Event& gm : gamma) vis.insert(gm);

    auto ns = synth_supremal_safe(p, bad, {ctrl, vis});
    if (!ns)
        throw PipelineError("no safe supervisor exists: damage stays reachable even under "
                            "the most restrictive command");
    bipartite_phases(*ns); // throws if commands and reactions ever mix
    return std::move(*ns);
}

Automaton build_oc(const Scenario& sc, const ObservationAutomaton& mo,
                   const std::vector<Event>& gamma) {
    EventSet abc = sc.alphabet;
    for (const Event& gm : gamma) abc.insert(gm);

    Automaton::Builder b(abc);
    const Automaton& m = mo.a;
    std::vector<StateId> com(m.state_count()), rea(m.state_count());
    for (StateId q = 0; q < m.state_count(); ++q) {
        com[q] = b.add_state(m.label(q) + "_cmd", true);
        rea[q] = b.add_state(m.label(q), true);
    }
    StateId dump = b.add_state_fresh("dump", true);
    b.initial(com[m.initial()]);

    for (StateId q = 0; q < m.state_count(); ++q) {
        const EventSet en = m.enabled(q);
        for (const Event& gm : gamma) {
            bool covers = true;
            for (const Event& e : en)
                if (!gm.command_contains(e)) {
                    covers = false;
                    break;
                }
            if (covers) b.transition(com[q], gm, rea[q]);
        }
        for (const Event& e : sc.observable) {
            StateId t = m.target(q, e);
            b.transition(rea[q], e, t == no_state ? dump : com[t]);
        }
        for (const Event& e : sc.unobservable()) b.transition(rea[q], e, rea[q]);
    }
    for (const Event& e : abc) b.transition(dump, e, dump);
    return std::move(b).build();
}

namespace {

// Shared shape of the two "under attack" rewrites: compromised readings are
// forwarded relabeled (the plain event at most self-loops), attackable
// events the original never modelled self-loop, and unexplained observables
// land in a fresh absorbing state.
struct AttackSplice {
    const Scenario& sc;
    Automaton::Builder& b;
    const Automaton& src;

    void copy_row(StateId q) {
        for (const Transition& t : src.out(q)) {
            if (sc.compromised.contains(t.event)) {
                b.transition(q, sc.hashed(t.event), t.target);
                b.transition(q, t.event, q);
            } else {
                b.transition(q, t.event, t.target);
            }
        }
    }
    void sensor_loops(StateId q) {
        for (const Event& e : sc.compromised) b.transition(q, e, q);
    }
    void actuator_loops(StateId q, bool only_if_undefined) {
        for (const Event& e : sc.attackable) {
            if (sc.observable.contains(e) && !sc.compromised.contains(e)) continue;
            if (only_if_undefined && src.defined(q, e)) continue;
            b.transition(q, e, q);
        }
    }
    void route_unexplained(StateId q, StateId sink) {
        for (const Event& e : sc.observable) {
            if (src.defined(q, e)) continue;
            b.transition(q, sc.compromised.contains(e) ? sc.hashed(e) : e, sink);
        }
    }
};

} // namespace

CommandSpaceUnderAttack build_ocnsa(const Scenario& sc, const Automaton& ns,
                                    const Automaton& oc) {
    Automaton ocns = sync_product(ns, oc);
    const std::vector<Phase> phase = bipartite_phases(ocns);

    EventSet abc = ocns.alphabet();
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);

    Automaton::Builder b(abc);
    for (StateId q = 0; q < ocns.state_count(); ++q) b.add_state(ocns.label(q), true);
    StateId exposed = b.add_state_fresh("exposed", true);
    b.initial(ocns.initial());

    AttackSplice splice{sc, b, ocns};
    for (StateId q = 0; q < ocns.state_count(); ++q) {
        splice.copy_row(q);
        if (phase[q] != Phase::reaction) continue;
        // Raw compromised events are invisible to every embedded supervisor,
        // so at reaction states they self-loop even where no consistent
        // belief could fire them; blocking them here would veto real plant
        // moves in the joint behaviour.
        splice.sensor_loops(q);
        splice.actuator_loops(q, false);
        splice.route_unexplained(q, exposed);
    }
    return {std::move(b).build(), exposed};
}

Automaton build_sdown(const Scenario& sc, const ObservationAutomaton& mo) {
    const Automaton& m = mo.a;
    Automaton::Builder b(sc.alphabet);
    for (StateId q = 0; q < m.state_count(); ++q) b.add_state_fresh(m.label(q), true);
    b.initial(m.initial());
    for (StateId q = 0; q < m.state_count(); ++q) {
        for (const Transition& t : m.out(q)) b.transition(q, t.event, t.target);
        for (const Event& e : sc.unobservable()) b.transition(q, e, q);
        for (const Event& e : sc.observable) {
            if (sc.controllable.contains(e)) continue;
            if (!m.defined(q, e)) b.transition(q, e, mo.deadlock);
        }
    }
    return std::move(b).build();
}

DowngradedUnderAttack build_sdown_a(const Scenario& sc, const Automaton& sdown) {
    EventSet abc = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);

    Automaton::Builder b(abc);
    for (StateId q = 0; q < sdown.state_count(); ++q) b.add_state(sdown.label(q), true);
    StateId risk = b.add_state_fresh("risk", true);
    b.initial(sdown.initial());

    AttackSplice splice{sc, b, sdown};
    for (StateId q = 0; q < sdown.state_count(); ++q) {
        splice.copy_row(q);
        splice.actuator_loops(q, true);
        splice.route_unexplained(q, risk);
    }
    for (const Event& e : sc.attackable)
        if (!sc.observable.contains(e) || sc.compromised.contains(e))
            b.transition(risk, e, risk);
    for (const Event& e : sc.observable)
        b.transition(risk, sc.compromised.contains(e) ? sc.hashed(e) : e, risk);

    return {std::move(b).build(), risk};
}

Automaton complete_sdown_a(const Scenario& sc, const Automaton& sdown_a) {
    EventSet abc = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);
    return complete(sdown_a, abc, "dump");
}

namespace {

// The synthesis result only says what the attacker does along surviving
// behaviour. Completing it with a sink that absorbs everything it cannot
// disable makes the compliance conditions hold everywhere; the sink stays
// unreachable in the closed loop because the plant cannot produce those
// letters there.
Automaton with_compliance_sink(const Automaton& a, const EventSet& beyond_control) {
    Automaton::Builder b(a.alphabet());
    for (StateId q = 0; q < a.state_count(); ++q) {
        b.add_state(a.label(q), a.marked(q));
        b.origin_set(q, a.origin_of(q));
    }
    StateId sink = b.add_state_fresh("sink", false);
    b.initial(a.initial());
    for (StateId q = 0; q < a.state_count(); ++q) {
        for (const Transition& t : a.out(q)) b.transition(q, t.event, t.target);
        for (const Event& e : beyond_control)
            if (!a.defined(q, e)) b.transition(q, e, sink);
    }
    for (const Event& e : beyond_control) b.transition(sink, e, sink);
    b.origin_kind(StateOrigin::cell);
    return std::move(b).build();
}

} // namespace

SynthesisReport procedure2_synthesize(const Scenario& sc, const CommandCaps& caps) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    sc.validate();

    SynthesisReport r;
    r.gamma = build_gamma(sc, caps, &r.gamma_warning);
    r.ac = build_ac(sc, r.gamma);
    r.ce = build_ce(sc, r.gamma);
    r.cea = build_cea(sc, r.gamma);
    r.mo = build_mo(sc);
    r.ns = procedure1_ns(sc, r.gamma);
    r.oc = build_oc(sc, r.mo, r.gamma);
    auto cs = build_ocnsa(sc, r.ns, r.oc);
    r.ocnsa = cs.a;
    r.exposed = cs.exposed;
    r.sdown = build_sdown(sc, r.mo);
    r.sdown_a = build_sdown_a(sc, r.sdown).a;
    r.sdown_a_bar = complete_sdown_a(sc, r.sdown_a);

    if (r.ac.state_count() != 3 || r.ce.state_count() != r.gamma.size() + 1 ||
        r.cea.state_count() != r.gamma.size() + 1 ||
        r.sdown_a_bar.state_count() != r.sdown.state_count() + 2)
        throw std::logic_error("construction size invariant violated");

    r.plant_under_attack =
        sync_product({&sc.plant, &r.cea, &r.ac, &r.ocnsa, &r.sdown_a_bar});

    std::vector<StateId> bad;
    for (StateId q = 0; q < r.plant_under_attack.state_count(); ++q) {
        const auto& tup = r.plant_under_attack.origin_of(q);
        if (!sc.is_damage(tup.at(0)) && tup.at(3) == r.exposed) bad.push_back(q);
    }
    r.bad_states = bad.size();

    EventSet actrl = sc.attackable;
    EventSet aobs = sc.observable;
    for (const Event& h : sc.hashed_compromised()) {
        actrl.insert(h);
        aobs.insert(h);
    }
    actrl.insert(Event::stop());
    aobs.insert(Event::stop());

    auto sup = synth_supremal_safe(r.plant_under_attack, bad, {actrl, aobs}, &r.engine);
    if (sup) {
        Automaton attacker = with_compliance_sink(
            *sup, set_difference(r.plant_under_attack.alphabet(), actrl));
        if (is_marker_reachable(sync_product(r.plant_under_attack, attacker))) {
            r.attacker_exists = true;
            r.attacker = std::move(attacker);
        }
    }

    r.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return r;
}

} // namespace covsyn
