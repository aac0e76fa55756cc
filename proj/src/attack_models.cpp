#include "covsyn/attack_models.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>

namespace covsyn {

std::string ValidationReport::joined() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        if (i) os << "; ";
        os << problems[i];
    }
    return os.str();
}

std::vector<Event> build_gamma(const Scenario& sc, const CommandCaps& caps,
                               std::string* warning) {
    const std::vector<Event>& ctrl = sc.controllable.items();
    if (ctrl.size() > caps.max_controllable) {
        std::ostringstream os;
        os << "command set would hold 2^" << ctrl.size() << " commands; "
           << "at most " << caps.max_controllable << " controllable events are supported. "
           << "Shrink the controllable set or split the plant.";
        throw Error(os.str());
    }
    const std::size_t total = std::size_t{1} << ctrl.size();
    if (total > caps.warn_above && warning) {
        std::ostringstream os;
        os << "command set holds " << total << " commands; constructions scale with 2^"
           << ctrl.size() << " and may be slow";
        *warning = os.str();
    }
    const std::vector<Event> uc = sc.uncontrollable().items();
    std::vector<Event> gamma;
    gamma.reserve(total);
    for (std::size_t bits = 0; bits < total; ++bits) {
        std::vector<Event> members = uc;
        for (std::size_t i = 0; i < ctrl.size(); ++i)
            if (bits >> i & 1u) members.push_back(ctrl[i]);
        gamma.push_back(Event::command(members));
    }
    return gamma;
}

Event least_command(const Scenario& sc) { return Event::command(sc.uncontrollable().items()); }

Event full_command(const Scenario& sc) { return Event::command(sc.alphabet.items()); }

Automaton build_ac(const Scenario& sc, const std::vector<Event>& gamma) {
    EventSet abc = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);
    for (const Event& g : gamma) abc.insert(g);
    abc.insert(Event::stop());

    Automaton::Builder b(abc);
    StateId idle = b.add_state_fresh("idle", true);
    StateId hold = b.add_state_fresh("hold", true);
    StateId sent = b.add_state_fresh("sent", true);
    b.initial(idle);

    for (const Event& e : sc.unobservable()) b.transition(idle, e, idle);
    for (const Event& g : gamma) b.transition(idle, g, idle);
    for (const Event& e : sc.observable) {
        if (sc.compromised.contains(e))
            b.transition(idle, e, hold);
        else
            b.transition(idle, e, sent);
    }
    for (const Event& e : sc.compromised) b.transition(hold, sc.hashed(e), sent);
    b.transition(hold, Event::stop(), idle);
    b.transition(sent, Event::stop(), idle);
    return std::move(b).build();
}

Automaton build_ce(const Scenario& sc, const std::vector<Event>& gamma) {
    EventSet abc = sc.alphabet;
    for (const Event& g : gamma) abc.insert(g);

    Automaton::Builder b(abc);
    StateId idle = b.add_state_fresh("idle", true);
    b.initial(idle);
    for (const Event& g : gamma) {
        StateId open = b.add_state_fresh(g.name(), true);
        b.transition(idle, g, open);
        for (const Event& e : sc.alphabet) {
            if (!g.command_contains(e)) continue;
            b.transition(open, e, sc.observable.contains(e) ? idle : open);
        }
    }
    return std::move(b).build();
}

Automaton build_cea(const Scenario& sc, const std::vector<Event>& gamma) {
    EventSet abc = sc.alphabet;
    for (const Event& g : gamma) abc.insert(g);

    Automaton::Builder b(abc);
    StateId idle = b.add_state_fresh("idle", true);
    b.initial(idle);
    for (const Event& e : sc.uncontrollable()) b.transition(idle, e, idle);
    for (const Event& g : gamma) {
        StateId open = b.add_state_fresh(g.name(), true);
        b.transition(idle, g, open);
        for (const Event& e : sc.alphabet) {
            if (!g.command_contains(e) && !sc.attackable.contains(e)) continue;
            b.transition(open, e, sc.observable.contains(e) ? idle : open);
        }
    }
    return std::move(b).build();
}

ObservationAutomaton build_mo(const Scenario& sc) {
    const auto& closure = sc.observations; // validated: sorted, prefix-closed
    std::set<std::vector<Event>> parents;
    for (const auto& s : closure)
        if (!s.empty()) parents.insert(std::vector<Event>(s.begin(), s.end() - 1));

    Automaton::Builder b(sc.observable);
    std::map<std::vector<Event>, StateId> id;
    StateId dl = no_state;
    std::size_t interior = 0;
    for (const auto& s : closure) {
        if (parents.count(s)) {
            id[s] = b.add_state_fresh("o" + std::to_string(interior++), true);
        } else {
            if (dl == no_state) dl = b.add_state_fresh("odl", true);
            id[s] = dl;
        }
    }
    b.initial(id.at({}));
    for (const auto& s : closure) {
        if (s.empty()) continue;
        std::vector<Event> parent(s.begin(), s.end() - 1);
        b.transition(id.at(parent), s.back(), id.at(s));
    }
    return {std::move(b).build(), dl};
}

ValidationReport validate_supervisor(const Scenario& sc, const Automaton& s) {
    ValidationReport r;
    if (!(s.alphabet() == sc.alphabet)) {
        r.problem("supervisor alphabet differs from the plant alphabet");
        return r;
    }
    const EventSet uc = sc.uncontrollable();
    const EventSet uo = sc.unobservable();
    for (StateId q = 0; q < s.state_count(); ++q) {
        for (const Event& e : uc)
            if (!s.defined(q, e))
                r.problem("state '" + s.label(q) + "' disables uncontrollable event '" +
                          e.name() + "'");
        for (const Event& e : uo) {
            StateId t = s.target(q, e);
            if (t != no_state && t != q)
                r.problem("unobservable event '" + e.name() + "' changes state '" +
                          s.label(q) + "'");
        }
    }
    return r;
}

ValidationReport validate_attacker(const Scenario& sc, const std::vector<Event>& gamma,
                                   const Automaton& a) {
    ValidationReport r;
    EventSet want = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) want.insert(h);
    for (const Event& g : gamma) want.insert(g);
    want.insert(Event::stop());
    if (!(a.alphabet() == want)) {
        r.problem("attacker alphabet must cover the plant events, the relabeled "
                  "compromised events, every command and stop");
        return r;
    }

    EventSet ctrl = sc.attackable;
    for (const Event& h : sc.hashed_compromised()) ctrl.insert(h);
    ctrl.insert(Event::stop());
    const EventSet beyond_control = set_difference(want, ctrl);

    EventSet unobs = sc.unobservable();
    for (const Event& g : gamma) unobs.insert(g);

    for (StateId q = 0; q < a.state_count(); ++q) {
        for (const Event& e : beyond_control)
            if (!a.defined(q, e))
                r.problem("state '" + a.label(q) + "' disables event '" + e.name() +
                          "' which the attacker cannot control");
        for (const Event& e : unobs) {
            StateId t = a.target(q, e);
            if (t != no_state && t != q)
                r.problem("event '" + e.name() +
                          "' is invisible to the attacker but changes state '" +
                          a.label(q) + "'");
        }
    }
    return r;
}

Automaton build_bt(const Scenario& sc, const Automaton& s, const std::vector<Event>& gamma) {
    auto rep = validate_supervisor(sc, s);
    if (!rep.ok) throw Error("supervisor is not well formed: " + rep.joined());

    EventSet abc = sc.alphabet;
    for (const Event& g : gamma) abc.insert(g);

    Automaton::Builder b(abc);
    std::vector<StateId> com(s.state_count()), rea(s.state_count());
    for (StateId q = 0; q < s.state_count(); ++q) {
        com[q] = b.add_state(s.label(q) + "_cmd", true);
        rea[q] = b.add_state(s.label(q), true);
    }
    b.initial(com[s.initial()]);
    for (StateId q = 0; q < s.state_count(); ++q) {
        std::vector<Event> en;
        for (const Transition& t : s.out(q)) en.push_back(t.event);
        b.transition(com[q], Event::command(en), rea[q]);
        for (const Transition& t : s.out(q)) {
            if (sc.observable.contains(t.event))
                b.transition(rea[q], t.event, com[t.target]);
            else
                b.transition(rea[q], t.event, rea[q]);
        }
    }
    return std::move(b).build();
}

Automaton universal_monitor(const Scenario& sc, const Automaton& ce) {
    Automaton g = sc.plant.with_all_marked();
    Automaton loop = sync_product(g, ce);
    EventSet vis = sc.observable;
    for (const Event& e : ce.alphabet())
        if (e.kind() == EventKind::command) vis.insert(e);
    return observer(loop, vis);
}

Automaton build_bts1(const Scenario& sc, const Automaton& bt, const Automaton& ce) {
    return sync_product(bt, universal_monitor(sc, ce));
}

AttackedSupervisor build_btsa(const Scenario& sc, const Automaton& bts1) {
    const std::vector<Phase> phase = bipartite_phases(bts1);

    EventSet abc = bts1.alphabet();
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);

    Automaton::Builder b(abc);
    for (StateId q = 0; q < bts1.state_count(); ++q) b.add_state(bts1.label(q), true);
    StateId detect = b.add_state_fresh("detect", true);
    b.initial(bts1.initial());

    for (StateId q = 0; q < bts1.state_count(); ++q) {
        for (const Transition& t : bts1.out(q)) {
            if (sc.compromised.contains(t.event))
                b.transition(q, sc.hashed(t.event), t.target);
            else
                b.transition(q, t.event, t.target);
        }
        if (phase[q] != Phase::reaction) continue;
        // The supervisor sees only what the attacker forwards, so a raw
        // compromised event never moves or blocks it, whether or not the
        // belief expected that event. Feasibility is the plant's business
        // and enablement the command channel's.
        for (const Event& e : sc.compromised) b.transition(q, e, q);
        for (const Event& e : sc.attackable)
            if (!sc.observable.contains(e) || sc.compromised.contains(e))
                b.transition(q, e, q);
        for (const Event& e : sc.observable) {
            if (bts1.defined(q, e)) continue;
            if (sc.compromised.contains(e))
                b.transition(q, sc.hashed(e), detect);
            else
                b.transition(q, e, detect);
        }
    }
    return {std::move(b).build(), detect};
}

namespace {

Automaton supervised_loop(const Scenario& sc, const Automaton& s) {
    auto gamma = build_gamma(sc);
    Automaton ce = build_ce(sc, gamma);
    Automaton bt = build_bt(sc, s, gamma);
    Automaton g = sc.plant.with_all_marked();
    return sync_product({&g, &ce, &bt});
}

} // namespace

bool check_consistency(const Scenario& sc, const Automaton& s) {
    if (!validate_supervisor(sc, s).ok) return false;
    Automaton obs = observer(supervised_loop(sc, s), sc.observable);
    for (const auto& str : sc.observations) {
        StateId q = obs.initial();
        for (const Event& e : str) {
            q = obs.target(q, e);
            if (q == no_state) return false;
        }
    }
    return true;
}

bool check_safe(const Scenario& sc, const Automaton& s) {
    if (!validate_supervisor(sc, s).ok) return false;
    Automaton loop = supervised_loop(sc, s);
    for (StateId q = 0; q < loop.state_count(); ++q)
        if (sc.is_damage(loop.origin_of(q).at(0))) return false;
    return true;
}

} // namespace covsyn
