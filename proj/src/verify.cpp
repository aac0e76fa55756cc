#include "covsyn/verify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace covsyn {

ClosedLoop assemble_closed_loop(const Scenario& sc, const Automaton& supervisor,
                                const Automaton& attacker) {
    auto gamma = build_gamma(sc);
    auto srep = validate_supervisor(sc, supervisor);
    if (!srep.ok) throw Error("supervisor is not well formed: " + srep.joined());
    auto arep = validate_attacker(sc, gamma, attacker);
    if (!arep.ok) throw Error("attacker is not well formed: " + arep.joined());

    Automaton ce = build_ce(sc, gamma);
    Automaton cea = build_cea(sc, gamma);
    Automaton ac = build_ac(sc, gamma);
    Automaton bt = build_bt(sc, supervisor, gamma);
    Automaton bts1 = build_bts1(sc, bt, ce);
    AttackedSupervisor snap = build_btsa(sc, bts1);

    Automaton joint = sync_product({&sc.plant, &cea, &ac, &snap.a, &attacker});
    std::vector<bool> marked(joint.state_count());
    for (StateId q = 0; q < joint.state_count(); ++q)
        marked[q] = sc.is_damage(joint.origin_of(q).at(0));
    return {joint.with_marking(marked), snap.detect};
}

bool check_covert(const Scenario& sc, const ClosedLoop& loop) {
    for (StateId q = 0; q < loop.b.state_count(); ++q) {
        const auto& tup = loop.b.origin_of(q);
        if (!sc.is_damage(tup.at(0)) && tup.at(3) == loop.detect) return false;
    }
    return true;
}

bool check_damage_reachable(const ClosedLoop& loop) { return is_marker_reachable(loop.b); }

SuccessReport check_successful(const Scenario& sc, const Automaton& attacker,
                               const std::vector<Automaton>& supervisors) {
    auto gamma = build_gamma(sc);
    auto arep = validate_attacker(sc, gamma, attacker);
    if (!arep.ok) throw Error("attacker is not well formed: " + arep.joined());

    SuccessReport rep;
    rep.successful = true;
    for (const Automaton& s : supervisors) {
        SupervisorVerdict v;
        auto srep = validate_supervisor(sc, s);
        if (!srep.ok) {
            v.why_invalid = srep.joined();
        } else if (!check_consistency(sc, s)) {
            v.why_invalid = "closed loop does not reproduce the recorded observations";
        } else if (!check_safe(sc, s)) {
            v.why_invalid = "closed loop reaches a damage state";
        } else {
            v.valid = true;
            ClosedLoop loop = assemble_closed_loop(sc, s, attacker);
            v.covert = check_covert(sc, loop);
            v.damage = check_damage_reachable(loop);
            rep.vacuous = false;
            if (!v.covert || !v.damage) rep.successful = false;
        }
        rep.rows.push_back(std::move(v));
    }
    if (rep.vacuous) rep.successful = false;
    return rep;
}

namespace {

std::vector<Event> command_choices(const Automaton& a, StateId q) {
    std::vector<Event> out;
    for (const Transition& t : a.out(q))
        if (t.event.kind() == EventKind::command) out.push_back(t.event);
    return out;
}

const Event& minimal_command(const std::vector<Event>& choices) {
    const Event* best = &choices.front();
    for (const Event& e : choices)
        if (e.members().size() < best->members().size() ||
            (e.members().size() == best->members().size() && e.name() < best->name()))
            best = &e;
    return *best;
}

// One deterministic resolution of the command space: a supervisor state per
// visited command state, enabling exactly the chosen command. Returns
// nothing when a command state offers no command at all.
std::optional<Automaton> resolve_command_space(const Scenario& sc, const Automaton& ocns,
                                               const std::vector<std::size_t>& round,
                                               std::size_t depth, std::mt19937_64* rng) {
    Automaton::Builder b(sc.alphabet);
    std::map<StateId, StateId> sid;
    StateId sink = no_state;
    std::deque<StateId> work;

    auto admit = [&](StateId c) {
        auto it = sid.find(c);
        if (it != sid.end()) return it->second;
        StateId s = b.add_state_fresh("u" + std::to_string(sid.size()), true);
        sid.emplace(c, s);
        work.push_back(c);
        return s;
    };
    b.initial(admit(ocns.initial()));

    while (!work.empty()) {
        StateId c = work.front();
        work.pop_front();
        StateId s = sid.at(c);
        std::vector<Event> choices = command_choices(ocns, c);
        if (choices.empty()) return std::nullopt;
        Event pick = (!rng || round.at(c) > depth)
                         ? minimal_command(choices)
                         : choices[(*rng)() % choices.size()];
        StateId reaction = ocns.target(c, pick);
        for (const Event& e : pick.members()) {
            if (!sc.observable.contains(e)) {
                b.transition(s, e, s);
                continue;
            }
            StateId next = ocns.target(reaction, e);
            if (next == no_state) {
                if (sink == no_state) {
                    sink = b.add_state_fresh("ulp", true);
                    for (const Event& u : sc.uncontrollable()) b.transition(sink, u, sink);
                }
                b.transition(s, e, sink);
            } else {
                b.transition(s, e, admit(next));
            }
        }
    }
    return std::move(b).build();
}

// Split supervisor states by the monitor cell they are entered under, so
// every state of the result is visited with exactly one belief. The
// bipartite forms of such a supervisor stay within the published size
// budget, because pairing with the monitor can no longer split states.
// Events the plant cannot produce under the tracked belief become
// self-loops; they never fire, so the closed loop is unchanged.
Automaton refine_by_monitor(const Scenario& sc, const Automaton& mon, const Automaton& s) {
    Automaton::Builder b(sc.alphabet);
    std::map<std::pair<StateId, StateId>, StateId> sid;
    std::deque<std::pair<StateId, StateId>> work;

    auto admit = [&](StateId u, StateId m) {
        auto key = std::make_pair(u, m);
        auto it = sid.find(key);
        if (it != sid.end()) return it->second;
        StateId r = b.add_state_fresh("u" + std::to_string(sid.size()), s.marked(u));
        sid.emplace(key, r);
        work.push_back(key);
        return r;
    };
    b.initial(admit(s.initial(), mon.initial()));

    while (!work.empty()) {
        auto [u, m] = work.front();
        work.pop_front();
        StateId r = sid.at({u, m});
        std::vector<Event> en;
        for (const Transition& t : s.out(u)) en.push_back(t.event);
        StateId mid = en.empty() ? no_state : mon.target(m, Event::command(en));
        for (const Transition& t : s.out(u)) {
            if (!sc.observable.contains(t.event) || mid == no_state) {
                b.transition(r, t.event, r);
                continue;
            }
            StateId next = mon.target(mid, t.event);
            if (next == no_state)
                b.transition(r, t.event, r);
            else
                b.transition(r, t.event, admit(t.target, next));
        }
    }
    return std::move(b).build();
}

std::vector<std::size_t> command_rounds(const Automaton& ocns) {
    std::vector<std::size_t> round(ocns.state_count(), 0);
    std::vector<char> seen(ocns.state_count(), 0);
    std::deque<StateId> work;
    seen[ocns.initial()] = 1;
    work.push_back(ocns.initial());
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        for (const Transition& t : ocns.out(q)) {
            if (t.target == q || seen[t.target]) continue;
            seen[t.target] = 1;
            round[t.target] =
                round[q] + (t.event.kind() == EventKind::command ? 0 : 1);
            work.push_back(t.target);
        }
    }
    return round;
}

} // namespace

std::vector<Automaton> enumerate_consistent_supervisors(const Scenario& sc, std::size_t depth,
                                                        std::size_t count,
                                                        std::uint64_t seed) {
    std::vector<Automaton> out;
    if (count == 0) return out;

    auto gamma = build_gamma(sc);
    Automaton ns = procedure1_ns(sc, gamma);
    Automaton oc = build_oc(sc, build_mo(sc), gamma);
    Automaton ocns = sync_product(ns, oc);
    Automaton mon = universal_monitor(sc, build_ce(sc, gamma));
    const std::vector<std::size_t> round = command_rounds(ocns);

    auto keep_if_new = [&](std::optional<Automaton> cand) {
        if (!cand) return;
        Automaton ref = refine_by_monitor(sc, mon, *cand);
        if (!check_consistency(sc, ref) || !check_safe(sc, ref)) return;
        for (const Automaton& have : out)
            if (language_equal(ref, have)) return;
        out.push_back(std::move(ref));
    };

    Automaton least = build_sdown(sc, build_mo(sc));
    keep_if_new(least);

    std::mt19937_64 rng(seed);
    const std::size_t max_attempts = 30 * count + 50;
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count; ++attempt)
        keep_if_new(resolve_command_space(sc, ocns, round, depth,
                                          attempt == 0 ? nullptr : &rng));
    return out;
}

namespace {

// Canonical fingerprint of the reachable part, for policy deduplication:
// breadth-first numbering, alphabet indices for events, marking flags.
std::string reachable_fingerprint(const Automaton& a) {
    std::map<std::string, std::size_t> eidx;
    {
        std::size_t i = 0;
        for (const Event& e : a.alphabet()) eidx[e.name()] = i++;
    }
    std::vector<StateId> order;
    std::vector<StateId> num(a.state_count(), no_state);
    num[a.initial()] = 0;
    order.push_back(a.initial());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const Transition& t : a.out(order[i]))
            if (num[t.target] == no_state) {
                num[t.target] = static_cast<StateId>(order.size());
                order.push_back(t.target);
            }
    std::ostringstream os;
    for (StateId q : order) {
        os << (a.marked(q) ? "m" : "-");
        for (const Transition& t : a.out(q))
            os << ' ' << eidx.at(t.event.name()) << '>' << num[t.target];
        os << ';';
    }
    return os.str();
}

} // namespace

std::optional<Automaton> brute_force_supremal(const Automaton& plant,
                                              const std::vector<StateId>& bad,
                                              const ControlConstraint& cc,
                                              const OracleCaps& caps) {
    if (!cc.controllable.subset_of(cc.observable))
        throw Error("oracle needs every controllable event to be observable");
    if (!cc.observable.subset_of(plant.alphabet()))
        throw Error("oracle constraint mentions events outside the plant alphabet");

    std::vector<char> is_bad(plant.state_count(), 0);
    for (StateId q : bad) is_bad.at(q) = 1;

    Automaton obs = observer(plant, cc.observable);
    const std::size_t cells = obs.state_count();
    const std::vector<Event> ctrl = cc.controllable.items();
    if (cells > caps.max_cells) throw Error("oracle refuses: too many observer cells");
    if (ctrl.size() > caps.max_controllable)
        throw Error("oracle refuses: too many controllable events");
    const std::size_t bits = cells * ctrl.size();
    if (bits >= 63 || (std::size_t{1} << bits) > caps.max_policies)
        throw Error("oracle refuses: too many policies");
    const std::size_t policies = std::size_t{1} << bits;

    auto ctrl_index = [&](const Event& e) {
        for (std::size_t i = 0; i < ctrl.size(); ++i)
            if (ctrl[i] == e) return static_cast<long>(i);
        return -1L;
    };

    // A policy disables a subset of the controllable transitions per cell.
    // Walk the plant against the policed observer; safe when no bad plant
    // state is ever paired in.
    auto policy_allows = [&](std::size_t mask, StateId cell, const Event& e) {
        long i = ctrl_index(e);
        if (i < 0) return true;
        return (mask >> (cell * ctrl.size() + static_cast<std::size_t>(i)) & 1u) == 0;
    };

    std::set<std::string> seen;
    std::vector<Automaton> kept;
    for (std::size_t mask = 0; mask < policies; ++mask) {
        bool safe = true;
        std::set<std::pair<StateId, StateId>> visited;
        std::deque<std::pair<StateId, StateId>> work;
        work.push_back({plant.initial(), obs.initial()});
        visited.insert(work.front());
        while (!work.empty() && safe) {
            auto [x, c] = work.front();
            work.pop_front();
            if (is_bad[x]) {
                safe = false;
                break;
            }
            for (const Transition& t : plant.out(x)) {
                if (!policy_allows(mask, c, t.event)) continue;
                StateId nc = cc.observable.contains(t.event) ? obs.target(c, t.event) : c;
                if (nc == no_state) continue; // plant-infeasible projection, cannot happen
                auto key = std::make_pair(t.target, nc);
                if (visited.insert(key).second) work.push_back(key);
            }
        }
        if (!safe) continue;

        Automaton::Builder b(obs.alphabet());
        for (StateId q = 0; q < obs.state_count(); ++q) {
            b.add_state_fresh(obs.label(q), obs.marked(q));
            b.origin_set(q, obs.origin_of(q));
        }
        b.initial(obs.initial());
        for (StateId q = 0; q < obs.state_count(); ++q)
            for (const Transition& t : obs.out(q))
                if (policy_allows(mask, q, t.event)) b.transition(q, t.event, t.target);
        b.origin_kind(StateOrigin::cell);
        Automaton policed = reachable_trim(std::move(b).build());
        if (seen.insert(reachable_fingerprint(policed)).second)
            kept.push_back(std::move(policed));
    }
    if (kept.empty()) return std::nullopt;

    std::vector<Automaton> loops;
    loops.reserve(kept.size());
    for (const Automaton& r : kept) loops.push_back(sync_product(plant, r));

    std::size_t best = 0;
    for (std::size_t i = 1; i < kept.size(); ++i) {
        Containment c = language_subset(loops[best], loops[i]);
        if (c.closed && c.marked) best = i;
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
        Containment c = language_subset(loops[i], loops[best]);
        if (!c.closed || !c.marked)
            throw std::logic_error("no single most permissive safe policy exists");
    }
    return kept[best];
}

} // namespace covsyn
