#include "covsyn/fsa_ops.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <stdexcept>

namespace covsyn {

namespace {

std::vector<StateId> ur_close(const Automaton& a, std::vector<StateId> seeds,
                              const EventSet& observable) {
    std::vector<bool> seen(a.state_count(), false);
    std::deque<StateId> work;
    for (StateId q : seeds) {
        if (!seen[q]) { seen[q] = true; work.push_back(q); }
    }
    std::vector<StateId> result;
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        result.push_back(q);
        for (const auto& t : a.out(q)) {
            if (observable.contains(t.event)) continue;
            if (!seen[t.target]) { seen[t.target] = true; work.push_back(t.target); }
        }
    }
    std::sort(result.begin(), result.end());
    return result;
}

std::string cell_label(const Automaton& a, const std::vector<StateId>& cell) {
    std::string s = "{";
    for (std::size_t i = 0; i < cell.size(); ++i) {
        if (i) s += ',';
        s += a.label(cell[i]);
    }
    s += '}';
    return s;
}

} // namespace

std::vector<StateId> unobservable_reach(const Automaton& a, StateId from,
                                        const EventSet& observable) {
    if (from >= a.state_count()) throw Error("unobservable_reach: no such state");
    return ur_close(a, {from}, observable);
}

Automaton observer(const Automaton& a, const EventSet& observable) {
    if (!observable.subset_of(a.alphabet()))
        throw Error("observer: observable events must belong to the alphabet");
    EventSet silent = set_difference(a.alphabet(), observable);

    std::map<std::vector<StateId>, StateId> index;
    std::vector<std::vector<StateId>> cells;
    Automaton::Builder b(a.alphabet());
    b.origin_kind(StateOrigin::cell);

    std::deque<StateId> work;
    auto add_cell = [&](std::vector<StateId> cell) {
        auto it = index.find(cell);
        if (it != index.end()) return it->second;
        bool marked = std::any_of(cell.begin(), cell.end(),
                                  [&](StateId q) { return a.marked(q); });
        StateId id = b.add_state(cell_label(a, cell), marked);
        b.origin_set(id, cell);
        cells.push_back(cell);
        index.emplace(std::move(cell), id);
        work.push_back(id);
        return id;
    };

    StateId init = add_cell(ur_close(a, {a.initial()}, observable));
    b.initial(init);

    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        std::vector<StateId> cell = cells[id];
        for (const Event& e : observable) {
            std::vector<StateId> image;
            for (StateId q : cell) {
                StateId t = a.target(q, e);
                if (t != no_state) image.push_back(t);
            }
            if (image.empty()) continue;
            StateId dst = add_cell(ur_close(a, std::move(image), observable));
            b.transition(id, e, dst);
        }
        for (const Event& e : silent) b.transition(id, e, id);
    }
    return b.build();
}

Automaton sync_product(const std::vector<const Automaton*>& parts) {
    if (parts.empty()) throw Error("sync_product: no components");
    EventSet alphabet;
    for (const Automaton* p : parts) alphabet = set_union(alphabet, p->alphabet());

    const std::size_t n = parts.size();
    std::map<std::vector<StateId>, StateId> index;
    std::vector<std::vector<StateId>> tuples;
    Automaton::Builder b(alphabet);
    b.origin_kind(StateOrigin::tuple);

    auto tuple_label = [&](const std::vector<StateId>& tup) {
        std::string s = "(";
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += ',';
            s += parts[i]->label(tup[i]);
        }
        s += ')';
        return s;
    };

    std::deque<StateId> work;
    auto add_tuple = [&](std::vector<StateId> tup) {
        auto it = index.find(tup);
        if (it != index.end()) return it->second;
        bool marked = true;
        for (std::size_t i = 0; i < n; ++i) marked = marked && parts[i]->marked(tup[i]);
        StateId id = b.add_state(tuple_label(tup), marked);
        b.origin_set(id, tup);
        tuples.push_back(tup);
        index.emplace(std::move(tup), id);
        work.push_back(id);
        return id;
    };

    std::vector<StateId> init;
    for (const Automaton* p : parts) init.push_back(p->initial());
    b.initial(add_tuple(std::move(init)));

    while (!work.empty()) {
        StateId id = work.front();
        work.pop_front();
        std::vector<StateId> tup = tuples[id];
        for (const Event& e : alphabet) {
            std::vector<StateId> next = tup;
            bool ok = true;
            for (std::size_t i = 0; i < n && ok; ++i) {
                if (!parts[i]->alphabet().contains(e)) continue;
                StateId t = parts[i]->target(tup[i], e);
                if (t == no_state) ok = false;
                else next[i] = t;
            }
            if (!ok) continue;
            b.transition(id, e, add_tuple(std::move(next)));
        }
    }
    return b.build();
}

Automaton sync_product(const Automaton& a, const Automaton& b) {
    return sync_product(std::vector<const Automaton*>{&a, &b});
}

Automaton reachable_trim(const Automaton& a) {
    if (a.state_count() == 0) throw Error("reachable_trim: empty automaton");
    std::vector<StateId> order;
    std::vector<StateId> remap(a.state_count(), no_state);
    std::deque<StateId> work{a.initial()};
    remap[a.initial()] = 0;
    order.push_back(a.initial());
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        for (const auto& t : a.out(q)) {
            if (remap[t.target] == no_state) {
                remap[t.target] = static_cast<StateId>(order.size());
                order.push_back(t.target);
                work.push_back(t.target);
            }
        }
    }
    Automaton::Builder b(a.alphabet());
    b.origin_kind(a.origin());
    for (StateId q : order) {
        StateId id = b.add_state(a.label(q), a.marked(q));
        if (a.origin() != StateOrigin::none) b.origin_set(id, a.origin_of(q));
    }
    for (StateId q : order)
        for (const auto& t : a.out(q)) b.transition(remap[q], t.event, remap[t.target]);
    b.initial(0);
    return b.build();
}

bool is_marker_reachable(const Automaton& a) {
    std::vector<bool> seen(a.state_count(), false);
    std::deque<StateId> work{a.initial()};
    seen[a.initial()] = true;
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        if (a.marked(q)) return true;
        for (const auto& t : a.out(q))
            if (!seen[t.target]) { seen[t.target] = true; work.push_back(t.target); }
    }
    return false;
}

Automaton relabel(const Automaton& a, const std::map<Event, Event>& map) {
    std::map<Event, Event> inverse;
    for (const auto& [from, to] : map) {
        auto [it, fresh] = inverse.emplace(to, from);
        if (!fresh) throw Error("relabel: two events rename to '" + to.name() + "'");
    }
    auto rename = [&](const Event& e) {
        auto it = map.find(e);
        return it == map.end() ? e : it->second;
    };
    EventSet alphabet;
    for (const Event& e : a.alphabet()) alphabet.insert(rename(e));
    Automaton::Builder b(alphabet);
    b.origin_kind(a.origin());
    for (StateId q = 0; q < a.state_count(); ++q) {
        StateId id = b.add_state(a.label(q), a.marked(q));
        if (a.origin() != StateOrigin::none) b.origin_set(id, a.origin_of(q));
    }
    for (StateId q = 0; q < a.state_count(); ++q)
        for (const auto& t : a.out(q)) b.transition(q, rename(t.event), t.target);
    b.initial(a.initial());
    return b.build();
}

Automaton complete(const Automaton& a, const EventSet& alphabet,
                   const std::string& dump_label) {
    if (!a.alphabet().subset_of(alphabet))
        throw Error("complete: target alphabet must contain the input alphabet");
    Automaton::Builder b(alphabet);
    b.origin_kind(a.origin());
    for (StateId q = 0; q < a.state_count(); ++q) {
        StateId id = b.add_state(a.label(q), a.marked(q));
        if (a.origin() != StateOrigin::none) b.origin_set(id, a.origin_of(q));
    }
    StateId dump = b.add_state(dump_label, false);
    for (StateId q = 0; q < a.state_count(); ++q)
        for (const auto& t : a.out(q)) b.transition(q, t.event, t.target);
    for (StateId q = 0; q <= dump; ++q)
        for (const Event& e : alphabet)
            if (!b.defined(q, e)) b.transition(q, e, dump);
    b.initial(a.initial());
    return b.build();
}

namespace {

struct PairKey {
    StateId qa;
    StateId qb; // no_state once a string left L(b)
    bool operator<(const PairKey& o) const {
        return qa != o.qa ? qa < o.qa : qb < o.qb;
    }
};

} // namespace

Containment language_subset(const Automaton& a, const Automaton& b) {
    Containment r;
    bool closed_found = false, marked_found = false;

    std::map<PairKey, std::size_t> index;
    std::vector<PairKey> pairs;
    std::vector<std::pair<std::size_t, Event>> parent; // BFS tree for witnesses
    std::deque<std::size_t> work;

    auto push = [&](PairKey k, std::size_t from, const Event& via) {
        auto it = index.find(k);
        if (it != index.end()) return;
        index.emplace(k, pairs.size());
        pairs.push_back(k);
        parent.emplace_back(from, via);
        work.push_back(pairs.size() - 1);
    };

    auto witness = [&](std::size_t i) {
        std::vector<Event> w;
        while (parent[i].second.valid()) {
            w.push_back(parent[i].second);
            i = parent[i].first;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    push({a.initial(), b.initial()}, 0, Event{});

    while (!work.empty() && !(closed_found && marked_found)) {
        std::size_t i = work.front();
        work.pop_front();
        PairKey k = pairs[i];

        if (!marked_found && a.marked(k.qa) &&
            (k.qb == no_state || !b.marked(k.qb))) {
            marked_found = true;
            r.marked = false;
            r.marked_witness = witness(i);
        }
        for (const auto& t : a.out(k.qa)) {
            StateId nb = no_state;
            if (k.qb != no_state && b.alphabet().contains(t.event))
                nb = b.target(k.qb, t.event);
            if (nb == no_state && k.qb != no_state && !closed_found) {
                closed_found = true;
                r.closed = false;
                std::vector<Event> w = witness(i);
                w.push_back(t.event);
                r.closed_witness = std::move(w);
            }
            push({t.target, nb}, i, t.event);
        }
    }
    return r;
}

bool language_equal(const Automaton& a, const Automaton& b) {
    Containment ab = language_subset(a, b);
    if (!ab.closed || !ab.marked) return false;
    Containment ba = language_subset(b, a);
    return ba.closed && ba.marked;
}

Acceptance accepts(const Automaton& a, const std::vector<Event>& s) {
    StateId q = a.initial();
    for (const Event& e : s) {
        if (!a.alphabet().contains(e))
            throw Error("accepts: event '" + e.name() + "' is not in the alphabet");
        q = a.target(q, e);
        if (q == no_state) return Acceptance::rejected;
    }
    return a.marked(q) ? Acceptance::in_marked : Acceptance::in_closed;
}

std::vector<Phase> bipartite_phases(const Automaton& a) {
    std::vector<Phase> phase(a.state_count(), Phase::command);
    std::vector<bool> set(a.state_count(), false);
    std::deque<StateId> work;

    auto expect = [&](StateId q, Phase p) {
        if (!set[q]) {
            set[q] = true;
            phase[q] = p;
            work.push_back(q);
        } else if (phase[q] != p) {
            throw std::logic_error("automaton is not command-alternating at state '" +
                                   a.label(q) + "'");
        }
    };

    expect(a.initial(), Phase::command);
    while (!work.empty()) {
        StateId q = work.front();
        work.pop_front();
        for (const auto& t : a.out(q)) {
            if (t.event.kind() == EventKind::command) {
                if (phase[q] != Phase::command)
                    throw std::logic_error("command event leaving a reaction state '" +
                                           a.label(q) + "'");
                expect(t.target, Phase::reaction);
            } else if (t.target != q) {
                if (phase[q] != Phase::reaction)
                    throw std::logic_error("plain event leaving a command state '" +
                                           a.label(q) + "'");
                expect(t.target, Phase::command);
            }
        }
    }
    return phase;
}

} // namespace covsyn
