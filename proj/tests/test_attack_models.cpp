#include <doctest.h>

#include "harness.hpp"

#include <algorithm>

using namespace covsyn;

namespace {

StateId state(const Automaton& a, const std::string& label) {
    auto q = a.find_state(label);
    REQUIRE_MESSAGE(q.has_value(), "no state labeled " << label);
    return *q;
}

// Supervisor that enables everything from a single state.
Automaton coarse_supervisor(const Scenario& sc) {
    Automaton::Builder b(sc.alphabet);
    b.add_state("z0", true);
    b.initial(0);
    for (const Event& e : sc.alphabet) b.transition(0, e, 0);
    return std::move(b).build();
}

// Three-event scenario with one unobservable event, for validator tests the
// fully observable tank cannot exercise.
Scenario partial_scenario() {
    Scenario sc;
    Event u = Event::plain("u", false, false);
    Event a = Event::plain("a", false, true);
    Event c = Event::plain("c", true, true);
    sc.alphabet = EventSet{u, a, c};
    sc.observable = EventSet{a, c};
    sc.controllable = EventSet{c};

    Automaton::Builder b(sc.alphabet);
    b.add_state("p0");
    b.add_state("p1");
    b.add_state("p2", true);
    b.initial(0);
    b.transition(0, u, 1);
    b.transition(0, a, 1);
    b.transition(1, c, 2);
    sc.plant = std::move(b).build();
    sc.damage = {2};
    sc.observations = prefix_closure({{a}});
    sc.validate();
    return sc;
}

} // namespace

TEST_CASE("command space of the tank") {
    Scenario sc = harness::tank();
    auto gamma = build_gamma(sc);
    REQUIRE(gamma.size() == 4);
    CHECK(gamma[0].name() == "cmd{EH,EL,H,L}");
    CHECK(gamma[1].name() == "cmd{EH,EL,H,L,close}");
    CHECK(gamma[2].name() == "cmd{EH,EL,H,L,open}");
    CHECK(gamma[3].name() == "cmd{EH,EL,H,L,close,open}");

    CHECK(least_command(sc) == gamma[0]);
    CHECK(full_command(sc) == gamma[3]);
    CHECK(gamma[1].command_contains(sc.find_event("close")));
    CHECK_FALSE(gamma[1].command_contains(sc.find_event("open")));
    for (const Event& g : gamma)
        for (const Event& u : sc.uncontrollable()) CHECK(g.command_contains(u));
}

TEST_CASE("command space caps") {
    Scenario sc = harness::tank();

    std::string warning;
    build_gamma(sc, CommandCaps{.warn_above = 2, .max_controllable = 20}, &warning);
    CHECK_FALSE(warning.empty());

    warning.clear();
    build_gamma(sc, {}, &warning);
    CHECK(warning.empty());

    CHECK_THROWS_AS(build_gamma(sc, CommandCaps{.warn_above = 2, .max_controllable = 1}), Error);
}

TEST_CASE("attack choreography of the tank") {
    Scenario sc = harness::tank();
    auto gamma = build_gamma(sc);
    Automaton ac = build_ac(sc, gamma);

    REQUIRE(ac.state_count() == 3);
    CHECK(ac.marked_count() == 3);
    StateId idle = state(ac, "idle"), hold = state(ac, "hold"), sent = state(ac, "sent");
    CHECK(ac.initial() == idle);
    CHECK(ac.out(idle).size() == 10);
    CHECK(ac.out(hold).size() == 5);
    CHECK(ac.out(sent).size() == 1);

    // Intercepted reading, forwarded fake, handing control back.
    Event h = sc.find_event("H"), l = sc.find_event("L");
    CHECK(ac.target(idle, h) == hold);
    CHECK(ac.target(hold, sc.hashed(l)) == sent);
    CHECK(ac.target(hold, Event::stop()) == idle);
    CHECK(ac.target(sent, Event::stop()) == idle);

    // Readings beyond the attacker pass straight to the relay state; commands
    // do not move the choreography.
    CHECK(ac.target(idle, sc.find_event("close")) == sent);
    for (const Event& g : gamma) CHECK(ac.target(idle, g) == idle);

    CHECK(ac.alphabet().contains(Event::stop()));
    CHECK(ac.alphabet().contains(sc.hashed(h)));
}

TEST_CASE("command execution of the tank") {
    Scenario sc = harness::tank();
    auto gamma = build_gamma(sc);
    Automaton ce = build_ce(sc, gamma);

    REQUIRE(ce.state_count() == gamma.size() + 1);
    CHECK(ce.marked_count() == 5);
    StateId idle = state(ce, "idle");
    CHECK(ce.initial() == idle);
    CHECK(ce.out(idle).size() == 4);

    StateId v1 = state(ce, gamma[0].name());
    StateId v4 = state(ce, gamma[3].name());
    CHECK(ce.target(idle, gamma[0]) == v1);
    CHECK(ce.out(v1).size() == 4);
    CHECK(ce.out(v4).size() == 6);
    // Every member of the tank commands is observable, so execution always
    // returns to idle.
    for (StateId q : {v1, v4})
        for (const Transition& t : ce.out(q)) CHECK(t.target == idle);
    CHECK_FALSE(ce.defined(v1, sc.find_event("close")));
}

TEST_CASE("command execution under actuator attack") {
    Scenario sc = harness::tank();
    auto gamma = build_gamma(sc);
    Automaton cea = build_cea(sc, gamma);

    REQUIRE(cea.state_count() == gamma.size() + 1);
    StateId idle = state(cea, "idle");
    // Commands plus self-loops for the uncontrollable events the plant may
    // fire before any command arrives.
    CHECK(cea.out(idle).size() == 8);
    for (const Event& u : sc.uncontrollable()) CHECK(cea.target(idle, u) == idle);

    // Attackable valve events become available inside every open command.
    StateId v1 = state(cea, gamma[0].name());
    CHECK(cea.out(v1).size() == 6);
    CHECK(cea.target(v1, sc.find_event("close")) == idle);
    CHECK(cea.target(v1, sc.find_event("open")) == idle);
}

TEST_CASE("observation automaton of the tank") {
    Scenario sc = harness::tank();
    ObservationAutomaton mo = build_mo(sc);

    REQUIRE(mo.a.state_count() == 4);
    CHECK(mo.a.marked_count() == 4);
    CHECK(mo.a.alphabet() == sc.observable);

    StateId root = mo.a.initial();
    CHECK(mo.a.label(root) == "o0");
    StateId after_h = mo.a.target(root, sc.find_event("H"));
    StateId after_l = mo.a.target(root, sc.find_event("L"));
    REQUIRE(after_h != no_state);
    REQUIRE(after_l != no_state);
    CHECK(after_h != after_l);

    // Both recorded strings end in the single merged deadlock.
    CHECK(mo.a.target(after_h, sc.find_event("open")) == mo.deadlock);
    CHECK(mo.a.target(after_l, sc.find_event("close")) == mo.deadlock);
    CHECK(mo.a.label(mo.deadlock) == "odl");
    CHECK(mo.a.out(mo.deadlock).empty());
    CHECK_FALSE(mo.a.defined(root, sc.find_event("EL")));
}

TEST_CASE("observation automaton merges only maximal strings") {
    Scenario sc;
    Event a = Event::plain("a"), b = Event::plain("b"), c = Event::plain("c");
    sc.alphabet = EventSet{a, b, c};
    sc.observable = sc.alphabet;
    Automaton::Builder pb(sc.alphabet);
    pb.add_state("p0");
    pb.add_state("p1");
    pb.add_state("p2");
    pb.initial(0);
    pb.transition(0, a, 1);
    pb.transition(1, b, 2);
    pb.transition(1, c, 2);
    sc.plant = std::move(pb).build();
    sc.observations = prefix_closure({{a, b}, {a, c}});
    sc.validate();

    ObservationAutomaton mo = build_mo(sc);
    REQUIRE(mo.a.state_count() == 3);
    StateId mid = mo.a.target(mo.a.initial(), a);
    CHECK(mo.a.target(mid, b) == mo.deadlock);
    CHECK(mo.a.target(mid, c) == mo.deadlock);
}

TEST_CASE("supervisor unfolding into commands and reactions") {
    Scenario sc = harness::tank();
    Automaton s = harness::tank_supervisor(sc);
    auto gamma = build_gamma(sc);
    Automaton bt = build_bt(sc, s, gamma);

    REQUIRE(bt.state_count() == 2 * s.state_count());
    CHECK(bt.label(bt.initial()) == "t0_cmd");

    // Each command state issues exactly the enabled set of its source state.
    StateId t0c = state(bt, "t0_cmd");
    REQUIRE(bt.out(t0c).size() == 1);
    CHECK(bt.out(t0c)[0].event.name() == "cmd{EH,EL,H,L}");
    StateId t1c = state(bt, "t1_cmd");
    REQUIRE(bt.out(t1c).size() == 1);
    CHECK(bt.out(t1c)[0].event.name() == "cmd{EH,EL,H,L,close}");

    // Reactions step to the command copy of the successor.
    StateId t0 = state(bt, "t0");
    CHECK(bt.target(t0, sc.find_event("L")) == t1c);
    CHECK(bt.target(t0, sc.find_event("EH")) == state(bt, "t3_cmd"));

    std::vector<Phase> phase = bipartite_phases(bt);
    CHECK(phase[t0c] == Phase::command);
    CHECK(phase[t0] == Phase::reaction);
}

TEST_CASE("unfolding constrained to command feedback") {
    Scenario sc = harness::tank();
    Automaton s = harness::tank_supervisor(sc);
    auto gamma = build_gamma(sc);
    Automaton ce = build_ce(sc, gamma);
    Automaton bt = build_bt(sc, s, gamma);
    Automaton bts1 = build_bts1(sc, bt, ce);

    CHECK(bts1.state_count() == 6);
    CHECK(bts1.label(bts1.initial()) == "(t0_cmd,{(mid,idle)})");
    CHECK(language_subset(bts1, bt).closed);

    // The freeze state t3 is only reachable on extreme readings, which the
    // plant cannot produce before a valve command; the constrained form
    // drops it.
    for (StateId q = 0; q < bts1.state_count(); ++q)
        CHECK(bts1.label(q).find("t3") == std::string::npos);
}

TEST_CASE("monitored size can exceed twice the supervisor size") {
    // A supervisor much coarser than its observation classes: the constrained
    // unfolding tracks plant knowledge the single state never separates, so
    // no bound of the shape 2|Q|+1 can be enforced structurally.
    Scenario sc = harness::tank();
    Automaton coarse = coarse_supervisor(sc);
    CHECK(validate_supervisor(sc, coarse).ok);

    auto gamma = build_gamma(sc);
    Automaton bt = build_bt(sc, coarse, gamma);
    Automaton bts1 = build_bts1(sc, bt, build_ce(sc, gamma));
    CHECK(bt.state_count() == 2);
    CHECK(bts1.state_count() == 12);
}

TEST_CASE("attacked supervisor form of the tank fixture") {
    Scenario sc = harness::tank();
    Automaton s = harness::tank_supervisor(sc);
    auto gamma = build_gamma(sc);
    Automaton bts1 = build_bts1(sc, build_bt(sc, s, gamma), build_ce(sc, gamma));
    AttackedSupervisor att = build_btsa(sc, bts1);

    REQUIRE(att.a.state_count() == 7);
    CHECK(att.a.state_count() <= 2 * s.state_count() + 1);
    CHECK(att.a.marked_count() == 7);
    CHECK(att.a.label(att.detect) == "detect");
    CHECK(att.a.out(att.detect).empty());

    std::vector<Phase> phase = bipartite_phases(att.a);
    for (StateId q = 0; q < att.a.state_count(); ++q) {
        if (q == att.detect) continue;
        if (phase[q] == Phase::command) {
            CHECK(att.a.out(q).size() == 1);
            CHECK(att.a.out(q)[0].event.kind() == EventKind::command);
            continue;
        }
        // Raw compromised readings never move the supervisor: the attacker
        // decides what it sees.
        for (const Event& e : sc.compromised) CHECK(att.a.target(q, e) == q);
        // Every observable is accounted for, plain or relabeled.
        for (const Event& e : sc.observable) {
            Event wire = sc.compromised.contains(e) ? sc.hashed(e) : e;
            CHECK(att.a.defined(q, wire));
        }
    }

    StateId t0 = state(att.a, "(t0,{(mid,cmd{EH,EL,H,L})})");
    Event l = sc.find_event("L"), h = sc.find_event("H");
    CHECK(att.a.target(t0, sc.hashed(l)) == state(att.a, "(t1_cmd,{(low,idle)})"));
    CHECK(att.a.target(t0, sc.hashed(h)) == state(att.a, "(t2_cmd,{(high,idle)})"));
    // Readings the supervisor cannot explain from here give the attack away.
    CHECK(att.a.target(t0, sc.hashed(sc.find_event("EL"))) == att.detect);
    CHECK(att.a.target(t0, sc.find_event("close")) == att.detect);
}

TEST_CASE("supervisor validation") {
    Scenario sc = partial_scenario();
    Event u = sc.find_event("u"), a = sc.find_event("a"), c = sc.find_event("c");

    Automaton::Builder good(sc.alphabet);
    good.add_state("s0", true);
    good.add_state("s1", true);
    good.initial(0);
    good.transition(0, u, 0);
    good.transition(0, a, 1);
    good.transition(1, u, 1);
    good.transition(1, a, 1);
    good.transition(1, c, 0);
    CHECK(validate_supervisor(sc, std::move(good).build()).ok);

    // Missing uncontrollable event at s1.
    Automaton::Builder missing(sc.alphabet);
    missing.add_state("s0", true);
    missing.add_state("s1", true);
    missing.initial(0);
    missing.transition(0, u, 0);
    missing.transition(0, a, 1);
    missing.transition(1, u, 1);
    ValidationReport r1 = validate_supervisor(sc, std::move(missing).build());
    CHECK_FALSE(r1.ok);
    CHECK(r1.joined().find("'a'") != std::string::npos);

    // An unobservable event must not change the supervisor state.
    Automaton::Builder moving(sc.alphabet);
    moving.add_state("s0", true);
    moving.add_state("s1", true);
    moving.initial(0);
    moving.transition(0, u, 1);
    moving.transition(0, a, 0);
    moving.transition(1, u, 1);
    moving.transition(1, a, 1);
    ValidationReport r2 = validate_supervisor(sc, std::move(moving).build());
    CHECK_FALSE(r2.ok);
    CHECK(r2.joined().find("'u'") != std::string::npos);

    // Wrong alphabet.
    Automaton::Builder wrong(EventSet{u, a});
    wrong.add_state("s0", true);
    wrong.initial(0);
    wrong.transition(0, u, 0);
    wrong.transition(0, a, 0);
    CHECK_FALSE(validate_supervisor(sc, std::move(wrong).build()).ok);
}

TEST_CASE("attacker validation") {
    Scenario sc = harness::tank();
    auto gamma = build_gamma(sc);

    EventSet abc = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) abc.insert(h);
    for (const Event& g : gamma) abc.insert(g);
    abc.insert(Event::stop());

    auto inert = [&](EventSet alphabet) {
        Automaton::Builder b(std::move(alphabet));
        b.add_state("i0", true);
        b.initial(0);
        for (const Event& e : sc.alphabet) b.transition(0, e, 0);
        for (const Event& g : gamma) b.transition(0, g, 0);
        return b;
    };

    CHECK(validate_attacker(sc, gamma, std::move(inert(abc)).build()).ok);

    // The reserved stop event must be in the alphabet even when unused.
    EventSet no_stop = sc.alphabet;
    for (const Event& h : sc.hashed_compromised()) no_stop.insert(h);
    for (const Event& g : gamma) no_stop.insert(g);
    CHECK_FALSE(validate_attacker(sc, gamma, std::move(inert(no_stop)).build()).ok);

    // Plain plant events cannot be disabled by the attacker.
    Automaton::Builder undef(abc);
    undef.add_state("i0", true);
    undef.initial(0);
    for (const Event& g : gamma) undef.transition(0, g, 0);
    ValidationReport r = validate_attacker(sc, gamma, std::move(undef).build());
    CHECK_FALSE(r.ok);

    // Commands are invisible to the attacker, so they may not change state.
    Automaton::Builder cmdmove(abc);
    cmdmove.add_state("i0", true);
    cmdmove.add_state("i1", true);
    cmdmove.initial(0);
    for (const Event& e : sc.alphabet) {
        cmdmove.transition(0, e, 0);
        cmdmove.transition(1, e, 1);
    }
    for (const Event& g : gamma) cmdmove.transition(1, g, 1);
    cmdmove.transition(0, gamma[0], 1);
    for (const Event& g : gamma)
        if (!(g == gamma[0])) cmdmove.transition(0, g, 0);
    CHECK_FALSE(validate_attacker(sc, gamma, std::move(cmdmove).build()).ok);
}

TEST_CASE("consistency and safety of concrete supervisors") {
    Scenario sc = harness::tank();

    Automaton fixture = harness::tank_supervisor(sc);
    CHECK(check_consistency(sc, fixture));
    CHECK(check_safe(sc, fixture));

    // Never issuing a valve command keeps the plant safe but cannot explain
    // the recorded strings.
    Automaton::Builder ib(sc.alphabet);
    ib.add_state("i0", true);
    ib.initial(0);
    for (const Event& u : sc.uncontrollable()) ib.transition(0, u, 0);
    Automaton inert = std::move(ib).build();
    CHECK(validate_supervisor(sc, inert).ok);
    CHECK_FALSE(check_consistency(sc, inert));
    CHECK(check_safe(sc, inert));

    // Opening the valve on a low reading drains the tank into damage.
    Event l = sc.find_event("L");
    Automaton::Builder rb(sc.alphabet);
    rb.add_state("r0", true);
    rb.add_state("r1", true);
    rb.initial(0);
    for (const Event& u : sc.uncontrollable()) rb.transition(1, u, 1);
    rb.transition(0, l, 1);
    for (const Event& u : sc.uncontrollable())
        if (!(u == l)) rb.transition(0, u, 0);
    rb.transition(1, sc.find_event("open"), 0);
    Automaton reckless = std::move(rb).build();
    CHECK(validate_supervisor(sc, reckless).ok);
    CHECK_FALSE(check_safe(sc, reckless));
    CHECK_FALSE(check_consistency(sc, reckless));
}
