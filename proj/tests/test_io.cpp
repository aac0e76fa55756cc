#include <doctest.h>

#include "harness.hpp"

#include <string>

using namespace covsyn;

namespace {

std::string scenario_text(const std::string& events, const std::string& damage,
                          const std::string& observations) {
    return "[events]\n" + events + "[plant] tank_plant.fsa\n[damage] " + damage +
           "\n[observations]\n" + observations;
}

const std::string kTankEvents = "L obs unc compromised\n"
                                "H obs unc compromised\n"
                                "EL obs unc compromised\n"
                                "EH obs unc compromised\n"
                                "close obs ctl attackable\n"
                                "open obs ctl attackable\n";

template <class F>
std::string parse_error_of(F&& f) {
    try {
        f();
    } catch (const io::ParseError& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& msg, const std::string& part) {
    return msg.find(part) != std::string::npos;
}

} // namespace

TEST_CASE("canonical serialization is frozen and idempotent") {
    Automaton::Builder b(EventSet{Event::plain("a"), Event::plain("b")});
    b.add_state("s0");
    b.add_state("s1", true);
    b.initial(0);
    b.transition(0, Event::plain("a"), 1);
    b.transition(1, Event::plain("b"), 0);
    Automaton a = std::move(b).build();

    const std::string expected = "alphabet a b\n"
                                 "states s0 s1\n"
                                 "init s0\n"
                                 "marked s1\n"
                                 "trans s0 a s1\n"
                                 "trans s1 b s0\n";
    CHECK(io::serialize_automaton(a) == expected);
    CHECK(io::serialize_automaton(io::parse_automaton(expected)) == expected);
}

TEST_CASE("fixture automata round-trip through the text format") {
    Scenario sc = harness::tank();
    for (const char* name : {"tank_plant.fsa", "tank_supervisor.fsa"}) {
        Automaton a = io::load_automaton(harness::fixture_dir() / name, &sc);
        std::string canon = io::serialize_automaton(a);
        Automaton back = io::parse_automaton(canon, name, &sc);
        CHECK(io::serialize_automaton(back) == canon);
        CHECK(language_equal(a, back));
    }
}

TEST_CASE("scenario context attaches event flags, no context defaults") {
    Scenario sc = harness::tank();
    const std::string text = "alphabet close L\nstates s0\ninit s0\ntrans s0 close s0\n";

    Automaton with = io::parse_automaton(text, "<mem>", &sc);
    for (const Event& e : with.alphabet()) {
        if (e.name() == "close") CHECK(e.controllable());
        if (e.name() == "L") CHECK_FALSE(e.controllable());
    }

    Automaton without = io::parse_automaton(text);
    for (const Event& e : without.alphabet()) {
        CHECK_FALSE(e.controllable());
        CHECK(e.observable());
    }

    CHECK(mentions(parse_error_of([&] {
              io::parse_automaton("alphabet bogus\nstates s0\ninit s0\n", "<mem>", &sc);
          }),
          "event 'bogus' is not declared in the scenario"));
}

TEST_CASE("marked line conventions") {
    const std::string base = "alphabet a\nstates s0 s1\ninit s0\ntrans s0 a s1\n";

    Automaton all = io::parse_automaton(base);
    CHECK(all.marked_count() == 2);

    Automaton none = io::parse_automaton(base + "marked\n");
    CHECK(none.marked_count() == 0);

    Automaton one = io::parse_automaton(base + "marked s1\n");
    CHECK(one.marked_count() == 1);
    CHECK(one.marked(*one.find_state("s1")));
}

TEST_CASE("hash starts a comment unless it trails an event name") {
    const std::string text = "# file header\n"
                             "alphabet a L# #trailing note\n"
                             "states s0 s1\n"
                             "init s0 # the start\n"
                             "trans s0 L# s1\n"
                             "#trans s0 a s1\n"
                             "trans s1 a s0\n";
    Automaton a = io::parse_automaton(text);
    CHECK(a.alphabet().size() == 2);
    Event hashed = Event::relabeled(Event::plain("L"));
    CHECK(a.alphabet().contains(hashed));
    CHECK(a.defined(*a.find_state("s0"), hashed));
    // The commented-out transition must not exist.
    CHECK_FALSE(a.defined(*a.find_state("s0"), Event::plain("a")));
}

TEST_CASE("command and stop event tokens") {
    const std::string text = "alphabet cmd{a,b} stop a b\n"
                             "states s0 s1\n"
                             "init s0\n"
                             "trans s0 cmd{a,b} s1\n"
                             "trans s1 stop s0\n";
    Automaton a = io::parse_automaton(text);
    bool saw_command = false, saw_stop = false;
    for (const Event& e : a.alphabet()) {
        if (e.kind() == EventKind::command) {
            saw_command = true;
            CHECK(e.members().size() == 2);
            CHECK(e.name() == "cmd{a,b}");
        }
        if (e.kind() == EventKind::stop) saw_stop = true;
    }
    CHECK(saw_command);
    CHECK(saw_stop);
    CHECK(io::serialize_automaton(io::parse_automaton(io::serialize_automaton(a))) ==
          io::serialize_automaton(a));
}

TEST_CASE("automaton parse errors carry source and line") {
    CHECK(mentions(parse_error_of([] {
              io::parse_automaton("alphabet a\nstates s0\nstates s0\ninit s0\n", "demo.fsa");
          }),
          "demo.fsa:3: state 's0' declared twice"));

    CHECK(mentions(parse_error_of([] {
              io::parse_automaton("alphabet a\nstates s0\ninit s0\ntrans s0 b s0\n", "demo.fsa");
          }),
          "demo.fsa:4: event 'b' is not in the alphabet"));

    CHECK(mentions(parse_error_of([] { io::parse_automaton("alphabet a\ninit s0\n", "demo.fsa"); }),
                   "demo.fsa: automaton declares no states"));

    CHECK(mentions(parse_error_of([] {
              io::parse_automaton("alphabet a\nstates s0\ninit s0\nwibble\n", "demo.fsa");
          }),
          "demo.fsa:4: unknown directive 'wibble'"));

    // Conflicting targets for one (state, event) pair are nondeterminism.
    CHECK(mentions(parse_error_of([] {
              io::parse_automaton("alphabet a\nstates s0 s1\ninit s0\n"
                                  "trans s0 a s0\ntrans s0 a s1\n",
                                  "demo.fsa");
          }),
          "nondeterministic"));
}

TEST_CASE("scenario flag constraints are load errors") {
    auto base_dir = harness::fixture_dir();
    auto load = [&](const std::string& text) {
        return parse_error_of([&] { io::parse_scenario(text, "demo.scn", base_dir); });
    };

    std::string ctl_unobs = kTankEvents;
    ctl_unobs.replace(ctl_unobs.find("close obs"), 9, "close unobs");
    CHECK(mentions(load(scenario_text(ctl_unobs, "dmg", "")),
                   "event 'close' is controllable but not observable"));

    std::string comp_unobs = kTankEvents;
    comp_unobs.replace(comp_unobs.find("L obs"), 5, "L unobs");
    CHECK(mentions(load(scenario_text(comp_unobs, "dmg", "")),
                   "event 'L' is compromised but not observable"));

    std::string atk_unc = kTankEvents;
    atk_unc.replace(atk_unc.find("close obs ctl"), 13, "close obs unc");
    CHECK(mentions(load(scenario_text(atk_unc, "dmg", "")),
                   "event 'close' is attackable but not controllable"));
}

TEST_CASE("scenario structural constraints are load errors") {
    auto base_dir = harness::fixture_dir();
    auto load = [&](const std::string& text) {
        return parse_error_of([&] { io::parse_scenario(text, "demo.scn", base_dir); });
    };

    // A plant without a marked line gets re-marked from the damage list, so
    // the deadlock requirement is what rejects a live damage state.
    Scenario tank = harness::tank();
    std::string no_marks = io::serialize_automaton(tank.plant.with_all_marked());
    auto tmp = std::filesystem::temp_directory_path() / "covsyn_live_damage.fsa";
    io::write_file(tmp, no_marks);
    CHECK(mentions(parse_error_of([&] {
              io::parse_scenario("[events]\n" + kTankEvents + "[plant] " + tmp.string() +
                                     "\n[damage] fill\n",
                                 "demo.scn", base_dir);
          }),
          "damage state 'fill' has outgoing transitions"));
    std::filesystem::remove(tmp);

    CHECK(mentions(load(scenario_text(kTankEvents, "nowhere", "")),
                   "damage state 'nowhere' is not a plant state"));

    // The plant file marks dmg; an empty damage list contradicts it.
    CHECK(mentions(load(scenario_text(kTankEvents, "", "")),
                   "plant file marks states other than the damage list"));

    CHECK(mentions(load(scenario_text(kTankEvents, "dmg", "L bogus\n")),
                   "event 'bogus' is not declared"));

    std::string el_unobs = kTankEvents;
    el_unobs.replace(el_unobs.find("EL obs unc compromised"), 22, "EL unobs unc");
    CHECK(mentions(load(scenario_text(el_unobs, "dmg", "EL\n")),
                   "observation uses unobservable event 'EL'"));

    CHECK(mentions(load("[events]\n" + kTankEvents + "[damage] dmg\n"),
                   "scenario declares no plant"));

    CHECK(mentions(load("L obs unc\n"), "content outside any section"));
}

TEST_CASE("scenario serialization round-trips") {
    Scenario sc = harness::tank();
    std::string text = io::serialize_scenario(sc, "tank_plant.fsa");
    Scenario back = io::parse_scenario(text, "<mem>", harness::fixture_dir());

    CHECK(io::serialize_scenario(back, "tank_plant.fsa") == text);
    CHECK(back.alphabet == sc.alphabet);
    CHECK(back.compromised == sc.compromised);
    CHECK(back.attackable == sc.attackable);
    CHECK(back.damage == sc.damage);
    CHECK(back.observations == sc.observations);
    CHECK(language_equal(back.plant, sc.plant));
}

TEST_CASE("observations are prefix closed after loading") {
    Scenario sc = harness::tank();
    // Recorded strings: "L close" and "H open"; closure adds the prefixes.
    std::vector<std::vector<Event>> expect = {
        {},
        {sc.find_event("H")},
        {sc.find_event("H"), sc.find_event("open")},
        {sc.find_event("L")},
        {sc.find_event("L"), sc.find_event("close")},
    };
    CHECK(sc.observations == expect);
}

TEST_CASE("serialization refuses names the format cannot express") {
    Automaton::Builder b(EventSet{Event::plain("a")});
    b.add_state("#bad", true);
    b.initial(0);
    Automaton a = std::move(b).build();
    CHECK_THROWS_AS(io::serialize_automaton(a), Error);

    Automaton::Builder b2(EventSet{Event::plain("a")});
    b2.add_state("two words", true);
    b2.initial(0);
    Automaton a2 = std::move(b2).build();
    CHECK_THROWS_AS(io::serialize_automaton(a2), Error);
}

TEST_CASE("files round-trip through disk") {
    Scenario sc = harness::tank();
    auto path = std::filesystem::temp_directory_path() / "covsyn_io_roundtrip.fsa";
    io::write_file(path, io::serialize_automaton(sc.plant));
    Automaton back = io::load_automaton(path, &sc);
    CHECK(io::serialize_automaton(back) == io::serialize_automaton(sc.plant));
    std::filesystem::remove(path);
}

TEST_CASE("dot export is well formed and styles the event kinds") {
    Scenario sc = harness::tank();
    std::string plant_dot = io::export_dot(sc.plant);
    harness::check_dot_grammar(plant_dot);
    CHECK(mentions(plant_dot, "peripheries=2"));

    Event l = sc.find_event("L");
    Event cmd = Event::command({sc.find_event("close")});
    Automaton::Builder b(EventSet{sc.hashed(l), cmd, Event::stop()});
    b.add_state("d0", true);
    b.add_state("d1");
    b.initial(0);
    b.transition(0, sc.hashed(l), 1);
    b.transition(0, cmd, 1);
    b.transition(1, Event::stop(), 0);
    Automaton a = std::move(b).build();

    std::string dot = io::export_dot(a);
    harness::check_dot_grammar(dot);
    CHECK(mentions(dot, "style=dashed"));
    CHECK(mentions(dot, "style=bold"));
    CHECK(mentions(dot, "style=dotted"));
    CHECK(mentions(dot, "peripheries=2"));
}
