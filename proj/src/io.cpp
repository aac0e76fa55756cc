#include "covsyn/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace covsyn::io {

namespace {

std::string at(const std::string& source, std::size_t line) {
    std::ostringstream os;
    os << source;
    if (line) os << ":" << line;
    return os.str();
}

} // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(at(source, line) + ": " + what) {}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        if (tok.front() == '#') break;
        out.push_back(tok);
    }
    return out;
}

Event resolve_plain(const std::string& name, const Scenario* context,
                    const std::string& source, std::size_t line) {
    if (!context) return Event::plain(name);
    try {
        return context->find_event(name);
    } catch (const Error&) {
        throw ParseError(source, line, "event '" + name + "' is not declared in the scenario");
    }
}

Event resolve_event(const std::string& tok, const Scenario* context,
                    const std::string& source, std::size_t line) {
    if (tok == "stop") return Event::stop();
    if (tok.size() > 4 && tok.rfind("cmd{", 0) == 0 && tok.back() == '}') {
        std::vector<Event> members;
        std::string inner = tok.substr(4, tok.size() - 5);
        std::string piece;
        std::istringstream is(inner);
        while (std::getline(is, piece, ','))
            if (!piece.empty()) members.push_back(resolve_plain(piece, context, source, line));
        return Event::command(members);
    }
    if (tok.size() > 1 && tok.back() == '#')
        return Event::relabeled(resolve_plain(tok.substr(0, tok.size() - 1), context, source, line));
    return resolve_plain(tok, context, source, line);
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Automaton parse_automaton_impl(std::string_view text, const std::string& source,
                               const Scenario* context, bool* explicit_marked) {
    struct Trans {
        std::string src, event, dst;
        std::size_t line;
    };
    std::vector<std::pair<std::string, std::size_t>> alpha_toks;
    std::vector<std::pair<std::string, std::size_t>> state_names;
    std::vector<std::string> marked_names;
    bool marked_seen = false;
    std::string init_name;
    std::size_t init_line = 0;
    std::vector<Trans> trans;

    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        const std::string& head = toks.front();
        if (head == "alphabet") {
            for (std::size_t i = 1; i < toks.size(); ++i) alpha_toks.push_back({toks[i], lineno});
        } else if (head == "states") {
            for (std::size_t i = 1; i < toks.size(); ++i) state_names.push_back({toks[i], lineno});
        } else if (head == "init") {
            if (toks.size() != 2) throw ParseError(source, lineno, "init wants one state name");
            if (!init_name.empty()) throw ParseError(source, lineno, "init given twice");
            init_name = toks[1];
            init_line = lineno;
        } else if (head == "marked") {
            marked_seen = true;
            for (std::size_t i = 1; i < toks.size(); ++i) marked_names.push_back(toks[i]);
        } else if (head == "trans") {
            if (toks.size() != 4)
                throw ParseError(source, lineno, "trans wants source, event and target");
            trans.push_back({toks[1], toks[2], toks[3], lineno});
        } else {
            throw ParseError(source, lineno, "unknown directive '" + head + "'");
        }
    }
    if (explicit_marked) *explicit_marked = marked_seen;

    EventSet alphabet;
    for (const auto& [tok, ln] : alpha_toks) alphabet.insert(resolve_event(tok, context, source, ln));
    if (state_names.empty()) throw ParseError(source, 0, "automaton declares no states");

    std::set<std::string> marked_set(marked_names.begin(), marked_names.end());
    for (const std::string& m : marked_set) {
        bool known = false;
        for (const auto& [n, ln] : state_names) known = known || n == m;
        if (!known) throw ParseError(source, 0, "marked state '" + m + "' is not declared");
    }

    Automaton::Builder b(alphabet);
    std::map<std::string, StateId> id;
    for (const auto& [n, ln] : state_names) {
        if (id.count(n)) throw ParseError(source, ln, "state '" + n + "' declared twice");
        id[n] = b.add_state_fresh(n, !marked_seen || marked_set.count(n) > 0);
    }
    if (init_name.empty()) throw ParseError(source, 0, "automaton declares no init state");
    if (!id.count(init_name))
        throw ParseError(source, init_line, "init state '" + init_name + "' is not declared");
    b.initial(id.at(init_name));

    for (const Trans& t : trans) {
        if (!id.count(t.src))
            throw ParseError(source, t.line, "state '" + t.src + "' is not declared");
        if (!id.count(t.dst))
            throw ParseError(source, t.line, "state '" + t.dst + "' is not declared");
        Event e = resolve_event(t.event, context, source, t.line);
        if (!alphabet.contains(e))
            throw ParseError(source, t.line, "event '" + t.event + "' is not in the alphabet");
        try {
            b.transition(id.at(t.src), e, id.at(t.dst));
        } catch (const Error& err) {
            throw ParseError(source, t.line, err.what());
        }
    }
    try {
        return std::move(b).build();
    } catch (const Error& err) {
        throw ParseError(source, 0, err.what());
    }
}

void check_serializable(const std::string& name, const char* what) {
    if (name.empty()) throw Error(std::string(what) + " has an empty name");
    if (name.front() == '#')
        throw Error(std::string(what) + " '" + name + "' would read as a comment");
    for (char c : name)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw Error(std::string(what) + " '" + name + "' holds whitespace");
}

} // namespace

Automaton parse_automaton(std::string_view text, const std::string& source,
                          const Scenario* context) {
    return parse_automaton_impl(text, source, context, nullptr);
}

Automaton load_automaton(const std::filesystem::path& path, const Scenario* context) {
    return parse_automaton_impl(slurp(path), path.string(), context, nullptr);
}

std::string serialize_automaton(const Automaton& a) {
    for (const Event& e : a.alphabet()) check_serializable(e.name(), "event");
    for (StateId q = 0; q < a.state_count(); ++q) check_serializable(a.label(q), "state");

    std::vector<StateId> order(a.state_count());
    std::iota(order.begin(), order.end(), StateId{0});
    std::sort(order.begin(), order.end(),
              [&](StateId x, StateId y) { return a.label(x) < a.label(y); });

    std::ostringstream os;
    os << "alphabet";
    for (const Event& e : a.alphabet()) os << ' ' << e.name();
    os << '\n' << "states";
    for (StateId q : order) os << ' ' << a.label(q);
    os << '\n' << "init " << a.label(a.initial()) << '\n';
    if (a.marked_count() != a.state_count()) {
        os << "marked";
        for (StateId q : order)
            if (a.marked(q)) os << ' ' << a.label(q);
        os << '\n';
    }
    for (StateId q : order)
        for (const Transition& t : a.out(q))
            os << "trans " << a.label(q) << ' ' << t.event.name() << ' ' << a.label(t.target)
               << '\n';
    return os.str();
}

Scenario parse_scenario(std::string_view text, const std::string& source,
                        const std::filesystem::path& base_dir) {
    enum class Section { none, events, observations };
    Section section = Section::none;

    Scenario sc;
    std::string plant_ref;
    std::vector<std::string> damage_names;
    std::vector<std::pair<std::vector<std::string>, std::size_t>> obs_lines;
    std::set<std::string> event_names;

    std::istringstream is{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto toks = tokens_of(line);
        if (toks.empty()) continue;
        const std::string& head = toks.front();
        if (head == "[events]") {
            section = Section::events;
        } else if (head == "[plant]") {
            if (toks.size() != 2) throw ParseError(source, lineno, "[plant] wants one path");
            plant_ref = toks[1];
            section = Section::none;
        } else if (head == "[damage]") {
            damage_names.assign(toks.begin() + 1, toks.end());
            section = Section::none;
        } else if (head == "[observations]") {
            section = Section::observations;
        } else if (head.front() == '[') {
            throw ParseError(source, lineno, "unknown section '" + head + "'");
        } else if (section == Section::events) {
            if (toks.size() < 3)
                throw ParseError(source, lineno,
                                 "event line wants a name, obs|unobs and ctl|unc");
            const std::string& name = toks[0];
            if (!event_names.insert(name).second)
                throw ParseError(source, lineno, "event '" + name + "' declared twice");
            bool obs = false, ctl = false, comp = false, atk = false;
            bool saw_obs = false, saw_ctl = false;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const std::string& f = toks[i];
                if (f == "obs" || f == "unobs") {
                    if (saw_obs) throw ParseError(source, lineno, "observability given twice");
                    saw_obs = true;
                    obs = f == "obs";
                } else if (f == "ctl" || f == "unc") {
                    if (saw_ctl) throw ParseError(source, lineno, "controllability given twice");
                    saw_ctl = true;
                    ctl = f == "ctl";
                } else if (f == "compromised") {
                    comp = true;
                } else if (f == "attackable") {
                    atk = true;
                } else {
                    throw ParseError(source, lineno, "unknown event flag '" + f + "'");
                }
            }
            if (!saw_obs || !saw_ctl)
                throw ParseError(source, lineno, "event needs obs|unobs and ctl|unc");
            if (ctl && !obs)
                throw ParseError(source, lineno,
                                 "event '" + name + "' is controllable but not observable");
            if (comp && !obs)
                throw ParseError(source, lineno,
                                 "event '" + name + "' is compromised but not observable");
            if (atk && !ctl)
                throw ParseError(source, lineno,
                                 "event '" + name + "' is attackable but not controllable");
            Event e = Event::plain(name, ctl, obs);
            sc.alphabet.insert(e);
            if (obs) sc.observable.insert(e);
            if (ctl) sc.controllable.insert(e);
            if (comp) sc.compromised.insert(e);
            if (atk) sc.attackable.insert(e);
        } else if (section == Section::observations) {
            obs_lines.push_back({toks, lineno});
        } else {
            throw ParseError(source, lineno, "content outside any section");
        }
    }

    if (sc.alphabet.empty()) throw ParseError(source, 0, "scenario declares no events");
    if (plant_ref.empty()) throw ParseError(source, 0, "scenario declares no plant");

    std::filesystem::path plant_path(plant_ref);
    if (plant_path.is_relative()) plant_path = base_dir / plant_path;
    bool explicit_marked = false;
    sc.plant = parse_automaton_impl(slurp(plant_path), plant_path.string(), &sc,
                                    &explicit_marked);

    for (const std::string& n : damage_names) {
        auto q = sc.plant.find_state(n);
        if (!q) throw ParseError(source, 0, "damage state '" + n + "' is not a plant state");
        sc.damage.push_back(*q);
    }
    std::sort(sc.damage.begin(), sc.damage.end());
    sc.damage.erase(std::unique(sc.damage.begin(), sc.damage.end()), sc.damage.end());

    std::vector<bool> damage_marks(sc.plant.state_count(), false);
    for (StateId q : sc.damage) damage_marks[q] = true;
    if (explicit_marked) {
        for (StateId q = 0; q < sc.plant.state_count(); ++q)
            if (sc.plant.marked(q) != damage_marks[q])
                throw ParseError(source, 0,
                                 "plant file marks states other than the damage list");
    } else {
        sc.plant = sc.plant.with_marking(damage_marks);
    }

    std::vector<std::vector<Event>> recorded;
    for (const auto& [names, ln] : obs_lines) {
        std::vector<Event> s;
        for (const std::string& n : names) {
            Event e;
            try {
                e = sc.find_event(n);
            } catch (const Error&) {
                throw ParseError(source, ln, "event '" + n + "' is not declared");
            }
            if (!sc.observable.contains(e))
                throw ParseError(source, ln,
                                 "observation uses unobservable event '" + n + "'");
            s.push_back(e);
        }
        recorded.push_back(std::move(s));
    }
    sc.observations = prefix_closure(recorded);

    try {
        sc.validate();
    } catch (const Error& err) {
        throw ParseError(source, 0, err.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(slurp(path), path.string(), path.parent_path());
}

std::string serialize_scenario(const Scenario& sc, const std::string& plant_ref) {
    std::ostringstream os;
    os << "[events]\n";
    for (const Event& e : sc.alphabet) {
        os << e.name() << ' ' << (sc.observable.contains(e) ? "obs" : "unobs") << ' '
           << (sc.controllable.contains(e) ? "ctl" : "unc");
        if (sc.compromised.contains(e)) os << " compromised";
        if (sc.attackable.contains(e)) os << " attackable";
        os << '\n';
    }
    os << "[plant] " << plant_ref << '\n';
    os << "[damage]";
    std::vector<std::string> names;
    for (StateId q : sc.damage) names.push_back(sc.plant.label(q));
    std::sort(names.begin(), names.end());
    for (const std::string& n : names) os << ' ' << n;
    os << '\n';
    os << "[observations]\n";
    for (const auto& s : sc.observations) {
        if (s.empty()) continue;
        for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i].name();
        os << '\n';
    }
    return os.str();
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string export_dot(const Automaton& a) {
    std::ostringstream os;
    os << "digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n"
       << "  __init [shape=point, label=\"\"];\n";
    for (StateId q = 0; q < a.state_count(); ++q) {
        os << "  \"" << dot_escape(a.label(q)) << "\"";
        if (a.marked(q)) os << " [peripheries=2]";
        os << ";\n";
    }
    os << "  __init -> \"" << dot_escape(a.label(a.initial())) << "\";\n";
    for (StateId q = 0; q < a.state_count(); ++q) {
        for (const Transition& t : a.out(q)) {
            os << "  \"" << dot_escape(a.label(q)) << "\" -> \""
               << dot_escape(a.label(t.target)) << "\" [label=\""
               << dot_escape(t.event.name()) << "\"";
            switch (t.event.kind()) {
            case EventKind::relabeled: os << ", style=dashed"; break;
            case EventKind::command: os << ", style=bold"; break;
            case EventKind::stop: os << ", style=dotted"; break;
            case EventKind::plain: break;
            }
            os << "];\n";
        }
    }
    os << "}\n";
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

} // namespace covsyn::io
