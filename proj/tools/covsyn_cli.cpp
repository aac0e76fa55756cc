#include "covsyn/io.hpp"
#include "covsyn/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

namespace {

using namespace covsyn;

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_input = 2;

void emit(const std::filesystem::path& dir, const std::string& name, const Automaton& a) {
    io::write_file(dir / (name + ".fsa"), io::serialize_automaton(a));
}

void write_or_print(const std::string& out, const std::string& content) {
    if (out.empty())
        std::cout << content;
    else
        io::write_file(out, content);
}

int run_synthesize(const std::string& scn_path, const std::string& out,
                   const std::string& intermediates, std::size_t max_commands) {
    Scenario sc = io::load_scenario(scn_path);

    CommandCaps caps;
    if (max_commands) {
        std::size_t k = 0;
        while ((std::size_t{1} << (k + 1)) <= max_commands) ++k;
        caps.max_controllable = std::min(caps.max_controllable, k);
    }

    SynthesisReport r;
    try {
        r = procedure2_synthesize(sc, caps);
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "The recorded observations cannot come from any safe supervisor, so "
                     "the question has no answer.\n";
        return exit_input;
    }

    if (!r.gamma_warning.empty()) std::cerr << "warning: " << r.gamma_warning << "\n";
    std::cout << "commands            " << r.gamma.size() << "\n"
              << "safe command space  " << r.ns.state_count() << " states\n"
              << "attacked space      " << r.ocnsa.state_count() << " states\n"
              << "joint behaviour     " << r.plant_under_attack.state_count() << " states, "
              << r.bad_states << " exposing\n"
              << "observer cells      " << r.engine.cells << " explored, "
              << r.engine.deleted_cells << " removed, " << r.engine.dropped_edges
              << " edges dropped\n"
              << "wall time           " << r.wall_ms << " ms\n";

    if (!intermediates.empty()) {
        std::filesystem::path dir(intermediates);
        std::filesystem::create_directories(dir);
        emit(dir, "ac", r.ac);
        emit(dir, "ce", r.ce);
        emit(dir, "cea", r.cea);
        emit(dir, "mo", r.mo.a);
        emit(dir, "ns", r.ns);
        emit(dir, "oc", r.oc);
        emit(dir, "ocnsa", r.ocnsa);
        emit(dir, "sdown", r.sdown);
        emit(dir, "sdown_a", r.sdown_a);
        emit(dir, "sdown_a_bar", r.sdown_a_bar);
        emit(dir, "plant_under_attack", r.plant_under_attack);
        if (r.attacker) emit(dir, "attacker", *r.attacker);
    }

    if (!r.attacker_exists) {
        std::cout << "verdict             no covert damage-reaching attacker exists\n";
        return exit_negative;
    }
    std::cout << "verdict             attacker with " << r.attacker->state_count()
              << " states\n";
    if (!out.empty())
        io::write_file(out, io::serialize_automaton(*r.attacker));
    else
        std::cout << io::serialize_automaton(*r.attacker);
    return exit_ok;
}

int run_verify(const std::string& scn_path, const std::string& attacker_path,
               const std::vector<std::string>& supervisor_paths, std::size_t sample,
               std::size_t depth, std::uint64_t seed) {
    Scenario sc = io::load_scenario(scn_path);
    Automaton attacker = io::load_automaton(attacker_path, &sc);

    std::vector<Automaton> sups;
    std::vector<std::string> names;
    for (const auto& p : supervisor_paths) {
        sups.push_back(io::load_automaton(p, &sc));
        names.push_back(p);
    }
    if (sample) {
        auto extra = enumerate_consistent_supervisors(sc, depth, sample, seed);
        for (std::size_t i = 0; i < extra.size(); ++i) {
            sups.push_back(std::move(extra[i]));
            names.push_back("sample-" + std::to_string(i));
        }
    }
    if (sups.empty()) {
        std::cerr << "error: no supervisors to verify against; pass files or --sample\n";
        return exit_input;
    }

    SuccessReport rep = check_successful(sc, attacker, sups);
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const SupervisorVerdict& v = rep.rows[i];
        std::cout << names[i] << ": ";
        if (!v.valid)
            std::cout << "skipped (" << v.why_invalid << ")\n";
        else
            std::cout << (v.covert ? "covert" : "DETECTED") << ", "
                      << (v.damage ? "damage reachable" : "NO DAMAGE") << "\n";
    }
    if (rep.vacuous) {
        std::cout << "verdict: vacuous, no valid supervisor among the candidates\n";
        return exit_negative;
    }
    std::cout << "verdict: " << (rep.successful ? "attacker succeeds" : "attacker fails")
              << " against every valid candidate\n";
    return rep.successful ? exit_ok : exit_negative;
}

int run_consistency(const std::string& scn_path, const std::string& sup_path) {
    Scenario sc = io::load_scenario(scn_path);
    Automaton s = io::load_automaton(sup_path, &sc);
    auto rep = validate_supervisor(sc, s);
    if (!rep.ok) {
        std::cout << "malformed: " << rep.joined() << "\n";
        return exit_negative;
    }
    bool consistent = check_consistency(sc, s);
    bool safe = check_safe(sc, s);
    std::cout << "well formed: yes\n"
              << "reproduces observations: " << (consistent ? "yes" : "no") << "\n"
              << "avoids damage: " << (safe ? "yes" : "no") << "\n";
    return consistent && safe ? exit_ok : exit_negative;
}

int run_construct(const std::string& scn_path, const std::string& stage,
                  const std::string& out) {
    Scenario sc = io::load_scenario(scn_path);
    auto gamma = build_gamma(sc);
    Automaton a;
    if (stage == "ac") {
        a = build_ac(sc, gamma);
    } else if (stage == "ce") {
        a = build_ce(sc, gamma);
    } else if (stage == "cea") {
        a = build_cea(sc, gamma);
    } else if (stage == "ns") {
        a = procedure1_ns(sc, gamma);
    } else if (stage == "ocnsa") {
        Automaton ns = procedure1_ns(sc, gamma);
        Automaton oc = build_oc(sc, build_mo(sc), gamma);
        a = build_ocnsa(sc, ns, oc).a;
    } else if (stage == "sdown-a") {
        a = build_sdown_a(sc, build_sdown(sc, build_mo(sc))).a;
    } else {
        std::cerr << "error: unknown stage '" << stage << "'\n";
        return exit_input;
    }
    write_or_print(out, io::serialize_automaton(a));
    return exit_ok;
}

int run_export_dot(const std::string& fsa_path, const std::string& scn_path,
                   const std::string& out) {
    std::optional<Scenario> sc;
    if (!scn_path.empty()) sc = io::load_scenario(scn_path);
    Automaton a = io::load_automaton(fsa_path, sc ? &*sc : nullptr);
    write_or_print(out, io::export_dot(a));
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthesis of covert sensor-actuator attackers from supervisor observations"};
    app.require_subcommand(1);

    std::string scn, out, intermediates, attacker, supervisor, stage, fsa;
    std::vector<std::string> supervisors;
    std::size_t sample = 0, depth = 3, max_commands = 0;
    std::uint64_t seed = 1;

    auto* syn = app.add_subcommand("synthesize",
                                   "Synthesize the supremal covert attacker for a scenario");
    syn->add_option("scenario", scn, "scenario file")->required();
    syn->add_option("--out", out, "write the attacker here instead of stdout");
    syn->add_option("--emit-intermediates", intermediates,
                    "directory for every intermediate automaton");
    syn->add_option("--max-commands", max_commands,
                    "refuse when the command set would exceed this size");

    auto* ver = app.add_subcommand("verify", "Check an attacker against candidate supervisors");
    ver->add_option("scenario", scn, "scenario file")->required();
    ver->add_option("attacker", attacker, "attacker automaton")->required();
    ver->add_option("supervisor", supervisors, "candidate supervisor automata");
    ver->add_option("--sample", sample, "also test this many sampled consistent supervisors");
    ver->add_option("--depth", depth, "randomize sampled command choices this deep");
    ver->add_option("--seed", seed, "seed for the supervisor sampling");

    auto* con = app.add_subcommand("consistency",
                                   "Check a supervisor against the recorded observations");
    con->add_option("scenario", scn, "scenario file")->required();
    con->add_option("supervisor", supervisor, "supervisor automaton")->required();

    auto* cst = app.add_subcommand("construct", "Build one intermediate automaton");
    cst->add_option("scenario", scn, "scenario file")->required();
    cst->add_option("--stage", stage, "ac, ce, cea, ns, ocnsa or sdown-a")->required();
    cst->add_option("--out", out, "write here instead of stdout");

    auto* dot = app.add_subcommand("export-dot", "Render an automaton file as Graphviz dot");
    dot->add_option("automaton", fsa, "automaton file")->required();
    dot->add_option("--scenario", scn, "scenario file giving the event flags");
    dot->add_option("--out", out, "write here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (syn->parsed()) return run_synthesize(scn, out, intermediates, max_commands);
        if (ver->parsed()) return run_verify(scn, attacker, supervisors, sample, depth, seed);
        if (con->parsed()) return run_consistency(scn, supervisor);
        if (cst->parsed()) return run_construct(scn, stage, out);
        if (dot->parsed()) return run_export_dot(fsa, scn, out);
    } catch (const covsyn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
