#pragma once

#include "covsyn/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace covsyn::io {

struct ParseError : Error {
    ParseError(const std::string& source, std::size_t line, const std::string& what);
};

// Automaton text format, one directive per line:
//   alphabet <event>...      (may repeat)
//   states <name>...         (may repeat)
//   init <name>
//   marked [<name>...]       (optional; absent means every state is marked)
//   trans <src> <event> <dst>
// Any token starting with '#' begins a comment that runs to the end of the
// line. Event tokens: plain names, relabeled copies spelled name#, commands
// spelled cmd{a,b,...}, and stop. With a scenario the plain names must be
// declared events and carry its flags; without one they default to
// uncontrollable and observable.
Automaton parse_automaton(std::string_view text, const std::string& source = "<string>",
                          const Scenario* context = nullptr);
Automaton load_automaton(const std::filesystem::path& path,
                         const Scenario* context = nullptr);

// Canonical form: states sorted by label, one sorted line per directive,
// marked line omitted when every state is marked. Parsing it back gives an
// automaton serializing to the same text.
std::string serialize_automaton(const Automaton& a);

// Scenario text format, in order:
//   [events]        one event per line: <name> obs|unobs ctl|unc
//                   [compromised] [attackable]
//   [plant] <path>  automaton file, relative paths resolve against the
//                   scenario file's directory
//   [damage] <state>...
//   [observations]  one observation string per line until end of file; the
//                   empty string is implicit
// Controllable events must be observable, compromised events observable,
// attackable events controllable; the plant must deadlock at every damage
// state. Violations are load errors.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text, const std::string& source,
                        const std::filesystem::path& base_dir);

// plant_ref is written into the [plant] section verbatim.
std::string serialize_scenario(const Scenario& sc, const std::string& plant_ref);

// Graphviz dot, deterministic output. Marked states get a double border,
// relabeled events dashed edges, commands bold edges, stop dotted edges.
std::string export_dot(const Automaton& a);

// Writes content whole; builds the string first so no partial file appears
// on error paths before the write begins.
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace covsyn::io
