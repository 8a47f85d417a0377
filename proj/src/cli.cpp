#include "smd2cpn/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smd2cpn/cpn_emit.hpp"
#include "smd2cpn/smd_oracle.hpp"
#include "smd2cpn/smd_text.hpp"
#include "smd2cpn/translator.hpp"

namespace smd2cpn {

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

StateMachineModel load(const std::string& path) { return load_smdl(read_file(path)); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translates hierarchical state machines into coloured Petri nets", "smd2cpn"};
  app.require_subcommand(1);

  std::string input, output, dot;
  std::uint32_t capacity = 1;
  std::size_t bound = 100000;
  std::size_t depth = 8;

  auto* translate_cmd = app.add_subcommand("translate", "Translate to a CPN Tools document");
  translate_cmd->add_option("input", input, "SMDL file")->required();
  translate_cmd->add_option("-o,--output", output, "CPN Tools file to write")->required();
  translate_cmd->add_option("--dot", dot, "Graphviz file to write");
  translate_cmd->add_option("--event-capacity", capacity, "Pending tokens per event")->check(CLI::PositiveNumber);

  auto* check_cmd = app.add_subcommand("check", "Validate a state machine");
  check_cmd->add_option("input", input, "SMDL file")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Explore the generated net");
  simulate_cmd->add_option("input", input, "SMDL file")->required();
  simulate_cmd->add_option("--bound", bound, "Maximum number of markings")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--event-capacity", capacity, "Pending tokens per event")->check(CLI::PositiveNumber);

  auto* equiv_cmd = app.add_subcommand("equiv", "Compare the net with the state machine");
  equiv_cmd->add_option("input", input, "SMDL file")->required();
  equiv_cmd->add_option("--depth", depth, "Number of observable steps")->check(CLI::PositiveNumber);
  equiv_cmd->add_option("--event-capacity", capacity, "Pending tokens per event")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*check_cmd) {
      const auto report = validate(parse_smdl(read_file(input)));
      if (!report.ok()) {
        err << input << ": " << report.to_string();
        return kExitInvalidInput;
      }
      out << input << ": ok\n";
      return kExitOk;
    }

    const StateMachineModel model = load(input);
    TranslationConfig config;
    config.event_pool_capacity = capacity;

    if (*translate_cmd) {
      const auto start = std::chrono::steady_clock::now();
      auto [net, map] = translate(model, config);
      const std::string xml = emit_cpn_xml(net, layout(net));
      const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
      write_file(output, xml);
      if (!dot.empty()) write_file(dot, emit_dot(net, initial_marking(net)));
      out << "places: " << net.places.size() << '\n';
      out << "transitions: " << net.transitions.size() << '\n';
      out << "arcs: " << net.arcs.size() << '\n';
      out << "time: " << std::fixed << std::setprecision(3) << elapsed.count() << " ms\n";
      return kExitOk;
    }

    if (*simulate_cmd) {
      auto [net, map] = translate(model, config);
      const auto graph = explore(net, initial_marking(net), bound);
      std::size_t bad = 0;
      for (std::size_t i = 0; i < graph.states.size(); ++i) {
        const auto v = safety_violations(net, map, graph.states[i]);
        if (!v.empty() && bad++ == 0) {
          err << "marking " << i << " breaks 1-safety: " << v.front() << '\n';
          err << to_string(net, graph.states[i]);
        }
      }
      out << "reachable markings: " << graph.states.size() << (graph.truncated ? " (truncated)" : "") << '\n';
      out << "edges: " << graph.edges.size() << '\n';
      out << "1-safe: " << (bad == 0 ? "yes" : "no (" + std::to_string(bad) + " markings)") << '\n';
      return bad == 0 ? kExitOk : kExitViolation;
    }

    if (*equiv_cmd) {
      auto [net, map] = translate(model, config);
      EquivalenceOptions options;
      options.depth = depth;
      const auto verdict = check_trace_equivalence(model, net, map, options);
      if (verdict.equivalent) {
        out << "equivalent up to depth " << depth << " (" << verdict.pairs_explored << " state pairs)\n";
        return kExitOk;
      }
      out << verdict.to_string();
      return kExitViolation;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << input << ":" << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    err << input << ": " << e.what();
    return kExitInvalidInput;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitUsage;
}

}  // namespace smd2cpn
