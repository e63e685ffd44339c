#include "cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "riskctl/activity_graph.hpp"
#include "riskctl/codegen.hpp"
#include "riskctl/dsl.hpp"
#include "riskctl/gcl.hpp"
#include "riskctl/io_formats.hpp"
#include "riskctl/risk_space.hpp"
#include "riskctl/synthesis.hpp"

namespace fs = std::filesystem;

namespace riskctl::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::shared_ptr<spdlog::logger> logger() {
  if (auto l = spdlog::get("riskctl")) return l;
  return spdlog::stderr_color_mt("riskctl");
}

void setup_logging(bool verbose) {
  auto log = logger();
  log->set_pattern("%l: %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("RISKCTL_LOG")) level = spdlog::level::from_str(env);
  if (verbose) level = std::min(level, spdlog::level::debug);
  log->set_level(level);
}

// Maps the original single-command spellings onto subcommands.
std::vector<std::string> rewrite_legacy(std::vector<std::string> args) {
  static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> aliases{
      {"--showmodel", {{"activities", "show-activities"}, {"risk", "show-risk"}}},
      {"--synthesise", {{"controller", "synthesise"}}},
      {"--synthesize", {{"controller", "synthesise"}}},
  };
  for (const auto& [flag, values] : aliases) {
    auto it = std::find(args.begin(), args.end(), flag);
    if (it == args.end()) continue;
    if (it + 1 == args.end()) throw UsageError(flag + " needs a value");
    std::string value = *(it + 1);
    auto v = std::find_if(values.begin(), values.end(), [&](const auto& p) { return p.first == value; });
    if (v == values.end()) throw UsageError("unsupported value '" + value + "' for " + flag);
    args.erase(it, it + 2);
    args.insert(args.begin(), v->second);
  }
  return args;
}

gcl::Value parse_value(const std::string& text) {
  if (text == "true") return gcl::Value::of_bool(true);
  if (text == "false") return gcl::Value::of_bool(false);
  if (!text.empty() && text.find_first_not_of("-0123456789") == std::string::npos) {
    try {
      return gcl::Value::of_int(std::stoll(text));
    } catch (const std::exception&) {
    }
  }
  try {
    return gcl::Value::of_double(parse_double(text));
  } catch (const Error&) {
    throw UsageError("bad constant value '" + text + "'");
  }
}

// "a=1,b=0.5" (possibly given several times)
Constants parse_constants(const std::vector<std::string>& specs) {
  Constants out;
  for (const auto& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      std::size_t comma = spec.find(',', start);
      std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("expected name=value in --const, got '" + item + "'");
      out[item.substr(0, eq)] = parse_value(item.substr(eq + 1));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

bool report(const std::vector<Diagnostic>& diags) {
  bool errors = false;
  for (const auto& d : diags) {
    if (d.severity == Severity::Error) {
      errors = true;
      logger()->error("{}", d.str());
    } else {
      logger()->warn("{}", d.str());
    }
  }
  return errors;
}

Model load(const std::vector<std::string>& files) {
  std::vector<fs::path> paths(files.begin(), files.end());
  return resolve_includes(load_model_files(paths));
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_file(out, text);
    logger()->info("wrote {}", out);
  }
}

std::string show_value(double v) {
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return format_double(v);
}

struct Settings {
  std::size_t state_cap = 1'000'000;
  double epsilon = 1e-6;
  std::size_t sweep_points = 11;
};

std::string default_terminal(const Mdp& m, const std::string& requested) {
  if (requested == "none") return "";
  if (!requested.empty()) return requested;
  return m.label_index("FINAL") ? "FINAL" : "";
}

// Splits --const values between model and property constants.
std::map<std::string, gcl::Value> model_constants(const gcl::GclProgram& prog, const Constants& all) {
  std::map<std::string, gcl::Value> out;
  for (const auto& c : prog.constants)
    if (auto it = all.find(c.name); it != all.end()) out[c.name] = it->second;
  return out;
}

std::vector<Query> gather_queries(const std::vector<std::string>& inline_queries, const std::string& props_file,
                                  const Constants& given, Constants& constants) {
  std::vector<Query> out;
  PropertyFile pf;
  if (!props_file.empty()) pf = parse_properties(read_file(props_file), props_file);
  Constants for_props;
  for (const auto& c : pf.constants)
    if (auto it = given.find(c.name); it != given.end()) for_props[c.name] = it->second;
  constants = resolve_constants(pf, for_props);
  for (const auto& [name, v] : given)
    if (!constants.count(name)) constants[name] = v;
  for (const auto& q : inline_queries) out.push_back(parse_query(q));
  for (auto& q : pf.queries) out.push_back(std::move(q));
  for (const auto& c : pf.constants)
    if (!constants.count(c.name))
      logger()->debug("property constant {} is undefined; queries using it need --const {}=<value>", c.name, c.name);
  if (out.empty()) throw UsageError("no queries given (use --query or --props)");
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args) {
  CLI::App app{"Risk-informed safety controller synthesis"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  Settings settings;
  app.add_flag("--global-logging", verbose, "Verbose logging (also RISKCTL_LOG=debug|info|warn|error)");
  app.set_config("--config", "", "key=value settings file (state-cap, epsilon, sweep-points)");
  app.add_option("--state-cap", settings.state_cap, "Largest explored state space");
  app.add_option("--epsilon", settings.epsilon, "Value iteration convergence threshold");
  app.add_option("--sweep-points", settings.sweep_points, "Weights in a Pareto sweep")->check(CLI::Range(2, 100000));

  std::vector<std::string> models;
  std::string out, start, tmpl, format = "prism", decomposition = "multi-event-concurrent";

  auto* acts = app.add_subcommand("show-activities", "Activity graph as DOT");
  acts->add_option("-m,--model", models, "Model files")->required();
  acts->add_option("-o,--output", out, "DOT output (stdout when omitted)");
  acts->add_option("--start", start, "Start activity");

  auto* risk = app.add_subcommand("show-risk", "Risk state machine as DOT");
  risk->add_option("-m,--model", models, "Model files")->required();
  risk->add_option("-o,--output", out, "DOT output (stdout when omitted)");

  std::uint64_t seed = 0;
  std::size_t steps = 20;
  auto* sim = app.add_subcommand("simulate", "Random walk through the risk state machine");
  sim->add_option("-m,--model", models, "Model files")->required();
  sim->add_option("--seed", seed, "Random seed");
  sim->add_option("--steps", steps, "Number of events");

  auto* synth = app.add_subcommand("synthesise", "Generate the design-space model and property files");
  synth->alias("synthesize");
  synth->add_option("-m,--model", models, "Model files")->required();
  synth->add_option("-t,--template", tmpl, "Process model template")->required();
  synth->add_option("-o,--output", out, "Output stem")->required();
  synth->add_option("-f,--format", format, "Output format (prism)");
  synth->add_option("-d,--decomposition", decomposition, "Controller decomposition (multi-event-concurrent)");

  std::string model_file, props_file, export_dir, terminal, dot_file;
  std::vector<std::string> queries, consts;
  auto* solve = app.add_subcommand("solve", "Synthesise optimal policies on the design space");
  solve->add_option("-M,--model-file", model_file, "Guarded-command model")->required();
  solve->add_option("--query", queries, "Query text (repeatable)");
  solve->add_option("--props", props_file, "Property file");
  solve->add_option("--const", consts, "Constant values name=value[,name=value]");
  solve->add_option("--export-adv", export_dir, "Directory for adversary files");
  solve->add_option("--terminal", terminal, "Absorbing label (default FINAL when present, 'none' for deadlocks only)");
  solve->add_option("--dot", dot_file, "Write the state space as DOT");

  std::string tra, sta, lab;
  auto* check = app.add_subcommand("check-policy", "Check properties on an exported policy");
  check->add_option("--tra", tra, "Transitions file")->required();
  check->add_option("--sta", sta, "States file")->required();
  check->add_option("--lab", lab, "Labels file")->required();
  check->add_option("--props", props_file, "Property file");
  check->add_option("--query", queries, "Query text (repeatable)");
  check->add_option("--const", consts, "Constant values name=value[,name=value]");

  try {
    std::vector<std::string> args = rewrite_legacy(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  setup_logging(verbose);
  auto log = logger();

  try {
    if (acts->parsed()) {
      // Only the activity structure matters here; a partial model (one
      // activity file without its application) is fine.
      Model m = load(models);
      for (const auto& d : validate(m)) log->debug("{}", d.str());
      if (start.empty()) {
        std::string stem = fs::path(models.front()).stem().string();
        if (m.activities.count(stem)) {
          start = stem;
        } else if (!m.activities.empty()) {
          start = m.activity_order().front();
        } else {
          throw ModelError("the model declares no activities");
        }
      }
      emit(out, export_activity_dot(reachable_activities(m, start)));
      return 0;
    }
    if (risk->parsed()) {
      Model m = load(models);
      if (report(validate(m))) return 1;
      RiskSpace space(m);
      emit(out, export_risk_dot(space, space.explore(settings.state_cap)));
      return 0;
    }
    if (sim->parsed()) {
      Model m = load(models);
      if (report(validate(m))) return 1;
      RiskSpace space(m);
      std::cout << format_trace(space, space.simulate(seed, steps));
      return 0;
    }
    if (synth->parsed()) {
      if (format != "prism") throw UsageError("unsupported output format '" + format + "' (only prism)");
      if (decomposition != "multi-event-concurrent")
        throw UsageError("unsupported decomposition '" + decomposition + "' (only multi-event-concurrent)");
      Model m = load(models);
      if (report(validate(m, ValidateOptions{true}))) return 1;
      GenOptions gen;
      gen.decomposition = decomposition;
      GeneratedArtefacts a = generate(m, gen);
      report(a.diagnostics);
      check_fragments(a);
      Injected inj = inject(read_file(tmpl), a, tmpl);
      report(inj.diagnostics);
      gcl::parse_gcl(inj.text, tmpl + " (injected)");
      ArtefactPaths paths = artefact_paths(out);
      write_file(paths.model, inj.text);
      write_file(paths.design_props, a.design_props);
      write_file(paths.policy_props, a.policy_props);
      for (const auto& p : {paths.model, paths.design_props, paths.policy_props}) std::cout << p.string() << "\n";
      return 0;
    }
    if (solve->parsed()) {
      Constants given = parse_constants(consts);
      Constants constants;
      auto qs = gather_queries(queries, props_file, given, constants);
      gcl::GclProgram prog = gcl::parse_gcl(read_file(model_file), model_file);
      gcl::BuildOptions build;
      build.state_cap = settings.state_cap;
      build.constants = model_constants(prog, given);
      Mdp mdp = gcl::build_state_space(prog, build);
      log->info("{}: {} states, {} choices, {} transitions", model_file, mdp.num_states(), mdp.num_choices(),
                mdp.num_transitions());
      if (!dot_file.empty()) {
        std::vector<Diagnostic> warnings;
        write_file(dot_file, export_dot(mdp, &warnings));
        report(warnings);
      }
      SweepOptions opts;
      opts.points = settings.sweep_points;
      opts.solve.epsilon = settings.epsilon;
      opts.solve.terminal_label = default_terminal(mdp, terminal);
      std::string stem = fs::path(model_file).stem().string();
      std::size_t adv = 0;
      for (const auto& q : qs) {
        QueryResult r = solve_query(mdp, q, constants, opts);
        switch (r.kind) {
          case QueryResult::Kind::Number: std::cout << q.text << ": " << show_value(r.value) << "\n"; break;
          case QueryResult::Kind::Boolean:
            std::cout << q.text << ": " << (r.value != 0.0 ? "true" : "false") << "\n";
            break;
          case QueryResult::Kind::Pareto:
            std::cout << q.text << ":\n";
            for (const auto& p : r.points) std::cout << "  (" << show_value(p.r1) << ", " << show_value(p.r2) << ")\n";
            break;
        }
        if (export_dir.empty()) continue;
        for (const auto& w : r.witnesses) {
          fs::path base = adversary_stem(export_dir, stem, ++adv);
          export_policy(w, base);
          log->info("wrote {}.tra/.sta/.lab", base.string());
        }
      }
      return 0;
    }
    if (check->parsed()) {
      Constants given = parse_constants(consts);
      Constants constants;
      auto qs = gather_queries(queries, props_file, given, constants);
      Dtmc d = import_policy(tra, sta, lab);
      log->info("policy: {} states, {} transitions", d.num_states(), d.num_transitions());
      for (const auto& q : qs) {
        double v = check_dtmc(d, q, constants);
        std::cout << q.text << ": " << show_value(v) << "\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return 2;
  } catch (const Error& e) {
    log->error("{}", e.what());
    return 1;
  }
  return 2;
}

}  // namespace riskctl::cli
