#include "gcq/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "gcq/correspondence.hpp"
#include "gcq/session_check.hpp"

namespace gcq::cli {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A failure that the command reports as an analysis rejection.
struct Rejection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string schedule;
  std::string policy = "maximal";
  std::uint64_t seed = 0;
  std::size_t bound = 0;  // 0: the command default
  std::size_t max_states = 200000;
  std::size_t fail_steps = 12;
  std::string out_dir;
  std::string junit;
  bool json = false;
  bool explain = false;
  bool strict = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

bool use_color() {
  const char* v = std::getenv("QC_COLOR");
  if (!v) return false;
  std::string s(v);
  if (s == "always" || s == "1") return true;
  if (s == "auto") return ::isatty(STDOUT_FILENO) != 0;
  return false;
}

std::string paint(const std::string& text, bool good) {
  if (!use_color()) return text;
  return std::string(good ? "\033[32m" : "\033[31m") + text + "\033[0m";
}

Program load_program(const RunConfig& cfg) {
  ParseOptions o;
  o.allow_partial_select = !cfg.strict;
  auto text = read_file(cfg.input);
  try {
    return parse(text, o);
  } catch (const SyntaxError& e) {
    auto [line, col] = line_col(text, e.span.begin);
    std::string where = cfg.input + ":" + std::to_string(line) + ":" + std::to_string(col) + ": ";
    if (cfg.strict && e.code == "SelectNotAll") throw Rejection(where + e.code + ": " + e.what());
    throw SyntaxError(e.code, e.span, where + e.code + ": " + e.what(), e.expected);
  }
}

bool is_network_file(const std::string& path) { return fs::path(path).extension() == ".epq"; }

Network load_network(const RunConfig& cfg) {
  if (is_network_file(cfg.input)) {
    auto text = read_file(cfg.input);
    try {
      return parse_network(text);
    } catch (const EpqSyntaxError& e) {
      auto [line, col] = line_col(text, e.offset);
      throw EpqSyntaxError(e.offset, cfg.input + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                                         e.what());
    }
  }
  auto p = load_program(cfg);
  auto lin = check_linearity(p.body);
  if (!lin.ok) throw Rejection("not linear: " + lin.message);
  try {
    return epp(p.body);
  } catch (const ProjectionUndefined& e) {
    throw Rejection(std::string("projection undefined: ") + e.what());
  }
}

OraclePtr load_oracle(const RunConfig& cfg) {
  if (cfg.schedule.empty()) return std::make_shared<AllAvailable>();
  return load_schedule(read_file(cfg.schedule));
}

Policy make_policy(const RunConfig& cfg) {
  Policy p;
  p.kind = cfg.policy == "random" ? PolicyKind::Random : PolicyKind::Maximal;
  p.seed = cfg.seed;
  return p;
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Completed: return kPass;
    case Verdict::Stuck: return kRejected;
    case Verdict::Budget: return kInconclusive;
  }
  return kInconclusive;
}

void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  Program p;
  try {
    p = load_program(cfg);
  } catch (const Rejection& e) {
    if (cfg.json) {
      emit(out, {{"ok", false}, {"failures", {{{"kind", "syntax"}, {"code", "SelectNotAll"}, {"message", e.what()}}}}});
    } else {
      out << paint("rejected", false) << "\n" << e.what() << "\n";
    }
    return kRejected;
  }
  auto full = check_session(env_from_program(p), {}, p.body);
  auto lin = check_linearity(p.body);
  bool ok = full.ok() && lin.ok;

  if (cfg.json) {
    nlohmann::json j;
    j["ok"] = ok;
    j["failures"] = nlohmann::json::array();
    auto caps = cap_report_json(full.caps);
    auto session = session_report_json(full.session);
    for (auto f : caps["failures"]) {
      f["kind"] = "capability";
      j["failures"].push_back(f);
    }
    for (auto f : session["failures"]) {
      f["kind"] = "session";
      j["failures"].push_back(f);
    }
    if (!lin.ok)
      j["failures"].push_back({{"kind", "linearity"},
                               {"code", "NotLinear"},
                               {"first", lin.first},
                               {"second", lin.second},
                               {"message", lin.message}});
    emit(out, j);
    return ok ? kPass : kRejected;
  }

  out << (ok ? paint("accepted", true) : paint("rejected", false)) << "\n";
  for (const auto& f : full.caps.failures) {
    out << "capability " << f.code << ": " << f.message << "\n  at " << f.interaction << "\n";
    if (!f.subset.empty()) {
      out << "  subset J = {";
      for (std::size_t i = 0; i < f.subset.size(); ++i) out << (i ? ", " : "") << f.subset[i].str();
      out << "}\n";
    }
    if (cfg.explain && !f.sequent.empty()) out << "  sequent: " << f.sequent << "\n";
    if (cfg.explain && !f.missing.empty()) {
      out << "  missing:";
      for (const auto& m : f.missing) out << " " << m;
      out << "\n";
    }
  }
  for (const auto& f : full.session.failures)
    out << "session " << f.code << ": " << f.message << "\n  at " << f.interaction << "\n";
  if (!lin.ok) out << "linearity NotLinear: " << lin.message << "\n";
  return ok ? kPass : kRejected;
}

int cmd_run_global(const RunConfig& cfg, std::ostream& out) {
  auto p = load_program(cfg);
  auto oracle = load_oracle(cfg);
  auto t = run(make_configuration(p.body), *oracle, make_policy(cfg), cfg.bound ? cfg.bound : 1000);
  if (cfg.json) {
    nlohmann::json j;
    j["verdict"] = verdict_name(t.verdict);
    j["oracle"] = oracle->describe();
    j["steps"] = nlohmann::json::array();
    for (std::size_t i = 0; i < t.labels.size(); ++i) j["steps"].push_back(glabel_json(t.labels[i], i));
    j["final"] = pretty_print(t.final.chor);
    emit(out, j);
  } else {
    for (std::size_t i = 0; i < t.labels.size(); ++i) out << i << ": " << print_glabel(t.labels[i]) << "\n";
    out << paint(verdict_name(t.verdict), t.verdict == Verdict::Completed) << "\n";
    if (t.verdict != Verdict::Completed) out << pretty_print(t.final.chor) << "\n";
  }
  return verdict_code(t.verdict);
}

int cmd_run_net(const RunConfig& cfg, std::ostream& out) {
  auto n = load_network(cfg);
  auto oracle = load_oracle(cfg);
  auto t = net_run(n, *oracle, make_policy(cfg), cfg.bound ? cfg.bound : 5000);
  if (cfg.json) {
    nlohmann::json j;
    j["verdict"] = verdict_name(t.verdict);
    j["oracle"] = oracle->describe();
    j["steps"] = nlohmann::json::array();
    for (std::size_t i = 0; i < t.labels.size(); ++i) j["steps"].push_back(elabel_json(t.labels[i], i));
    j["final"] = print_network(t.final);
    emit(out, j);
  } else {
    for (std::size_t i = 0; i < t.labels.size(); ++i) out << i << ": " << print_elabel(t.labels[i]) << "\n";
    out << paint(verdict_name(t.verdict), t.verdict == Verdict::Completed) << "\n";
    if (t.verdict != Verdict::Completed) out << print_network(t.final);
  }
  return verdict_code(t.verdict);
}

std::string file_for(const Component& c) {
  if (c.proc->is_replicated()) {
    const auto& a = std::get<Proc::Accept>(c.proc->node);
    return a.service.str() + "." + a.role.str() + ".epq";
  }
  return c.thread.str() + ".epq";
}

int cmd_project(const RunConfig& cfg, std::ostream& out) {
  auto n = load_network(cfg);
  auto manifest = network_manifest(n);
  if (!cfg.out_dir.empty()) {
    fs::path dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string());
    for (const auto& c : n.components) write_file(dir / file_for(c), print_proc_pretty(c.proc) + "\n");
    write_file(dir / "network.epq", print_network(n));
    manifest["network"] = "network.epq";
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }
  if (cfg.json) {
    emit(out, manifest);
  } else if (cfg.out_dir.empty()) {
    out << print_network(n);
  } else {
    out << "wrote " << n.components.size() << " processes to " << cfg.out_dir << "\n";
  }
  return kPass;
}

int cmd_cosim(const RunConfig& cfg, std::ostream& out) {
  auto p = load_program(cfg);
  auto lin = check_linearity(p.body);
  if (!lin.ok) throw Rejection("not linear: " + lin.message);
  CosimOptions o;
  if (cfg.bound) o.bound = cfg.bound;
  o.max_states = cfg.max_states;
  CosimReport r;
  try {
    r = cosimulate(p.body, o);
  } catch (const ProjectionUndefined& e) {
    throw Rejection(std::string("projection undefined: ") + e.what());
  }
  if (!cfg.junit.empty()) write_file(cfg.junit, cosim_junit(r, fs::path(cfg.input).stem().string()));
  if (cfg.json) {
    emit(out, cosim_json(r));
  } else {
    out << paint(cosim_verdict_name(r.verdict), r.verdict == CosimVerdict::Pass) << " (" << r.states << " states, "
        << r.global_steps << " global steps, " << r.endpoint_steps << " endpoint steps)\n";
    for (const auto& c : r.counterexamples) {
      out << c.direction << ": " << c.message << "\n";
      for (const auto& g : c.global_trace) out << "  global   " << print_glabel(g) << "\n";
      for (const auto& e : c.endpoint_trace) out << "  endpoint " << print_elabel(e) << "\n";
    }
  }
  switch (r.verdict) {
    case CosimVerdict::Pass: return kPass;
    case CosimVerdict::CounterexampleFound: return kRejected;
    case CosimVerdict::BudgetExceeded: return kInconclusive;
  }
  return kInconclusive;
}

int cmd_availability(const RunConfig& cfg, std::ostream& out) {
  auto n = load_network(cfg);
  std::vector<OraclePtr> family;
  if (cfg.schedule.empty())
    family = single_failure_family(net_threads(n), cfg.fail_steps);
  else
    family = {load_oracle(cfg)};
  auto r = availability_check(n, family, cfg.bound ? cfg.bound : 128, cfg.max_states);
  if (!cfg.junit.empty()) write_file(cfg.junit, availability_junit(r, fs::path(cfg.input).stem().string()));
  if (cfg.json) {
    emit(out, availability_json(r));
  } else {
    out << paint(availability_verdict_name(r.verdict), r.verdict == AvailabilityVerdict::Pass) << " (" << r.oracles
        << " oracles, " << r.states << " states)\n";
    if (r.verdict == AvailabilityVerdict::StuckNetworkFound) {
      out << "oracle: " << r.oracle << "\n";
      for (const auto& l : r.trace) out << "  " << print_elabel(l) << "\n";
      out << r.stuck_network;
    }
  }
  switch (r.verdict) {
    case AvailabilityVerdict::Pass: return kPass;
    case AvailabilityVerdict::StuckNetworkFound: return kRejected;
    case AvailabilityVerdict::BudgetExceeded: return kInconclusive;
  }
  return kInconclusive;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checker, projector and simulator for quality-annotated choreographies", "gcq"};
  app.require_subcommand(1, 1);
  RunConfig cfg;

  auto input = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("input", cfg.input, what)->required();
  };
  auto json = [&](CLI::App* sub) { sub->add_flag("--json", cfg.json, "Print a JSON report"); };
  auto strict = [&](CLI::App* sub) {
    sub->add_flag("--strict", cfg.strict, "Reject partial-quality selections at parse time");
  };
  auto runner = [&](CLI::App* sub) {
    sub->add_option("--schedule", cfg.schedule, "Availability schedule (JSON)");
    sub->add_option("--seed", cfg.seed, "Seed for the random policy");
    sub->add_option("--policy", cfg.policy, "Transition choice")->check(CLI::IsMember({"maximal", "random"}));
    sub->add_option("--bound", cfg.bound, "Maximum number of steps")->check(CLI::PositiveNumber);
  };

  auto* check = app.add_subcommand("check", "Capability, session and linearity checks");
  input(check, "Program (.gcq)");
  json(check);
  strict(check);
  check->add_flag("--explain", cfg.explain, "Show failing sequents");

  auto* run_global = app.add_subcommand("run-global", "Run the global semantics");
  input(run_global, "Program (.gcq)");
  json(run_global);
  strict(run_global);
  runner(run_global);

  auto* project = app.add_subcommand("project", "Endpoint projection");
  input(project, "Program (.gcq)");
  json(project);
  strict(project);
  project->add_option("--out", cfg.out_dir, "Directory for one .epq file per process and manifest.json");

  auto* run_net = app.add_subcommand("run-net", "Run the projected network");
  input(run_net, "Program (.gcq) or network (.epq)");
  json(run_net);
  strict(run_net);
  runner(run_net);

  auto* cosim = app.add_subcommand("cosim", "Bounded check that the projection matches the choreography");
  input(cosim, "Program (.gcq)");
  json(cosim);
  strict(cosim);
  cosim->add_option("--bound", cfg.bound, "Global depth (default 32)")->check(CLI::PositiveNumber);
  cosim->add_option("--max-states", cfg.max_states, "State budget")->check(CLI::PositiveNumber);
  cosim->add_option("--junit", cfg.junit, "Write a JUnit XML report");

  auto* avail = app.add_subcommand("availability", "Search for stuck networks under single-failure oracles");
  input(avail, "Program (.gcq) or network (.epq)");
  json(avail);
  strict(avail);
  avail->add_option("--bound", cfg.bound, "Endpoint step bound (default 128)")->check(CLI::PositiveNumber);
  avail->add_option("--max-states", cfg.max_states, "State budget")->check(CLI::PositiveNumber);
  avail->add_option("--fail-steps", cfg.fail_steps, "Failure start steps per thread (default 12)")
      ->check(CLI::PositiveNumber);
  avail->add_option("--schedule", cfg.schedule, "Use this schedule instead of the single-failure family");
  avail->add_option("--junit", cfg.junit, "Write a JUnit XML report");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (check->parsed()) return cmd_check(cfg, out);
    if (run_global->parsed()) return cmd_run_global(cfg, out);
    if (project->parsed()) return cmd_project(cfg, out);
    if (run_net->parsed()) return cmd_run_net(cfg, out);
    if (cosim->parsed()) return cmd_cosim(cfg, out);
    if (avail->parsed()) return cmd_availability(cfg, out);
  } catch (const Rejection& e) {
    if (cfg.json)
      emit(out, {{"ok", false}, {"error", e.what()}});
    else
      out << paint("rejected", false) << "\n" << e.what() << "\n";
    return kRejected;
  } catch (const IoError& e) {
    err << "gcq: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const EpqSyntaxError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const ScheduleError& e) {
    err << "gcq: schedule: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "gcq: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace gcq::cli
