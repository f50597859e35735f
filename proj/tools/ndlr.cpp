// ndlr: command-line driver for the workbench.
//
// Exit codes: 0 success / no counterexample, 1 counterexample found,
// 2 usage, parse or configuration error, 3 verdict limited by a bound.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ndlr/alpha.hpp"
#include "ndlr/diagram.hpp"
#include "ndlr/enumerate.hpp"
#include "ndlr/equiv.hpp"
#include "ndlr/parallel.hpp"
#include "ndlr/standard.hpp"
#include "ndlr/syntax.hpp"

using json = nlohmann::json;
using namespace ndlr;

namespace {

constexpr int kOk = 0, kCounterexample = 1, kUsage = 2, kBounded = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string signature;  // empty: built-in Bool + List
  std::size_t step_bound = 200;
  std::size_t size = 6;
  std::size_t depth = 6;
  std::size_t binders = 2;
  std::size_t letrec_bindings = 2;
  std::string diagram_dir = "diagrams";
  int workers = 0;
  bool records = false;
};

// Keys absent from the file keep their defaults.
void load_config(const std::string& path, Config& c) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  auto base = std::filesystem::path(path).parent_path();
  auto rel = [&](const std::string& p) { return std::filesystem::path(p).is_absolute() ? p : (base / p).string(); };
  if (j.contains("signature")) c.signature = rel(j["signature"].get<std::string>());
  if (j.contains("diagram_dir")) c.diagram_dir = rel(j["diagram_dir"].get<std::string>());
  c.step_bound = j.value("step_bound", c.step_bound);
  c.size = j.value("size", c.size);
  c.depth = j.value("depth", c.depth);
  c.binders = j.value("binders", c.binders);
  c.letrec_bindings = j.value("letrec_bindings", c.letrec_bindings);
  c.workers = j.value("workers", c.workers);
  c.records = j.value("output", std::string("text")) == "records";
  if (c.step_bound == 0 || c.size == 0 || c.depth == 0) throw UsageError("config " + path + ": bounds must be positive");
  if (!c.signature.empty() && !std::filesystem::exists(c.signature))
    throw UsageError("config " + path + ": signature file '" + c.signature + "' does not exist");
}

std::string read_input(const std::string& file, const std::string& inline_text) {
  if (!inline_text.empty()) return inline_text;
  if (file.empty() || file == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open '" + file + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Signature load_signature(const Config& c) {
  if (c.signature.empty()) return bool_list_signature();
  try {
    return Signature::from_file(c.signature);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
}

Expr parse_term(const std::string& text, const Signature& sig) {
  try {
    return parse(text, sig);
  } catch (const SyntaxError& e) {
    throw UsageError(std::string("parse error: ") + e.what());
  }
}

void print_record(const json& j) { std::cout << j.dump() << "\n"; }

json step_record(const ReductionStep& s) {
  return {{"rule", std::string(rule_name(s.redex.rule))},
          {"flag", std::string(flag_name(s.flag))},
          {"position", to_string(s.redex.pos)},
          {"group", s.redex.group},
          {"before", pretty(s.before)},
          {"after", pretty(s.after)}};
}

// --nd all: every arm of every choice, one line per leaf.
void reduce_all(const Expr& e, const Config& cfg) {
  struct Node {
    Expr term;
    std::string arms;
    std::size_t nd = 0, steps = 0;
  };
  std::vector<Node> stack{{e, "", 0, 0}};
  std::size_t leaves = 0;
  std::map<std::size_t, std::size_t> converged;
  while (!stack.empty()) {
    auto n = std::move(stack.back());
    stack.pop_back();
    std::string outcome;
    while (outcome.empty()) {
      auto sr = standard_redex(n.term);
      if (sr.kind == StandardRedex::Kind::None) {
        outcome = sr.stuck == StuckClass::Value ? "Converged" : "Stuck:" + std::string(stuck_name(sr.stuck));
        if (sr.stuck == StuckClass::Value) ++converged[n.nd];
      } else if (n.steps >= cfg.step_bound) {
        outcome = "Exhausted";
      } else if (sr.kind == StandardRedex::Kind::NdChoice) {
        for (bool left : {false, true}) {  // left arm popped first
          auto rx = sr.redex;
          rx.rule = left ? Rule::ndl : Rule::ndr;
          stack.push_back({apply(n.term, rx), n.arms + (left ? "L" : "R"), n.nd + 1, n.steps + 1});
        }
        break;
      } else {
        n.term = apply(n.term, sr.redex);
        ++n.steps;
      }
    }
    if (outcome.empty()) continue;
    ++leaves;
    if (cfg.records)
      print_record({{"leaf", n.arms}, {"result", outcome}, {"nd", n.nd}, {"steps", n.steps}, {"final", pretty(n.term)}});
    else
      std::cout << "LEAF arms=" << (n.arms.empty() ? "-" : n.arms) << " steps=" << n.steps << " RESULT " << outcome
                << " nd=" << n.nd << "\n";
  }
  if (!cfg.records) {
    std::cout << "leaves=" << leaves << " converging nd-counts:";
    for (const auto& [nd, k] : converged) std::cout << " " << nd << "(x" << k << ")";
    std::cout << "\n";
  }
}

int cmd_parse(const Config& cfg, const std::string& file, const std::string& text) {
  auto sig = load_signature(cfg);
  auto e = parse_term(read_input(file, text), sig);
  if (cfg.records)
    print_record({{"term", pretty(e)}, {"canonical", canonical(e)}, {"size", size(e)}, {"closed", is_closed(e)}});
  else
    std::cout << pretty(e) << "\n";
  return kOk;
}

int cmd_reduce(const Config& cfg, const std::string& file, const std::string& text, const std::string& nd, bool open) {
  auto sig = load_signature(cfg);
  auto e = parse_term(read_input(file, text), sig);
  if (!is_closed(e) && !open) {
    std::string names;
    for (const auto& v : free_vars(e)) names += (names.empty() ? "" : ", ") + v;
    throw UsageError("term has free variables (" + names + "); pass --open to reduce it anyway");
  }
  if (nd == "all") {
    reduce_all(e, cfg);
    return kOk;
  }
  auto r = standard_reduce(e, nd == "right" ? NdPolicy::Right : NdPolicy::Left, cfg.step_bound);
  for (const auto& s : r.trace) {
    if (cfg.records)
      print_record(step_record(s));
    else
      std::cout << format_step(s) << "\n";
  }
  if (cfg.records)
    print_record({{"result", format_result(r)}, {"final", pretty(r.final)}});
  else
    std::cout << format_result(r) << "\n";
  return r.outcome == EvalResult::Outcome::Exhausted ? kBounded : kOk;
}

int cmd_apply(const Config& cfg, const std::string& file, const std::string& text, const std::string& rule,
              const std::string& pos, const std::vector<std::string>& group) {
  auto sig = load_signature(cfg);
  auto e = parse_term(read_input(file, text), sig);
  Position p;
  try {
    p = parse_position(pos);
  } catch (const std::exception& ex) {
    throw UsageError(ex.what());
  }
  Expr result;
  Redex rx{Rule::lbeta, p, group};
  try {
    if (rule == "cp") {
      auto [out, sub] = apply_cp(e, p);
      result = out;
      rx.rule = sub;
    } else if (rule == "nd") {
      throw UsageError("pick an arm: ndl or ndr");
    } else {
      auto r = rule_from_name(rule);
      if (!r) throw UsageError("unknown rule '" + rule + "'");
      rx.rule = *r;
      // ldel and ucp name a binding; a letrec with one binding names it implicitly
      if ((rx.rule == Rule::ldel || rx.rule == Rule::ucp) && valid_position(e, p))
        if (const auto* lr = subterm(e, p).get_if<Letrec>(); lr && lr->bindings.size() == 1)
          rx.pos = extend(p, binding(lr->bindings[0].name));
      result = apply(e, rx);
    }
  } catch (const RuleError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  }
  std::string cls;
  switch (classify_step(e, rx)) {
    case StepClass::Standard: cls = "st"; break;
    case StepClass::Internal: cls = "i"; break;
    case StepClass::NotInReductionContext: cls = "neither"; break;
  }
  if (cfg.records) {
    print_record({{"rule", std::string(rule_name(rx.rule))}, {"class", cls}, {"position", to_string(p)},
                  {"result", pretty(result)}});
  } else {
    std::cout << pretty(result) << "\n" << rule_name(rx.rule) << " " << cls << "\n";
  }
  return kOk;
}

EnumParams enum_params(const Config& cfg, std::size_t size) {
  EnumParams p;
  p.sig = load_signature(cfg);
  p.max_size = size;
  p.max_binders = cfg.binders;
  p.max_letrec_bindings = cfg.letrec_bindings;
  return p;
}

int cmd_enumerate(const Config& cfg, std::size_t size, bool count_only) {
  auto p = enum_params(cfg, size);
  if (count_only) {
    std::cout << count_terms(p) << "\n";
    return kOk;
  }
  for (const auto& t : enumerate_terms(p)) {
    if (cfg.records)
      print_record({{"term", pretty(t)}, {"size", ndlr::size(t)}});
    else
      std::cout << pretty(t) << "\n";
  }
  return kOk;
}

int cmd_check_diagrams(const Config& cfg, std::string red, std::string file, std::size_t size, std::size_t depth,
                       std::string mode) {
  if (file.empty() && red.empty()) throw UsageError("need --red or --diagrams");
  if (file.empty() && mode != "propose") {
    auto ext = mode == "fork" ? ".fork" : ".commute";
    file = (std::filesystem::path(cfg.diagram_dir) / (red + ext)).string();
  }
  if (mode.empty()) {
    if (file.size() > 5 && file.substr(file.size() - 5) == ".fork") mode = "fork";
    else mode = "commute";
  }
  if (mode != "fork" && mode != "commute" && mode != "propose")
    throw UsageError("--mode must be fork, commute or propose");
  if (red.empty()) red = std::filesystem::path(file).stem().string();
  try {
    red_rules(red);
  } catch (const DiagramError& e) {
    throw UsageError(e.what());
  }

  CheckOptions opts;
  opts.depth_bound = depth;
  opts.keep_witnesses = cfg.records;
  auto terms = enumerate_terms(enum_params(cfg, size));

  if (mode == "propose") {
    // proposing commuting diagrams unless the file name says otherwise
    auto kind = file.size() > 5 && file.substr(file.size() - 5) == ".fork" ? DiagramKind::Forking
                                                                              : DiagramKind::Commuting;
    for (const auto& d : propose_diagrams(red, kind, terms, opts)) std::cout << d.text << "\n";
    return kOk;
  }

  std::vector<DiagramRule> diagrams;
  try {
    diagrams = load_diagram_file(file);
  } catch (const DiagramError& e) {
    throw UsageError(e.what());
  }
  auto kind = mode == "fork" ? DiagramKind::Forking : DiagramKind::Commuting;
  for (auto& d : diagrams) d.kind = kind;
  auto rep = verify_complete_set(red, kind, diagrams, terms, opts);

  if (cfg.records) {
    for (const auto& r : rep.records) {
      json witnesses = json::array();
      for (const auto& w : r.witnesses) {
        json steps = json::array();
        for (const auto& s : w)
          steps.push_back({{"rule", s.rule}, {"flag", s.flag}, {"position", s.position}, {"group", s.group},
                           {"before", s.before}, {"after", s.after}});
        witnesses.push_back(std::move(steps));
      }
      print_record({{"term", r.term}, {"red", r.red}, {"position", r.position}, {"diagrams", r.diagrams},
                    {"witnesses", std::move(witnesses)}});
    }
    for (const auto& c : rep.counterexamples)
      print_record({{"counterexample", c.term}, {"red", c.red}, {"position", c.position},
                    {"bound_limited", c.bound_limited}, {"transcript", c.transcript}});
  }
  std::ostream& out = cfg.records ? std::cerr : std::cout;
  out << "red=" << red << " kind=" << (kind == DiagramKind::Forking ? "fork" : "commute") << " terms=" << rep.terms_scanned
      << " instances=" << rep.instances_checked << " base_cases=" << rep.base_cases
      << " counterexamples=" << rep.counterexamples.size() << " prolongations=" << rep.prolongations_used << "\n";
  for (std::size_t i = 0; i < diagrams.size(); ++i)
    out << "  [" << i << "] " << rep.matches[i] << "  " << diagrams[i].text << "\n";
  if (!cfg.records)
    for (std::size_t i = 0; i < rep.counterexamples.size() && i < 5; ++i) out << rep.counterexamples[i].transcript;
  if (rep.verified()) return kOk;
  bool all_bounded = std::all_of(rep.counterexamples.begin(), rep.counterexamples.end(),
                                 [](const Counterexample& c) { return c.bound_limited; });
  return all_bounded ? kBounded : kCounterexample;
}

int cmd_check_equiv(const Config& cfg, const std::string& s_file, const std::string& t_file, std::size_t ctx_size,
                    bool reduction_contexts) {
  auto sig = load_signature(cfg);
  auto s = parse_term(read_input(s_file, ""), sig);
  auto t = parse_term(read_input(t_file, ""), sig);
  CtxSpec spec;
  spec.sig = sig;
  spec.max_ctx_size = ctx_size;
  spec.max_binders = cfg.binders;
  spec.max_letrec_bindings = cfg.letrec_bindings;
  spec.restrict_to = reduction_contexts ? CtxMode::ReductionContexts : CtxMode::AllContexts;
  EquivOptions opts;
  opts.limits.step_bound = cfg.step_bound;
  auto v = check_le_c(s, t, spec, opts);
  if (cfg.records) {
    json j{{"verdict", v.counterexample() ? "Counterexample" : "NoCounterexample"},
           {"contexts_checked", v.contexts_checked},
           {"exhausted", v.exhausted}};
    if (v.context) {
      j["context"] = pretty(*v.context);
      j["nd"] = v.nd;
      j["detail"] = v.detail;
    }
    print_record(j);
  } else if (v.counterexample()) {
    std::cout << "Counterexample C=" << pretty(*v.context) << " D=" << v.nd << "\n  " << v.detail << "\n";
  } else {
    std::cout << "NoCounterexample contexts=" << v.contexts_checked << (v.exhausted ? " (some contexts hit the step bound)" : "")
              << "\n";
  }
  if (v.counterexample()) return kCounterexample;
  return v.exhausted ? kBounded : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for the non-deterministic call-by-need lambda calculus with letrec"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  Config cfg;
  std::string config_path, sig_path;
  int workers = -1;
  app.add_option("--config", config_path, "JSON config (default: $NDLR_CONFIG)");
  app.add_option("--sig", sig_path, "signature file");
  app.add_option("--workers", workers, "worker threads, 0 for all cores");
  app.add_flag("--records", cfg.records, "line-delimited JSON output");

  std::string file, text;
  auto* parse_cmd = app.add_subcommand("parse", "parse and pretty-print a term");
  parse_cmd->add_option("file", file, "term file, - for stdin");
  parse_cmd->add_option("-e,--expr", text, "term text");

  std::string nd = "left";
  std::size_t max_steps = 0;
  bool open = false;
  auto* reduce_cmd = app.add_subcommand("reduce", "standard reduction trace");
  reduce_cmd->add_option("file", file, "term file, - for stdin");
  reduce_cmd->add_option("-e,--expr", text, "term text");
  reduce_cmd->add_option("--nd", nd, "arm policy for choices")->check(CLI::IsMember({"left", "right", "all"}));
  reduce_cmd->add_option("--max-steps", max_steps, "step bound");
  reduce_cmd->add_flag("--open", open, "allow free variables");

  std::string rule, pos = "ε";
  std::vector<std::string> group;
  auto* apply_cmd = app.add_subcommand("apply", "apply one rule or transformation");
  apply_cmd->add_option("file", file, "term file, - for stdin");
  apply_cmd->add_option("-e,--expr", text, "term text");
  apply_cmd->add_option("--rule", rule, "rule label")->required();
  apply_cmd->add_option("--pos", pos, "position, e.g. letB(x).appF");
  apply_cmd->add_option("--group", group, "binders dropped by ldelcyc")->delimiter(',');

  std::size_t size = 0;
  bool count_only = false;
  std::size_t binders = 0, letrec_bindings = 0;
  auto add_enum_flags = [&](CLI::App* cmd) {
    cmd->add_option("--size", size, "largest term size");
    cmd->add_option("--binders", binders, "variables in scope at once");
    cmd->add_option("--letrec-bindings", letrec_bindings, "bindings per letrec");
  };
  auto* enum_cmd = app.add_subcommand("enumerate", "list closed terms up to a size");
  add_enum_flags(enum_cmd);
  enum_cmd->add_flag("--count", count_only, "print only the number of terms");

  std::string red, diagram_file, mode;
  std::size_t depth = 0;
  auto* diag_cmd = app.add_subcommand("check-diagrams", "verify or propose a diagram set");
  diag_cmd->add_option("--red", red, "transformation, e.g. llet or cp");
  diag_cmd->add_option("--diagrams", diagram_file, "diagram file");
  diag_cmd->add_option("--mode", mode, "fork, commute or propose");
  diag_cmd->add_option("--depth", depth, "closure depth bound");
  add_enum_flags(diag_cmd);

  std::string s_file, t_file;
  std::size_t ctx_size = 5;
  bool reduction_contexts = false;
  auto* equiv_cmd = app.add_subcommand("check-equiv", "search for a context separating s from t");
  equiv_cmd->add_option("s", s_file, "term file for s")->required();
  equiv_cmd->add_option("t", t_file, "term file for t")->required();
  equiv_cmd->add_option("--ctx-size", ctx_size, "largest context size");
  equiv_cmd->add_option("--max-steps", max_steps, "step bound per branch");
  equiv_cmd->add_flag("--reduction-contexts", reduction_contexts, "only reduction contexts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (config_path.empty())
      if (const char* env = std::getenv("NDLR_CONFIG")) config_path = env;
    bool records = cfg.records;
    if (!config_path.empty()) load_config(config_path, cfg);
    cfg.records = cfg.records || records;
    if (!sig_path.empty()) {
      if (!std::filesystem::exists(sig_path)) throw UsageError("signature file '" + sig_path + "' does not exist");
      cfg.signature = sig_path;
    }
    if (workers >= 0) cfg.workers = workers;
    set_workers(cfg.workers);
    if (max_steps) cfg.step_bound = max_steps;
    if (binders) cfg.binders = binders;
    if (letrec_bindings) cfg.letrec_bindings = letrec_bindings;

    if (*parse_cmd) return cmd_parse(cfg, file, text);
    if (*reduce_cmd) return cmd_reduce(cfg, file, text, nd, open);
    if (*apply_cmd) return cmd_apply(cfg, file, text, rule, pos, group);
    if (*enum_cmd) return cmd_enumerate(cfg, size ? size : cfg.size, count_only);
    if (*diag_cmd) return cmd_check_diagrams(cfg, red, diagram_file, size ? size : cfg.size, depth ? depth : cfg.depth, mode);
    if (*equiv_cmd) return cmd_check_equiv(cfg, s_file, t_file, ctx_size, reduction_contexts);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
