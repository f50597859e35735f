#include "ndlr/diagram.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ndlr/alpha.hpp"
#include "ndlr/contexts.hpp"
#include "ndlr/syntax.hpp"

namespace ndlr {

// ---------------------------------------------------------------------------
// DSL

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

SeqAtom parse_atom(std::string text) {
  text = trim(text);
  if (text.empty()) throw DiagramError("empty atom");
  SeqAtom a;
  switch (text.back()) {
    case '+': a.mult = Mult::Plus; break;
    case '*': a.mult = Mult::Star; break;
    case '?': a.mult = Mult::Opt; break;
    default: break;
  }
  if (a.mult != Mult::One) text = trim(text.substr(0, text.size() - 1));
  if (!text.empty() && (text.back() == '+' || text.back() == '*' || text.back() == '?'))
    throw DiagramError("atom '" + text + "' has more than one multiplicity");
  std::string rule = text;
  if (auto comma = text.find(','); comma != std::string::npos) {
    auto flag = trim(text.substr(0, comma));
    rule = trim(text.substr(comma + 1));
    if (flag == "st") a.flag = AtomFlag::St;
    else if (flag == "i") a.flag = AtomFlag::I;
    else if (flag == "either") a.flag = AtomFlag::Either;
    else if (flag == "plain") a.flag = AtomFlag::Plain;
    else throw DiagramError("unknown flag '" + flag + "' in atom '" + text + "'");
  }
  if (!is_ident(rule)) throw DiagramError("malformed atom '" + text + "'");
  a.name = rule;
  if (auto labels = resolve_label(rule)) {
    a.allowed = *labels;
  } else {
    // metavariables are single letters; anything longer is a misspelt label
    if (rule.size() != 1) throw DiagramError("unknown rule or family '" + rule + "'");
    a.metavar = true;
    a.allowed = base_rules();
  }
  return a;
}

std::vector<SeqAtom> parse_seq(const std::string& text) {
  std::vector<SeqAtom> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    auto dot = text.find(" . ", start);
    out.push_back(parse_atom(text.substr(start, dot == std::string::npos ? std::string::npos : dot - start)));
    if (dot == std::string::npos) break;
    start = dot + 3;
  }
  return out;
}

}  // namespace

DiagramRule parse_diagram(const std::string& line, std::optional<DiagramKind> kind) {
  DiagramRule d;
  d.text = trim(line);
  std::string body = d.text;
  std::string constraint;
  if (auto bar = body.find('|'); bar != std::string::npos) {
    constraint = trim(body.substr(bar + 1));
    body = body.substr(0, bar);
  }
  auto arrow = body.find("~>");
  if (arrow == std::string::npos) throw DiagramError("missing '~>'");
  d.lhs = parse_seq(body.substr(0, arrow));
  d.rhs = parse_seq(body.substr(arrow + 2));
  if (d.lhs.empty()) throw DiagramError("empty left-hand side");
  if (d.rhs.empty()) throw DiagramError("empty right-hand side");
  for (const auto& r : d.rhs)
    if (r.metavar && std::none_of(d.lhs.begin(), d.lhs.end(), [&](const SeqAtom& l) { return l.name == r.name; }))
      throw DiagramError("metavariable '" + r.name + "' does not occur on the left");
  d.kind = kind ? *kind : (d.lhs.front().flag == AtomFlag::St ? DiagramKind::Forking : DiagramKind::Commuting);

  const auto& red = d.red_atom();
  if (red.flag == AtomFlag::St) throw DiagramError("the transformation step cannot be standard");
  if (red.mult != Mult::One) throw DiagramError("the transformation step cannot carry a multiplicity");
  auto st_part_ok = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i)
      if (d.lhs[i].flag != AtomFlag::St) return false;
    return true;
  };
  if (d.kind == DiagramKind::Commuting && !st_part_ok(1, d.lhs.size()))
    throw DiagramError("commuting left-hand side must be the transformation followed by st atoms");
  if (d.kind == DiagramKind::Forking && !st_part_ok(0, d.lhs.size() - 1))
    throw DiagramError("forking left-hand side must be st atoms followed by the transformation");

  if (!constraint.empty()) {
    // `a in {case, cpn}`; several constraints separated by ';'
    std::stringstream parts(constraint);
    std::string part;
    while (std::getline(parts, part, ';')) {
      part = trim(part);
      auto in = part.find(" in ");
      auto open = part.find('{');
      auto close = part.find('}');
      if (in == std::string::npos || open == std::string::npos || close == std::string::npos || close < open)
        throw DiagramError("malformed constraint '" + part + "'");
      auto var = trim(part.substr(0, in));
      std::vector<Rule> allowed;
      std::stringstream items(part.substr(open + 1, close - open - 1));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        auto labels = resolve_label(item);
        if (!labels) throw DiagramError("unknown label '" + item + "' in constraint");
        for (auto r : *labels)
          if (std::find(allowed.begin(), allowed.end(), r) == allowed.end()) allowed.push_back(r);
      }
      bool used = false;
      for (auto* seq : {&d.lhs, &d.rhs})
        for (auto& a : *seq)
          if (a.metavar && a.name == var) {
            a.allowed = allowed;
            used = true;
          }
      if (!used) throw DiagramError("constraint on unknown metavariable '" + var + "'");
    }
  }
  return d;
}

std::vector<DiagramRule> parse_diagram_set(const std::string& text, std::optional<DiagramKind> kind) {
  std::vector<DiagramRule> out;
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_diagram(line, kind));
    } catch (const DiagramError& e) {
      throw DiagramError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<DiagramRule> load_diagram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DiagramError("cannot open diagram file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::optional<DiagramKind> kind;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".fork") kind = DiagramKind::Forking;
  if (path.size() > 8 && path.substr(path.size() - 8) == ".commute") kind = DiagramKind::Commuting;
  try {
    return parse_diagram_set(buf.str(), kind);
  } catch (const DiagramError& e) {
    throw DiagramError(path + ": " + e.what());
  }
}

std::string to_string(const SeqAtom& a) {
  std::string out;
  switch (a.flag) {
    case AtomFlag::St: out = "st,"; break;
    case AtomFlag::I: out = "i,"; break;
    case AtomFlag::Either: out = "either,"; break;
    case AtomFlag::Plain: break;
  }
  out += a.name;
  switch (a.mult) {
    case Mult::Plus: out += '+'; break;
    case Mult::Star: out += '*'; break;
    case Mult::Opt: out += '?'; break;
    case Mult::One: break;
  }
  return out;
}

std::string to_string(const DiagramRule& d) {
  auto seq = [](const std::vector<SeqAtom>& atoms) {
    std::string out;
    for (std::size_t i = 0; i < atoms.size(); ++i) out += (i ? " . " : "") + to_string(atoms[i]);
    return out;
  };
  std::string out = seq(d.lhs) + " ~> " + seq(d.rhs);
  std::map<std::string, std::vector<Rule>> constrained;
  for (const auto* s : {&d.lhs, &d.rhs})
    for (const auto& a : *s)
      if (a.metavar && a.allowed != base_rules()) constrained[a.name] = a.allowed;
  std::string sep = " | ";
  for (const auto& [name, allowed] : constrained) {
    out += sep + name + " in {";
    for (std::size_t i = 0; i < allowed.size(); ++i) out += (i ? "," : "") + std::string(rule_name(allowed[i]));
    out += "}";
    sep = "; ";
  }
  return out;
}

std::vector<Rule> red_rules(const std::string& red) {
  if (red == "cp") return {Rule::cpt, Rule::cpd};
  if (auto labels = resolve_label(red)) return *labels;
  throw DiagramError("unknown transformation '" + red + "'");
}

// ---------------------------------------------------------------------------
// Step classification with the per-term work done once

namespace {

struct TermView {
  Expr term;
  StandardRedex sr;
  std::vector<std::string> chain;
  bool top_letrec = false;

  explicit TermView(Expr e) : term(std::move(e)) {
    sr = standard_redex(term);
    chain = demand_chain(term);
    top_letrec = term.is<Letrec>();
  }

  bool in_reduction_context(const Position& p) const {
    auto weak = [&](std::size_t from) {
      for (std::size_t i = from; i < p.size(); ++i)
        if (p[i].sel != Sel::AppFun && p[i].sel != Sel::Scrutinee) return false;
      return true;
    };
    if (weak(0)) return true;
    if (!top_letrec || !weak(1)) return false;
    if (p[0].sel == Sel::LetBody) return true;
    return p[0].sel == Sel::Binding && std::find(chain.begin(), chain.end(), p[0].binder) != chain.end();
  }

  bool standard(const Redex& r) const {
    switch (sr.kind) {
      case StandardRedex::Kind::None: return false;
      case StandardRedex::Kind::NdChoice:
        return (r.rule == Rule::ndl || r.rule == Rule::ndr) && r.pos == sr.redex.pos;
      case StandardRedex::Kind::Deterministic:
        if (r.pos != sr.redex.pos) return false;
        return r.rule == sr.redex.rule ||
               (sr.redex.rule == Rule::cpn && (r.rule == Rule::cpt || r.rule == Rule::cpd));
    }
    return false;
  }

  StepFlag flag(const Redex& r) const {
    if (standard(r)) return StepFlag::Standard;
    if (in_reduction_context(redex_root(term, r))) return StepFlag::Internal;
    return StepFlag::Plain;
  }

  std::vector<ReductionStep> standard_steps() const {
    std::vector<ReductionStep> out;
    if (sr.kind == StandardRedex::Kind::None) return out;
    if (sr.kind == StandardRedex::Kind::Deterministic) {
      out.push_back({sr.redex, StepFlag::Standard, term, apply(term, sr.redex)});
      return out;
    }
    for (auto rule : {Rule::ndl, Rule::ndr}) {
      Redex rx{rule, sr.redex.pos, {}};
      out.push_back({rx, StepFlag::Standard, term, apply(term, rx)});
    }
    return out;
  }
};

bool flag_ok(AtomFlag want, StepFlag got) {
  switch (want) {
    case AtomFlag::St: return got == StepFlag::Standard;
    case AtomFlag::I: return got == StepFlag::Internal;
    case AtomFlag::Either: return got != StepFlag::Plain;
    case AtomFlag::Plain: return true;
  }
  return false;
}

std::size_t max_count(Mult m, std::size_t cap) {
  return (m == Mult::One || m == Mult::Opt) ? 1 : cap;
}
bool may_stop(Mult m, std::size_t count) {
  switch (m) {
    case Mult::One: return count == 1;
    case Mult::Plus: return count >= 1;
    case Mult::Star:
    case Mult::Opt: return true;
  }
  return false;
}

// Binds `rule` for the atom; false if the atom cannot stand for it.
bool bind(const SeqAtom& a, Rule rule, Bindings& b) {
  if (std::find(a.allowed.begin(), a.allowed.end(), rule) == a.allowed.end()) return false;
  if (!a.metavar) return true;
  auto it = b.find(a.name);
  if (it == b.end()) {
    b.emplace(a.name, rule);
    return true;
  }
  return it->second == rule;
}

bool compatible(const Bindings& a, const Bindings& b) {
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end() && it->second != v) return false;
  }
  return true;
}

// All bindings under which `atoms` match the labelled steps exactly.
void match_steps(const std::vector<SeqAtom>& atoms, std::size_t ai, std::size_t count,
                 const std::vector<std::pair<Rule, StepFlag>>& steps, std::size_t si, Bindings b,
                 std::vector<Bindings>& out) {
  if (ai == atoms.size()) {
    if (si == steps.size()) out.push_back(b);
    return;
  }
  const auto& a = atoms[ai];
  if (may_stop(a.mult, count)) match_steps(atoms, ai + 1, 0, steps, si, b, out);
  if (si < steps.size() && count < max_count(a.mult, steps.size()) && flag_ok(a.flag, steps[si].second)) {
    Bindings nb = b;
    if (bind(a, steps[si].first, nb)) match_steps(atoms, ai, count + 1, steps, si + 1, nb, out);
  }
}

std::vector<Bindings> match_steps(const std::vector<SeqAtom>& atoms,
                                  const std::vector<std::pair<Rule, StepFlag>>& steps, const Bindings& seed) {
  std::vector<Bindings> out;
  match_steps(atoms, 0, 0, steps, 0, seed, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Endpoint {
  std::string key;
  Bindings bindings;
  std::vector<ReductionStep> steps;
};

struct SearchResult {
  std::vector<Endpoint> ends;
  bool limited = false;
};

// Every way to realise `atoms` as a step sequence from `start`.
SearchResult search(const Expr& start, const std::vector<SeqAtom>& atoms, const Bindings& seed,
                    const CheckOptions& opts) {
  SearchResult res;
  struct State {
    Expr term;
    std::size_t atom, count;
    Bindings b;
    std::vector<ReductionStep> steps;
  };
  std::vector<State> stack{{start, 0, 0, seed, {}}};
  std::set<std::string> seen;
  std::set<std::pair<std::string, Bindings>> emitted;
  std::size_t nodes = 0;
  while (!stack.empty()) {
    auto st = std::move(stack.back());
    stack.pop_back();
    auto key = canonical(st.term);
    std::string state_key = key + "|" + std::to_string(st.atom) + "|" + std::to_string(st.count) + "|" +
                            std::to_string(st.steps.size());
    for (const auto& [k, v] : st.b) state_key += "|" + k + "=" + std::string(rule_name(v));
    if (!seen.insert(state_key).second) continue;
    if (++nodes > opts.search_nodes) {
      res.limited = true;
      break;
    }
    if (st.atom == atoms.size()) {
      if (emitted.insert({key, st.b}).second) res.ends.push_back({key, st.b, st.steps});
      continue;
    }
    const auto& a = atoms[st.atom];
    if (may_stop(a.mult, st.count)) stack.push_back({st.term, st.atom + 1, 0, st.b, st.steps});
    if (st.count >= max_count(a.mult, opts.depth_bound) || st.steps.size() >= opts.depth_bound) {
      if (st.steps.size() >= opts.depth_bound && st.count < max_count(a.mult, opts.depth_bound))
        res.limited = true;
      continue;
    }
    TermView view(st.term);
    std::vector<ReductionStep> candidates;
    if (a.flag == AtomFlag::St) {
      candidates = view.standard_steps();
    } else {
      for (const auto& rx : find_redexes(st.term, a.allowed)) {
        auto f = view.flag(rx);
        if (!flag_ok(a.flag, f)) continue;
        candidates.push_back({rx, f, st.term, apply(st.term, rx)});
      }
    }
    for (auto& c : candidates) {
      Bindings nb = st.b;
      if (!bind(a, c.redex.rule, nb)) continue;
      auto steps = st.steps;
      auto next = c.after;
      steps.push_back(std::move(c));
      stack.push_back({next, st.atom, st.count + 1, std::move(nb), std::move(steps)});
    }
  }
  return res;
}

std::vector<std::pair<Rule, StepFlag>> labels_of(const std::vector<ReductionStep>& steps) {
  std::vector<std::pair<Rule, StepFlag>> out;
  for (const auto& s : steps) out.emplace_back(s.redex.rule, s.flag);
  return out;
}

std::string describe(const std::vector<ReductionStep>& steps) {
  std::string out;
  for (const auto& s : steps) out += "    " + format_step(s) + "\n";
  return out;
}

struct Attempt {
  bool matched = false;
  bool limited = false;
  std::vector<ReductionStep> witness;
};

// Commuting: s -red-> u -st-> ... -st-> target along `path`.
Attempt try_commute(const DiagramRule& d, const Expr& s, const ReductionStep& red,
                    const std::vector<ReductionStep>& path, const std::string& target_key,
                    const CheckOptions& opts) {
  Attempt out;
  Bindings seed;
  if (!flag_ok(d.lhs.front().flag, red.flag) || !bind(d.lhs.front(), red.redex.rule, seed)) return out;
  std::vector<SeqAtom> st_part(d.lhs.begin() + 1, d.lhs.end());
  for (const auto& b : match_steps(st_part, labels_of(path), seed)) {
    auto found = search(s, d.rhs, b, opts);
    out.limited = out.limited || found.limited;
    for (auto& end : found.ends)
      if (end.key == target_key) {
        out.matched = true;
        out.witness = std::move(end.steps);
        return out;
      }
  }
  return out;
}

// Forking: u -st-> ... -st-> s along `path`, u -red-> t.
Attempt try_fork(const DiagramRule& d, const Expr& s, const ReductionStep& red, const Expr& t,
                 const std::vector<ReductionStep>& path, const CheckOptions& opts) {
  Attempt out;
  Bindings seed;
  if (!flag_ok(d.lhs.back().flag, red.flag) || !bind(d.lhs.back(), red.redex.rule, seed)) return out;
  std::vector<SeqAtom> st_part(d.lhs.rbegin() + 1, d.lhs.rend());  // nearest the peak first
  auto split = std::find_if(d.rhs.begin(), d.rhs.end(), [](const SeqAtom& a) { return a.flag == AtomFlag::St; });
  std::vector<SeqAtom> from_s(d.rhs.begin(), split);
  std::vector<SeqAtom> from_t(d.rhs.rbegin(), std::make_reverse_iterator(split));
  for (const auto& b : match_steps(st_part, labels_of(path), seed)) {
    auto left = search(s, from_s, b, opts);
    auto right = search(t, from_t, b, opts);
    out.limited = out.limited || left.limited || right.limited;
    for (auto& l : left.ends)
      for (auto& r : right.ends)
        if (l.key == r.key && compatible(l.bindings, r.bindings)) {
          out.matched = true;
          out.witness = std::move(l.steps);
          out.witness.insert(out.witness.end(), r.steps.begin(), r.steps.end());
          return out;
        }
  }
  return out;
}

// Walks the standard reduction tree from `root`, cutting branches where `attempt`
// succeeds; every branch must be cut for the instance to close.
template <class TryFn>
CloseResult close_over_paths(const Expr& root, bool allow_empty, const CheckOptions& opts,
                             const std::vector<DiagramRule>& diagrams, TryFn&& attempt) {
  CloseResult res;
  struct Node {
    Expr term;
    std::vector<ReductionStep> path;
  };
  std::vector<Node> stack{{root, {}}};
  while (!stack.empty()) {
    auto node = std::move(stack.back());
    stack.pop_back();
    bool limited = false;
    if (!node.path.empty() || allow_empty) {
      for (std::size_t i = 0; i < diagrams.size(); ++i) {
        auto a = attempt(diagrams[i], node.term, node.path);
        limited = limited || a.limited;
        if (a.matched) {
          res.diagram_per_branch.push_back(static_cast<int>(i));
          res.longest_prefix = std::max(res.longest_prefix, node.path.size());
          if (opts.keep_witnesses) {
            auto w = node.path;
            w.insert(w.end(), a.witness.begin(), a.witness.end());
            res.witnesses.push_back(std::move(w));
          }
          goto next_node;
        }
      }
    }
    {
      TermView view(node.term);
      auto succ = view.standard_steps();
      if (succ.empty() || node.path.size() >= opts.depth_bound) {
        if (succ.empty() && node.path.empty()) continue;  // nothing to close
        res.diagram_per_branch.push_back(-1);
        res.bound_limited = res.bound_limited || !succ.empty() || limited;
        res.transcript += "  unmatched standard branch" +
                          std::string(succ.empty() ? " (no further standard step)" : " (depth bound reached)") +
                          ":\n" + describe(node.path);
        continue;
      }
      // right arm pushed first so the left arm is explored first
      for (auto it = succ.rbegin(); it != succ.rend(); ++it) {
        auto path = node.path;
        auto next = it->after;
        path.push_back(*it);
        stack.push_back({next, std::move(path)});
      }
    }
  next_node:;
  }
  res.closed = std::find(res.diagram_per_branch.begin(), res.diagram_per_branch.end(), -1) ==
               res.diagram_per_branch.end();
  return res;
}

template <class Instance>
std::vector<Instance> internal_instances(const Expr& e, const std::vector<Rule>& red) {
  std::vector<Instance> out;
  TermView view(e);
  for (const auto& rx : find_redexes(e, red))
    if (view.flag(rx) == StepFlag::Internal) out.push_back({e, rx, apply(e, rx)});
  return out;
}

}  // namespace

std::vector<ForkInstance> find_forks(const Expr& e, const std::vector<Rule>& red) {
  auto out = internal_instances<ForkInstance>(e, red);
  if (standard_redex(e).kind == StandardRedex::Kind::None) out.clear();
  return out;
}

std::vector<CommuteInstance> find_commutes(const Expr& e, const std::vector<Rule>& red) {
  return internal_instances<CommuteInstance>(e, red);
}

CloseResult close_fork(const ForkInstance& f, const std::vector<DiagramRule>& diagrams, const CheckOptions& opts) {
  ReductionStep red{f.red, StepFlag::Internal, f.source, f.red_result};
  auto res = close_over_paths(f.source, false, opts, diagrams,
                              [&](const DiagramRule& d, const Expr& s, const std::vector<ReductionStep>& path) {
                                if (d.kind != DiagramKind::Forking) return Attempt{};
                                return try_fork(d, s, red, f.red_result, path, opts);
                              });
  if (!res.closed)
    res.transcript = "fork at " + pretty(f.source) + "\n  " + format_step(red) + "\n" + res.transcript;
  return res;
}

namespace {

CloseResult close_commute(const CommuteInstance& c, const std::vector<DiagramRule>& diagrams,
                          const CheckOptions& opts) {
  ReductionStep red{c.red, StepFlag::Internal, c.source, c.red_result};
  auto res = close_over_paths(c.red_result, true, opts, diagrams,
                              [&](const DiagramRule& d, const Expr& end, const std::vector<ReductionStep>& path) {
                                if (d.kind != DiagramKind::Commuting) return Attempt{};
                                return try_commute(d, c.source, red, path, canonical(end), opts);
                              });
  if (!res.closed)
    res.transcript = "commute from " + pretty(c.source) + "\n  " + format_step(red) + "\n" + res.transcript;
  return res;
}

}  // namespace

CloseResult check_commuting(const CommuteInstance& c, const std::vector<DiagramRule>& diagrams,
                            const CheckOptions& opts) {
  return close_commute(c, diagrams, opts);
}

// ---------------------------------------------------------------------------
// Complete-set verification

namespace {

struct TermOutcome {
  std::size_t instances = 0;
  std::size_t base_cases = 0;
  std::size_t prolonged = 0;
  std::vector<std::size_t> matches;
  std::vector<Counterexample> counterexamples;
  std::vector<InstanceRecord> records;
};

template <class Instance>
void record(TermOutcome& out, const Instance& inst, const CloseResult& r, std::size_t n_diagrams,
            const CheckOptions& opts) {
  ++out.instances;
  if (out.matches.size() < n_diagrams) out.matches.resize(n_diagrams);
  if (r.diagram_per_branch.empty()) {
    ++out.base_cases;
    --out.instances;
    return;
  }
  for (int d : r.diagram_per_branch)
    if (d >= 0) ++out.matches[static_cast<std::size_t>(d)];
  if (r.longest_prefix > 1) ++out.prolonged;
  if (!r.closed)
    out.counterexamples.push_back({pretty(inst.source), std::string(rule_name(inst.red.rule)),
                                   to_string(inst.red.pos), r.transcript, r.bound_limited});
  if (opts.keep_witnesses) {
    InstanceRecord rec{pretty(inst.source), std::string(rule_name(inst.red.rule)), to_string(inst.red.pos),
                       r.diagram_per_branch, {}};
    for (const auto& w : r.witnesses) {
      std::vector<StepRecord> steps;
      for (const auto& s : w)
        steps.push_back({std::string(rule_name(s.redex.rule)), std::string(flag_name(s.flag)),
                         to_string(s.redex.pos), s.redex.group, pretty(s.before), pretty(s.after)});
      rec.witnesses.push_back(std::move(steps));
    }
    out.records.push_back(std::move(rec));
  }
}

}  // namespace

namespace {

// Checks one slice of terms and adds its outcome to `rep`.
void check_terms(const std::vector<Rule>& rules, DiagramKind kind, const std::vector<DiagramRule>& diagrams,
                 const std::vector<Expr>& terms, const CheckOptions& opts, CheckReport& rep) {
  std::vector<TermOutcome> per_term(terms.size());
  parallel_for(terms.size(), opts.exec, [&](std::size_t i) {
    auto& out = per_term[i];
    out.matches.assign(diagrams.size(), 0);
    if (kind == DiagramKind::Forking) {
      TermView view(terms[i]);
      bool has_standard = view.sr.kind != StandardRedex::Kind::None;
      for (const auto& f : internal_instances<ForkInstance>(terms[i], rules)) {
        if (!has_standard) {
          ++out.base_cases;
          continue;
        }
        record(out, f, close_fork(f, diagrams, opts), diagrams.size(), opts);
      }
    } else {
      for (const auto& c : find_commutes(terms[i], rules)) {
        if (standard_redex(c.red_result).kind == StandardRedex::Kind::None) {
          ++out.base_cases;
          continue;
        }
        record(out, c, close_commute(c, diagrams, opts), diagrams.size(), opts);
      }
    }
  });
  rep.terms_scanned += terms.size();
  for (auto& t : per_term) {
    rep.instances_checked += t.instances;
    rep.base_cases += t.base_cases;
    rep.prolongations_used += t.prolonged;
    for (std::size_t d = 0; d < diagrams.size(); ++d) rep.matches[d] += t.matches[d];
    for (auto& c : t.counterexamples) rep.counterexamples.push_back(std::move(c));
    for (auto& r : t.records) rep.records.push_back(std::move(r));
  }
}

CheckReport empty_report(const std::string& red, DiagramKind kind, std::size_t n_diagrams) {
  CheckReport rep;
  rep.red = red;
  rep.kind = kind;
  rep.matches.assign(n_diagrams, 0);
  return rep;
}

}  // namespace

CheckReport verify_complete_set(const std::string& red, DiagramKind kind,
                                const std::vector<DiagramRule>& diagrams, const std::vector<Expr>& terms,
                                const CheckOptions& opts) {
  auto rep = empty_report(red, kind, diagrams.size());
  check_terms(red_rules(red), kind, diagrams, terms, opts, rep);
  return rep;
}

// Streams the enumeration in fixed batches, so sizes whose term list would
// not fit in memory can still be checked.  Batching does not change the
// report: terms arrive in enumeration order either way.
CheckReport verify_complete_set(const std::string& red, DiagramKind kind,
                                const std::vector<DiagramRule>& diagrams, const EnumParams& params,
                                const CheckOptions& opts) {
  constexpr std::size_t batch_size = 1 << 14;
  constexpr std::size_t memo_limit = 7;
  auto rules = red_rules(red);
  auto rep = empty_report(red, kind, diagrams.size());
  std::vector<Expr> batch;
  batch.reserve(batch_size);
  for_each_term(params, memo_limit, [&](const Expr& t) {
    batch.push_back(t);
    if (batch.size() == batch_size) {
      check_terms(rules, kind, diagrams, batch, opts, rep);
      batch.clear();
    }
  });
  check_terms(rules, kind, diagrams, batch, opts, rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Proposal

namespace {

struct Concrete {
  std::vector<ReductionStep> lhs_path;  // standard steps on the instance side
  std::vector<ReductionStep> rhs_front, rhs_back;
};

// Standard paths of exactly k steps from `e` (both arms of each choice).
void standard_paths(const Expr& e, std::size_t k, std::vector<ReductionStep>& cur,
                    std::vector<std::vector<ReductionStep>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  TermView view(cur.empty() ? e : cur.back().after);
  for (auto& s : view.standard_steps()) {
    cur.push_back(std::move(s));
    standard_paths(e, k, cur, out);
    cur.pop_back();
  }
}

// Up to `extra` steps using `rules` from `e`; calls `hit` on each reached term.
template <class Hit>
bool extra_steps(const Expr& e, const std::vector<Rule>& rules, std::size_t extra,
                 std::vector<ReductionStep>& cur, Hit&& hit) {
  if (hit(cur.empty() ? e : cur.back().after, cur)) return true;
  if (cur.size() == extra) return false;
  const Expr from = cur.empty() ? e : cur.back().after;
  TermView view(from);
  for (const auto& rx : find_redexes(from, rules)) {
    cur.push_back({rx, view.flag(rx), from, apply(from, rx)});
    if (extra_steps(e, rules, extra, cur, hit)) return true;
    cur.pop_back();
  }
  return false;
}

// Trailing steps a proposed closing may use: the transformation itself and
// garbage collection.
std::vector<Rule> closing_rules(const std::vector<Rule>& red) {
  auto out = red;
  if (std::find(out.begin(), out.end(), Rule::ldel) == out.end()) out.push_back(Rule::ldel);
  return out;
}

// Shortest st^k . x^m (m <= 2) from `s` reaching `target`.
std::optional<std::pair<std::vector<ReductionStep>, std::vector<ReductionStep>>>
concrete_commute(const Expr& s, const std::string& target, const std::vector<Rule>& rules, std::size_t depth,
                 std::size_t min_standard) {
  for (std::size_t k = min_standard; k <= depth; ++k) {
    std::vector<std::vector<ReductionStep>> paths;
    std::vector<ReductionStep> cur;
    standard_paths(s, k, cur, paths);
    if (paths.empty()) break;
    for (const auto& p : paths) {
      std::vector<ReductionStep> extra;
      const Expr& from = p.empty() ? s : p.back().after;
      if (extra_steps(from, rules, 2, extra, [&](const Expr& e, const std::vector<ReductionStep>&) {
            return canonical(e) == target;
          }))
        return std::make_pair(p, extra);
    }
  }
  return std::nullopt;
}

// Transformation steps that happen to be standard (a cpt at the standard cpn
// position) become `either` so the checker looks for them among all redexes.
SeqAtom atom_for(const ReductionStep& s, bool transform_side = false) {
  SeqAtom a;
  switch (s.flag) {
    case StepFlag::Standard: a.flag = transform_side ? AtomFlag::Either : AtomFlag::St; break;
    case StepFlag::Internal: a.flag = AtomFlag::I; break;
    case StepFlag::Plain: a.flag = AtomFlag::Plain; break;
  }
  a.name = std::string(rule_name(s.redex.rule));
  a.allowed = {s.redex.rule};
  return a;
}

std::vector<SeqAtom> compress_lll(const std::vector<SeqAtom>& in) {
  std::vector<SeqAtom> out;
  auto lll = *family_members("lll");
  for (const auto& a : in) {
    bool is_lll = a.flag == AtomFlag::St && !a.metavar && a.allowed.size() == 1 && in_family(a.allowed[0], "lll");
    if (is_lll) {
      if (!out.empty() && out.back().name == "lll" && out.back().flag == a.flag) continue;
      SeqAtom g = a;
      g.name = "lll";
      g.allowed = lll;
      g.mult = Mult::Plus;
      out.push_back(g);
    } else {
      out.push_back(a);
    }
  }
  return out;
}

DiagramRule generalise(DiagramKind kind, std::vector<SeqAtom> lhs, std::vector<SeqAtom> rhs) {
  lhs = compress_lll(lhs);
  rhs = compress_lll(rhs);
  auto to_metavar = [](SeqAtom& a) {
    a.metavar = true;
    a.name = "a";
    a.allowed = base_rules();
  };
  if (lhs.size() == 2 && !rhs.empty()) {
    auto& l = kind == DiagramKind::Commuting ? lhs[1] : lhs[0];
    auto& r = kind == DiagramKind::Commuting ? rhs.front() : rhs.back();
    if (!l.metavar && l.mult == Mult::One && r.flag == AtomFlag::St && r.name == l.name) {
      to_metavar(l);
      to_metavar(r);
    }
  }
  DiagramRule d;
  d.kind = kind;
  d.lhs = std::move(lhs);
  d.rhs = std::move(rhs);
  d.text = to_string(d);
  return d;
}

// Generalised closings and the concrete ones behind them, in first-seen order.
struct Proposals {
  std::vector<DiagramRule> out, concrete;
  std::set<std::string> seen, seen_concrete;
};

void gather_proposals(const std::string& red, DiagramKind kind, const std::vector<Expr>& terms,
                      const CheckOptions& opts, Proposals& acc) {
  auto rules = red_rules(red);
  auto closers = closing_rules(rules);
  // generalised and concrete form of each closing found
  std::vector<std::vector<std::pair<DiagramRule, DiagramRule>>> per_term(terms.size());
  CheckOptions inner = opts;
  inner.keep_witnesses = false;
  const std::vector<DiagramRule> probe(1);

  parallel_for(terms.size(), opts.exec, [&](std::size_t i) {
    auto& found = per_term[i];
    auto add = [&](const std::vector<ReductionStep>& path, const ReductionStep& red_step,
                   const std::vector<ReductionStep>& front, const std::vector<ReductionStep>& back) {
      std::vector<SeqAtom> lhs, rhs;
      if (kind == DiagramKind::Commuting) {
        lhs.push_back(atom_for(red_step));
        for (const auto& s : path) lhs.push_back(atom_for(s));
        for (const auto& s : front) rhs.push_back(atom_for(s));
        for (const auto& s : back) rhs.push_back(atom_for(s, true));
      } else {
        for (auto it = path.rbegin(); it != path.rend(); ++it) lhs.push_back(atom_for(*it));
        lhs.push_back(atom_for(red_step));
        for (const auto& s : front) rhs.push_back(atom_for(s, true));
        for (auto it = back.rbegin(); it != back.rend(); ++it) rhs.push_back(atom_for(*it));
      }
      DiagramRule concrete{kind, lhs, rhs, ""};
      concrete.text = to_string(concrete);
      found.emplace_back(generalise(kind, std::move(lhs), std::move(rhs)), std::move(concrete));
    };
    if (kind == DiagramKind::Commuting) {
      for (const auto& c : find_commutes(terms[i], rules)) {
        if (standard_redex(c.red_result).kind == StandardRedex::Kind::None) continue;
        ReductionStep red_step{c.red, StepFlag::Internal, c.source, c.red_result};
        close_over_paths(c.red_result, true, inner, probe,
                         [&](const DiagramRule&, const Expr& end, const std::vector<ReductionStep>& path) {
                           Attempt a;
                           auto hit = concrete_commute(c.source, canonical(end), closers, opts.depth_bound,
                                                       path.empty() ? 1 : 0);
                           if (hit) {
                             add(path, red_step, hit->first, hit->second);
                             a.matched = true;
                           }
                           return a;
                         });
      }
    } else if (standard_redex(terms[i]).kind != StandardRedex::Kind::None) {
      for (const auto& f : internal_instances<ForkInstance>(terms[i], rules)) {
        ReductionStep red_step{f.red, StepFlag::Internal, f.source, f.red_result};
        close_over_paths(f.source, false, inner, probe,
                         [&](const DiagramRule&, const Expr& s, const std::vector<ReductionStep>& path) {
                           Attempt a;
                           // from s: a few transformation steps; from t: standard steps
                           std::map<std::string, std::vector<ReductionStep>> back_paths;
                           for (std::size_t k = 0; k <= opts.depth_bound; ++k) {
                             std::vector<std::vector<ReductionStep>> paths;
                             std::vector<ReductionStep> cur;
                             standard_paths(f.red_result, k, cur, paths);
                             if (paths.empty()) break;
                             for (auto& p : paths) {
                               auto key = canonical(p.empty() ? f.red_result : p.back().after);
                               back_paths.emplace(key, std::move(p));
                             }
                           }
                           std::vector<ReductionStep> front;
                           if (extra_steps(s, closers, 2, front, [&](const Expr& e, const std::vector<ReductionStep>&) {
                                 return back_paths.count(canonical(e)) > 0;
                               })) {
                             const Expr& w = front.empty() ? s : front.back().after;
                             add(path, red_step, front, back_paths.at(canonical(w)));
                             a.matched = true;
                           }
                           return a;
                         });
      }
    }
  });

  for (auto& list : per_term)
    for (auto& [g, c] : list) {
      if (acc.seen.insert(g.text).second) acc.out.push_back(std::move(g));
      if (acc.seen_concrete.insert(c.text).second) acc.concrete.push_back(std::move(c));
    }
}

// `covers` re-checks a candidate set over the same terms the proposals came from.
std::vector<DiagramRule> finish_proposals(Proposals acc,
                                          const std::function<bool(const std::vector<DiagramRule>&)>& covers) {
  // short rules first: they are tried first when checking
  auto shorter = [](const DiagramRule& a, const DiagramRule& b) {
    return a.lhs.size() + a.rhs.size() < b.lhs.size() + b.rhs.size();
  };
  auto out = std::move(acc.out);
  std::stable_sort(out.begin(), out.end(), shorter);
  if (covers(out)) return out;
  // generalising lost something; the concrete closings cover every instance seen
  std::stable_sort(acc.concrete.begin(), acc.concrete.end(), shorter);
  for (auto& c : acc.concrete)
    if (acc.seen.insert(c.text).second) out.push_back(std::move(c));
  return out;
}

}  // namespace

std::vector<DiagramRule> propose_diagrams(const std::string& red, DiagramKind kind, const std::vector<Expr>& terms,
                                          const CheckOptions& opts) {
  Proposals acc;
  gather_proposals(red, kind, terms, opts, acc);
  CheckOptions inner = opts;
  inner.keep_witnesses = false;
  return finish_proposals(std::move(acc), [&](const std::vector<DiagramRule>& ds) {
    return verify_complete_set(red, kind, ds, terms, inner).verified();
  });
}

// Same result as the list overload on enumerate_terms(params): batches are
// gathered in enumeration order.
std::vector<DiagramRule> propose_diagrams(const std::string& red, DiagramKind kind, const EnumParams& params,
                                          const CheckOptions& opts) {
  constexpr std::size_t batch_size = 1 << 14;
  Proposals acc;
  std::vector<Expr> batch;
  batch.reserve(batch_size);
  for_each_term(params, 7, [&](const Expr& t) {
    batch.push_back(t);
    if (batch.size() == batch_size) {
      gather_proposals(red, kind, batch, opts, acc);
      batch.clear();
    }
  });
  gather_proposals(red, kind, batch, opts, acc);
  CheckOptions inner = opts;
  inner.keep_witnesses = false;
  return finish_proposals(std::move(acc), [&](const std::vector<DiagramRule>& ds) {
    return verify_complete_set(red, kind, ds, params, inner).verified();
  });
}

// ---------------------------------------------------------------------------
// Rewriting sequences with a commuting set

std::optional<std::size_t> meta_rewrite_steps(const CommuteInstance& c, const std::vector<bool>& arms,
                                              const std::vector<DiagramRule>& diagrams, const CheckOptions& opts,
                                              std::size_t bound) {
  std::vector<ReductionStep> seq{{c.red, StepFlag::Internal, c.source, c.red_result}};
  auto run = standard_reduce(c.red_result, NdPolicy::Given, opts.depth_bound, arms, true);
  seq.insert(seq.end(), run.trace.begin(), run.trace.end());

  for (std::size_t rewrites = 0;; ++rewrites) {
    std::size_t i = 0;
    while (i + 1 < seq.size() && !(seq[i].flag != StepFlag::Standard && seq[i + 1].flag == StepFlag::Standard)) ++i;
    if (i + 1 >= seq.size()) return rewrites;
    if (rewrites == bound) return std::nullopt;
    std::size_t run_end = i + 1;
    while (run_end < seq.size() && seq[run_end].flag == StepFlag::Standard) ++run_end;
    bool done = false;
    // j = 0 lets a diagram such as `ldel ~> st,lll+ . ldel` rewrite the step alone
    for (std::size_t j = 0; j <= run_end - i - 1 && !done; ++j) {
      std::vector<ReductionStep> path(seq.begin() + static_cast<long>(i) + 1,
                                      seq.begin() + static_cast<long>(i + 1 + j));
      auto target = canonical(path.empty() ? seq[i].after : path.back().after);
      for (const auto& d : diagrams) {
        if (d.kind != DiagramKind::Commuting) continue;
        auto a = try_commute(d, seq[i].before, seq[i], path, target, opts);
        if (!a.matched) continue;
        std::vector<ReductionStep> next(seq.begin(), seq.begin() + static_cast<long>(i));
        next.insert(next.end(), a.witness.begin(), a.witness.end());
        // the witness ends alpha-equal to the old u_j; replay the remaining
        // standard steps on its own term so binder names in positions line up
        auto from = a.witness.empty() ? seq[i].before : a.witness.back().after;
        std::vector<bool> tail_arms;
        for (std::size_t k = i + 1 + j; k < run_end; ++k)
          if (seq[k].redex.rule == Rule::ndl || seq[k].redex.rule == Rule::ndr)
            tail_arms.push_back(seq[k].redex.rule == Rule::ndl);
        auto tail = standard_reduce(from, NdPolicy::Given, run_end - i - 1 - j, tail_arms, true);
        next.insert(next.end(), tail.trace.begin(), tail.trace.end());
        for (std::size_t k = run_end; k < seq.size(); ++k) next.push_back(seq[k]);
        seq = std::move(next);
        done = true;
        break;
      }
    }
    if (!done) return std::nullopt;
  }
}

}  // namespace ndlr
