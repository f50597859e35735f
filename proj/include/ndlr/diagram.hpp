#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndlr/enumerate.hpp"
#include "ndlr/parallel.hpp"
#include "ndlr/standard.hpp"

namespace ndlr {

enum class AtomFlag { St, I, Either, Plain };
enum class Mult { One, Plus, Star, Opt };

/// One position of a reduction-sequence pattern, e.g. `st,lll+` or `i,a`.
struct SeqAtom {
  AtomFlag flag = AtomFlag::Plain;
  std::string name;           // label, family or metavariable as written
  bool metavar = false;
  std::vector<Rule> allowed;  // labels the atom may stand for
  Mult mult = Mult::One;
};

enum class DiagramKind { Commuting, Forking };

/// `lhs ~> rhs`.  Commuting lhs: transform atom then st atoms.  Forking lhs:
/// st atoms (farthest from the peak first) then the transform atom; its rhs is
/// i atoms from the standard side followed by st atoms read back from the
/// transformed side.
struct DiagramRule {
  DiagramKind kind = DiagramKind::Commuting;
  std::vector<SeqAtom> lhs, rhs;
  std::string text;

  const SeqAtom& red_atom() const { return kind == DiagramKind::Commuting ? lhs.front() : lhs.back(); }
};

class DiagramError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Kind is taken from `kind` when given, otherwise from the first atom (st: forking).
DiagramRule parse_diagram(const std::string& line, std::optional<DiagramKind> kind = std::nullopt);
/// One rule per non-empty line; `#` starts a comment.  Errors carry the line number.
std::vector<DiagramRule> parse_diagram_set(const std::string& text,
                                           std::optional<DiagramKind> kind = std::nullopt);
std::vector<DiagramRule> load_diagram_file(const std::string& path);
std::string to_string(const SeqAtom& a);
std::string to_string(const DiagramRule& d);

/// Transformation labels generated as the `red` step for a name such as cp.
std::vector<Rule> red_rules(const std::string& red);

using Bindings = std::map<std::string, Rule>;

struct ForkInstance {
  Expr source;         // the peak u
  Redex red;           // u -> t, internal
  Expr red_result;
};

struct CommuteInstance {
  Expr source;         // s
  Redex red;           // s -> u, internal
  Expr red_result;     // u
};

struct CheckOptions {
  std::size_t depth_bound = 6;      // standard steps on the instance side and per rhs segment
  std::size_t search_nodes = 4000;  // cap on rhs search states per attempt
  Execution exec = Execution::Parallel;
  bool keep_witnesses = false;
};

/// How one instance was closed, or why not.
struct CloseResult {
  bool closed = false;
  bool bound_limited = false;                 // some branch ran into the depth bound
  std::vector<int> diagram_per_branch;        // matched diagram index per standard branch
  std::size_t longest_prefix = 0;             // longest standard prefix a match needed
  std::vector<std::vector<ReductionStep>> witnesses;  // replayable, one per branch
  std::string transcript;                     // for counterexamples
};

std::vector<ForkInstance> find_forks(const Expr& e, const std::vector<Rule>& red);
std::vector<CommuteInstance> find_commutes(const Expr& e, const std::vector<Rule>& red);

CloseResult close_fork(const ForkInstance& f, const std::vector<DiagramRule>& diagrams,
                       const CheckOptions& opts);
CloseResult check_commuting(const CommuteInstance& c, const std::vector<DiagramRule>& diagrams,
                            const CheckOptions& opts);

struct Counterexample {
  std::string term;
  std::string red;
  std::string position;
  std::string transcript;
  bool bound_limited = false;
};

/// One step of a witness, enough to replay it with apply().
struct StepRecord {
  std::string rule, flag, position;
  std::vector<std::string> group;
  std::string before, after;
};

struct InstanceRecord {
  std::string term;
  std::string red;
  std::string position;
  std::vector<int> diagrams;  // per branch, -1 when unmatched
  std::vector<std::vector<StepRecord>> witnesses;
};

struct CheckReport {
  std::string red;
  DiagramKind kind = DiagramKind::Commuting;
  std::size_t terms_scanned = 0;
  std::size_t instances_checked = 0;
  std::size_t base_cases = 0;  // transform steps with nothing standard to commute or fork with
  std::vector<std::size_t> matches;  // per diagram
  std::vector<Counterexample> counterexamples;
  std::size_t prolongations_used = 0;
  std::vector<InstanceRecord> records;  // filled when witnesses are kept

  bool verified() const { return counterexamples.empty(); }
};

CheckReport verify_complete_set(const std::string& red, DiagramKind kind,
                                const std::vector<DiagramRule>& diagrams,
                                const std::vector<Expr>& terms, const CheckOptions& opts);
CheckReport verify_complete_set(const std::string& red, DiagramKind kind,
                                const std::vector<DiagramRule>& diagrams, const EnumParams& params,
                                const CheckOptions& opts);

/// Closes every instance by search, then generalises the concrete closings into rules.
std::vector<DiagramRule> propose_diagrams(const std::string& red, DiagramKind kind,
                                          const std::vector<Expr>& terms, const CheckOptions& opts);
std::vector<DiagramRule> propose_diagrams(const std::string& red, DiagramKind kind, const EnumParams& params,
                                          const CheckOptions& opts);

/// Repeatedly replaces transform-then-standard segments using the commuting
/// set until every transform step is at the end.  Returns the number of
/// rewrites, or nullopt if `bound` rewrites did not reach a normal form.
std::optional<std::size_t> meta_rewrite_steps(const CommuteInstance& c, const std::vector<bool>& arms,
                                              const std::vector<DiagramRule>& diagrams,
                                              const CheckOptions& opts, std::size_t bound);

}  // namespace ndlr
