#include "ndlr/alpha.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

namespace ndlr {

namespace {

void collect_free(const Expr& e, std::vector<std::string_view>& bound,
                  const std::function<void(const std::string&)>& emit) {
  auto is_bound = [&](std::string_view n) {
    return std::find(bound.rbegin(), bound.rend(), n) != bound.rend();
  };
  if (auto* v = e.get_if<Var>()) {
    if (!is_bound(v->name)) emit(v->name);
  } else if (auto* c = e.get_if<Con>()) {
    for (const auto& a : c->args) collect_free(a, bound, emit);
  } else if (auto* ch = e.get_if<Choice>()) {
    collect_free(ch->left, bound, emit);
    collect_free(ch->right, bound, emit);
  } else if (auto* cs = e.get_if<Case>()) {
    collect_free(cs->scrutinee, bound, emit);
    for (const auto& a : cs->alts) {
      for (const auto& x : a.vars) bound.push_back(x);
      collect_free(a.rhs, bound, emit);
      bound.resize(bound.size() - a.vars.size());
    }
  } else if (auto* ap = e.get_if<App>()) {
    collect_free(ap->fun, bound, emit);
    collect_free(ap->arg, bound, emit);
  } else if (auto* l = e.get_if<Lam>()) {
    bound.push_back(l->binder);
    collect_free(l->body, bound, emit);
    bound.pop_back();
  } else {
    auto& lr = e.as<Letrec>();
    for (const auto& b : lr.bindings) bound.push_back(b.name);
    for (const auto& b : lr.bindings) collect_free(b.rhs, bound, emit);
    collect_free(lr.body, bound, emit);
    bound.resize(bound.size() - lr.bindings.size());
  }
}

}  // namespace

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string_view> bound;
  collect_free(e, bound, [&](const std::string& n) { out.insert(n); });
  return out;
}

std::size_t count_free(const Expr& e, std::string_view name) {
  std::size_t n = 0;
  std::vector<std::string_view> bound;
  collect_free(e, bound, [&](const std::string& x) { n += (x == name); });
  return n;
}

bool occurs_free(const Expr& e, std::string_view name) { return count_free(e, name) != 0; }

bool is_closed(const Expr& e) { return free_vars(e).empty(); }

namespace {
void collect_names(const Expr& e, std::unordered_set<std::string>& out) {
  if (auto* v = e.get_if<Var>()) {
    out.insert(v->name);
  } else if (auto* c = e.get_if<Con>()) {
    for (const auto& a : c->args) collect_names(a, out);
  } else if (auto* ch = e.get_if<Choice>()) {
    collect_names(ch->left, out);
    collect_names(ch->right, out);
  } else if (auto* cs = e.get_if<Case>()) {
    collect_names(cs->scrutinee, out);
    for (const auto& a : cs->alts) {
      for (const auto& x : a.vars) out.insert(x);
      collect_names(a.rhs, out);
    }
  } else if (auto* ap = e.get_if<App>()) {
    collect_names(ap->fun, out);
    collect_names(ap->arg, out);
  } else if (auto* l = e.get_if<Lam>()) {
    out.insert(l->binder);
    collect_names(l->body, out);
  } else {
    auto& lr = e.as<Letrec>();
    for (const auto& b : lr.bindings) {
      out.insert(b.name);
      collect_names(b.rhs, out);
    }
    collect_names(lr.body, out);
  }
}
}  // namespace

std::unordered_set<std::string> all_names(const Expr& e) {
  std::unordered_set<std::string> out;
  collect_names(e, out);
  return out;
}

std::string NameSupply::fresh(const std::string& base) {
  auto stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  auto& k = next_[stem];
  while (true) {
    auto candidate = stem + std::to_string(++k);
    if (used_.insert(candidate).second) return candidate;
  }
}

// ---------------------------------------------------------------------------
// Canonical encoding

namespace {

constexpr std::size_t kMaxTieOrders = 5040;

class Encoder {
public:
  std::string encode(const Expr& e) {
    std::string out;
    emit(e, out);
    return out;
  }

private:
  struct Entry {
    std::string_view name;
    std::string token;
    int owner = -1;
    std::size_t index = 0;
  };

  const Entry* lookup(std::string_view name) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  void bind_level(std::string_view name) {
    env_.push_back({name, "#" + std::to_string(depth_), -1, 0});
    ++depth_;
  }
  void unbind(std::size_t n) {
    env_.resize(env_.size() - n);
    depth_ -= n;
  }

  void emit(const Expr& e, std::string& out) {
    if (auto* v = e.get_if<Var>()) {
      if (auto* entry = lookup(v->name)) {
        out += entry->token;
        if (entry->owner >= 0 && entry->owner == record_owner_) uses_->push_back(entry->index);
      } else {
        out += '$';
        out += v->name;
      }
      out += ' ';
    } else if (auto* c = e.get_if<Con>()) {
      out += 'K';
      out += c->name;
      out += '(';
      for (const auto& a : c->args) emit(a, out);
      out += ')';
    } else if (auto* ch = e.get_if<Choice>()) {
      out += "?(";
      emit(ch->left, out);
      emit(ch->right, out);
      out += ')';
    } else if (auto* cs = e.get_if<Case>()) {
      out += "C";
      out += cs->type;
      out += '(';
      emit(cs->scrutinee, out);
      for (const auto& a : cs->alts) {
        out += '|';
        out += a.constructor;
        for (const auto& x : a.vars) bind_level(x);
        emit(a.rhs, out);
        unbind(a.vars.size());
      }
      out += ')';
    } else if (auto* ap = e.get_if<App>()) {
      out += "@(";
      emit(ap->fun, out);
      emit(ap->arg, out);
      out += ')';
    } else if (auto* l = e.get_if<Lam>()) {
      out += "\\(";
      bind_level(l->binder);
      emit(l->body, out);
      unbind(1);
      out += ')';
    } else {
      emit_letrec(e.as<Letrec>(), out);
    }
  }

  // Encodes a subterm with this letrec's binders bound to class tokens.
  std::string encode_with_classes(const Letrec& lr, int id, const std::vector<std::size_t>& cls,
                                  const Expr& e) {
    auto n = lr.bindings.size();
    for (std::size_t i = 0; i < n; ++i)
      env_.push_back({lr.bindings[i].name, "&" + std::to_string(cls[i]), id, i});
    depth_ += n;
    std::string out;
    emit(e, out);
    unbind(n);
    return out;
  }

  void emit_letrec(const Letrec& lr, std::string& out) {
    auto n = lr.bindings.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::vector<std::size_t> cls(n, 0), rank(n, n);
    if (n > 1) {
      int id = next_id_++;
      int saved_owner = record_owner_;
      auto* saved_uses = uses_;

      // Refine binding classes until the partition is stable.
      record_owner_ = -1;
      std::size_t distinct = 1;
      while (true) {
        std::vector<std::pair<std::size_t, std::string>> keys(n);
        for (std::size_t i = 0; i < n; ++i)
          keys[i] = {cls[i], encode_with_classes(lr, id, cls, lr.bindings[i].rhs)};
        auto sorted = keys;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t i = 0; i < n; ++i)
          cls[i] = static_cast<std::size_t>(
              std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
        if (sorted.size() == distinct || sorted.size() == n) {
          distinct = sorted.size();
          break;
        }
        distinct = sorted.size();
      }

      // Break remaining ties by first use, starting from the body.
      if (distinct < n) {
        std::vector<std::size_t> uses;
        record_owner_ = id;
        uses_ = &uses;
        std::size_t next_rank = 0, scanned = 0;
        std::vector<std::size_t> frontier;
        auto absorb = [&] {
          for (; scanned < uses.size(); ++scanned) {
            auto b = uses[scanned];
            if (rank[b] == n) {
              rank[b] = next_rank++;
              frontier.push_back(b);
            }
          }
        };
        encode_with_classes(lr, id, cls, lr.body);
        absorb();
        for (std::size_t f = 0; f < frontier.size(); ++f) {
          encode_with_classes(lr, id, cls, lr.bindings[frontier[f]].rhs);
          absorb();
        }
      }
      record_owner_ = saved_owner;
      uses_ = saved_uses;

      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cls[a] != cls[b]) return cls[a] < cls[b];
        return rank[a] < rank[b];
      });
    }

    // Bindings no use reaches may still tie; try every order of each tied run
    // and keep the least encoding.  Runs are tiny in practice; past the cap the
    // refined order stands.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    if (n > 1) {
      auto key = [&](std::size_t pos) { return cls[order[pos]] * (n + 1) + rank[order[pos]]; };
      for (std::size_t i = 0; i < n;) {
        std::size_t j = i + 1;
        while (j < n && key(j) == key(i)) ++j;
        if (j - i > 1 && rank[order[i]] == n) runs.push_back({i, j});
        i = j;
      }
    }
    std::size_t combos = 1;
    for (auto [a, b] : runs)
      for (std::size_t k = 2; k <= b - a; ++k) combos *= k;
    if (runs.empty() || combos > kMaxTieOrders) {
      emit_ordered(lr, order, out);
      return;
    }
    std::string best;
    bool first = true;
    for (auto [a, b] : runs) std::sort(order.begin() + static_cast<long>(a), order.begin() + static_cast<long>(b));
    while (true) {
      std::string candidate;
      emit_ordered(lr, order, candidate);
      if (first || candidate < best) best = std::move(candidate);
      first = false;
      // odometer over the runs' permutations
      std::size_t r = 0;
      for (; r < runs.size(); ++r) {
        auto [a, b] = runs[r];
        if (std::next_permutation(order.begin() + static_cast<long>(a), order.begin() + static_cast<long>(b))) break;
      }
      if (r == runs.size()) break;
    }
    out += best;
  }

  void emit_ordered(const Letrec& lr, const std::vector<std::size_t>& order, std::string& out) {
    auto n = lr.bindings.size();
    auto base = depth_;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const auto& b = lr.bindings[order[pos]];
      env_.push_back({b.name, "#" + std::to_string(base + pos), -1, 0});
    }
    depth_ += n;
    out += "L[";
    for (std::size_t pos = 0; pos < n; ++pos) {
      emit(lr.bindings[order[pos]].rhs, out);
      out += ';';
    }
    out += ']';
    emit(lr.body, out);
    unbind(n);
  }

  std::vector<Entry> env_;
  std::size_t depth_ = 0;
  int next_id_ = 0;
  int record_owner_ = -1;
  std::vector<std::size_t>* uses_ = nullptr;
};

}  // namespace

std::string canonical(const Expr& e) { return Encoder{}.encode(e); }

bool alpha_eq(const Expr& a, const Expr& b) {
  if (a.same(b)) return true;
  return canonical(a) == canonical(b);
}

// ---------------------------------------------------------------------------
// Renaming

namespace {

class Renamer {
public:
  // rename_all: every binder gets a fresh name; otherwise only clashing ones.
  Renamer(NameSupply& supply, bool rename_all, std::unordered_set<std::string> taken = {})
      : supply_(supply), rename_all_(rename_all), taken_(std::move(taken)) {}

  Expr run(const Expr& e) {
    if (auto* v = e.get_if<Var>()) {
      auto it = lookup(v->name);
      return it ? var(*it) : e;
    }
    if (auto* c = e.get_if<Con>()) {
      std::vector<Expr> args;
      args.reserve(c->args.size());
      for (const auto& a : c->args) args.push_back(run(a));
      return con(c->name, c->arity, std::move(args));
    }
    if (auto* ch = e.get_if<Choice>()) return choice(run(ch->left), run(ch->right));
    if (auto* cs = e.get_if<Case>()) {
      auto scrut = run(cs->scrutinee);
      std::vector<Alt> alts;
      for (const auto& a : cs->alts) {
        Alt na{a.constructor, {}, {}};
        for (const auto& x : a.vars) na.vars.push_back(bind(x));
        na.rhs = run(a.rhs);
        scope_.resize(scope_.size() - a.vars.size());
        alts.push_back(std::move(na));
      }
      return case_of(cs->type, std::move(scrut), std::move(alts));
    }
    if (auto* ap = e.get_if<App>()) return app(run(ap->fun), run(ap->arg));
    if (auto* l = e.get_if<Lam>()) {
      auto x = bind(l->binder);
      auto body = run(l->body);
      scope_.pop_back();
      return lam(std::move(x), std::move(body));
    }
    auto& lr = e.as<Letrec>();
    std::vector<Binding> bs;
    for (const auto& b : lr.bindings) bs.push_back({bind(b.name), {}});
    for (std::size_t i = 0; i < bs.size(); ++i) bs[i].rhs = run(lr.bindings[i].rhs);
    auto body = run(lr.body);
    scope_.resize(scope_.size() - bs.size());
    return letrec(std::move(bs), std::move(body));
  }

private:
  const std::string* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  std::string bind(const std::string& name) {
    std::string fresh;
    if (rename_all_ || taken_.count(name)) fresh = supply_.fresh(name);
    else fresh = name;
    taken_.insert(fresh);
    supply_.reserve(fresh);
    scope_.emplace_back(name, fresh);
    return fresh;
  }

  NameSupply& supply_;
  bool rename_all_;
  std::unordered_set<std::string> taken_;
  std::vector<std::pair<std::string, std::string>> scope_;
};

void collect_binders(const Expr& e, std::vector<std::string>& out) {
  if (auto* c = e.get_if<Con>()) {
    for (const auto& a : c->args) collect_binders(a, out);
  } else if (auto* ch = e.get_if<Choice>()) {
    collect_binders(ch->left, out);
    collect_binders(ch->right, out);
  } else if (auto* cs = e.get_if<Case>()) {
    collect_binders(cs->scrutinee, out);
    for (const auto& a : cs->alts) {
      out.insert(out.end(), a.vars.begin(), a.vars.end());
      collect_binders(a.rhs, out);
    }
  } else if (auto* ap = e.get_if<App>()) {
    collect_binders(ap->fun, out);
    collect_binders(ap->arg, out);
  } else if (auto* l = e.get_if<Lam>()) {
    out.push_back(l->binder);
    collect_binders(l->body, out);
  } else if (auto* lr = e.get_if<Letrec>()) {
    for (const auto& b : lr->bindings) {
      out.push_back(b.name);
      collect_binders(b.rhs, out);
    }
    collect_binders(lr->body, out);
  }
}

}  // namespace

Expr freshen(const Expr& e, NameSupply& supply) { return Renamer(supply, true).run(e); }

Expr freshen(const Expr& e, const std::set<std::string>& avoid) {
  auto used = all_names(e);
  used.insert(avoid.begin(), avoid.end());
  NameSupply supply(std::move(used));
  return freshen(e, supply);
}

Expr establish_convention(const Expr& e) {
  if (satisfies_convention(e)) return e;
  NameSupply supply(all_names(e));
  auto fv = free_vars(e);
  return Renamer(supply, false, {fv.begin(), fv.end()}).run(e);
}

bool satisfies_convention(const Expr& e) {
  std::vector<std::string> binders;
  collect_binders(e, binders);
  std::unordered_set<std::string> seen;
  for (const auto& b : binders)
    if (!seen.insert(b).second) return false;
  for (const auto& f : free_vars(e))
    if (seen.count(f)) return false;
  return true;
}

}  // namespace ndlr
